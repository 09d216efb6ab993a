use crate::grid_fd::Mat3;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

/// Built-in material coefficients.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Preset {
    Ex1,
    Ex2,
    Ex3,
    Loc1d,
    Quasi2d,
    Loc2d,
}

impl Preset {
    pub const ALL: [Preset; 6] = [
        Preset::Ex1,
        Preset::Ex2,
        Preset::Ex3,
        Preset::Loc1d,
        Preset::Quasi2d,
        Preset::Loc2d,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Ex1 => "EX1",
            Preset::Ex2 => "EX2",
            Preset::Ex3 => "EX3",
            Preset::Loc1d => "LOC1D",
            Preset::Quasi2d => "QUASI2D",
            Preset::Loc2d => "LOC2D",
        }
    }

    pub fn dim(self) -> usize {
        match self {
            Preset::Ex1 | Preset::Loc1d => 1,
            _ => 2,
        }
    }

    /// Whether `a^ε(x) = a(x/ε)` for a 1-periodic `a`.
    pub fn is_periodic(self) -> bool {
        matches!(self, Preset::Ex1 | Preset::Ex2 | Preset::Ex3)
    }

    /// The same coefficient written in the expression grammar.
    pub fn expression_text(self) -> &'static str {
        match self {
            Preset::Ex1 => "1 + 0.5*sin(2*pi*x1/eps)",
            Preset::Ex2 => {
                "0.5 + (0.5 + 0.25*sin(2*pi*x1/eps))*(0.5 + 0.25*sin(2*pi*x2/eps)) \
                 + 0.25*(cos(2*pi*(x1 - x2)/eps) + sin(2*pi*x1/eps))"
            }
            Preset::Ex3 => "(1.1 + 0.5*sin(2*pi*x1/eps))*(1.1 + 0.5*sin(2*pi*x2/eps))",
            Preset::Loc1d => "1.1 + 0.25*sin(2*pi*x1 + 1.1) + 0.5*sin(2*pi*x1/eps)",
            Preset::Quasi2d => {
                "(1 + 0.25*sin(2*pi*x1/eps))\
                 *(1 + 0.25*sin(2*pi*x2/eps) + 0.25*sin(2*pi*1.41*x2/eps))"
            }
            Preset::Loc2d => "0.25*exp(-cos(2*pi*(x1 + x2)/eps) + sin(2*pi*x1/eps)*cos(2*pi*x2))",
        }
    }

    pub fn eval(self, x: &[f64; 3], eps: f64) -> f64 {
        let (x1, x2) = (x[0], x[1]);
        match self {
            Preset::Ex1 => 1.0 + 0.5 * (2.0 * PI * x1 / eps).sin(),
            Preset::Ex2 => {
                0.5 + (0.5 + 0.25 * (2.0 * PI * x1 / eps).sin())
                    * (0.5 + 0.25 * (2.0 * PI * x2 / eps).sin())
                    + 0.25 * ((2.0 * PI * (x1 - x2) / eps).cos() + (2.0 * PI * x1 / eps).sin())
            }
            Preset::Ex3 => {
                (1.1 + 0.5 * (2.0 * PI * x1 / eps).sin())
                    * (1.1 + 0.5 * (2.0 * PI * x2 / eps).sin())
            }
            Preset::Loc1d => {
                1.1 + 0.25 * (2.0 * PI * x1 + 1.1).sin() + 0.5 * (2.0 * PI * x1 / eps).sin()
            }
            Preset::Quasi2d => {
                (1.0 + 0.25 * (2.0 * PI * x1 / eps).sin())
                    * (1.0
                        + 0.25 * (2.0 * PI * x2 / eps).sin()
                        + 0.25 * (2.0 * PI * 1.41 * x2 / eps).sin())
            }
            Preset::Loc2d => {
                0.25 * (-(2.0 * PI * (x1 + x2) / eps).cos()
                    + (2.0 * PI * x1 / eps).sin() * (2.0 * PI * x2).cos())
                .exp()
            }
        }
    }

    /// Homogenized matrix where it is known in closed form.
    pub fn closed_form_ah(self) -> Option<Mat3> {
        match self {
            // harmonic mean of 1 + 0.5 sin
            Preset::Ex1 => Some([[(1.0f64 - 0.25).sqrt(), 0.0, 0.0], [0.0; 3], [0.0; 3]]),
            Preset::Ex3 => {
                let v = 1.1 * (1.1f64 * 1.1 - 0.25).sqrt();
                Some([[v, 0.0, 0.0], [0.0, v, 0.0], [0.0; 3]])
            }
            _ => None,
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| format!("unknown preset `{s}`"))
    }
}
