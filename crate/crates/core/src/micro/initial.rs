use crate::vec3::{self, Vec3};
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

/// Value, gradient and Hessian of a vector field at a point.
/// Entries for unused axes are zero.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Derivatives {
    pub value: Vec3,
    pub grad: [Vec3; 3],
    pub hess: [[Vec3; 3]; 3],
}

impl Derivatives {
    /// `Σ_rs A_rs ∂_r∂_s`
    pub fn div_grad(&self, a: &[[f64; 3]; 3], dim: usize) -> Vec3 {
        let mut out = [0.0; 3];
        for r in 0..dim {
            for s in 0..dim {
                out = vec3::axpy(out, a[r][s], self.hess[r][s]);
            }
        }
        out
    }
}

/// Derivatives of `P/|P|` up to second order from those of `P`.
pub fn normalized_derivatives(p: &Derivatives, dim: usize) -> Derivatives {
    let pv = p.value;
    let n = vec3::norm(pv);
    let (n1, n3, n5) = (1.0 / n, 1.0 / n.powi(3), 1.0 / n.powi(5));
    let mut out = Derivatives {
        value: vec3::scale(n1, pv),
        grad: [[0.0; 3]; 3],
        hess: [[[0.0; 3]; 3]; 3],
    };
    let pp: Vec<f64> = (0..dim).map(|i| vec3::dot(pv, p.grad[i])).collect();
    for i in 0..dim {
        out.grad[i] = vec3::axpy(vec3::scale(n1, p.grad[i]), -pp[i] * n3, pv);
    }
    for i in 0..dim {
        for j in 0..dim {
            let pi = p.grad[i];
            let pj = p.grad[j];
            let pij = p.hess[i][j];
            let mut v = vec3::scale(n1, pij);
            v = vec3::axpy(v, -pp[j] * n3, pi);
            let c = vec3::dot(pj, pi) + vec3::dot(pv, pij);
            v = vec3::axpy(v, -c * n3, pv);
            v = vec3::axpy(v, -pp[i] * n3, pj);
            v = vec3::axpy(v, 3.0 * pp[i] * pp[j] * n5, pv);
            out.hess[i][j] = v;
        }
    }
    out
}

/// Analytic initial magnetizations `M̃/|M̃|` used by the examples.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InitialData {
    /// One-dimensional profile with shifted exponential-cosine components.
    Ex1,
    /// Two-dimensional profile shared by all 2D examples.
    Ex2,
}

struct Component {
    base: f64,
    k: f64,
    shift: [f64; 2],
}

const EX1: [Component; 3] = [
    Component {
        base: 0.5,
        k: 0.1,
        shift: [0.32, 0.0],
    },
    Component {
        base: 0.5,
        k: 0.2,
        shift: [0.0, 0.0],
    },
    Component {
        base: 0.5,
        k: 0.1,
        shift: [0.75, 0.0],
    },
];

const EX2: [Component; 3] = [
    Component {
        base: 0.6,
        k: 0.3,
        shift: [0.25, 0.12],
    },
    Component {
        base: 0.5,
        k: 0.4,
        shift: [0.0, 0.4],
    },
    Component {
        base: 0.4,
        k: 0.2,
        shift: [0.81, 0.73],
    },
];

impl InitialData {
    pub fn name(self) -> &'static str {
        match self {
            InitialData::Ex1 => "EX1",
            InitialData::Ex2 => "EX2",
        }
    }

    pub fn dim(self) -> usize {
        match self {
            InitialData::Ex1 => 1,
            InitialData::Ex2 => 2,
        }
    }

    /// Derivatives of the unnormalized profile `M̃`.
    /// Each component is `b + exp(g)` with `g = -k Σ_r cos(2π(x_r - s_r))`.
    pub fn raw_derivatives(self, x: &[f64; 3]) -> Derivatives {
        let (comps, dim) = match self {
            InitialData::Ex1 => (&EX1, 1),
            InitialData::Ex2 => (&EX2, 2),
        };
        let mut d = Derivatives {
            value: [0.0; 3],
            grad: [[0.0; 3]; 3],
            hess: [[[0.0; 3]; 3]; 3],
        };
        for (c, comp) in comps.iter().enumerate() {
            let mut g = 0.0;
            let mut gi = [0.0; 3];
            let mut gii = [0.0; 3];
            for r in 0..dim {
                let a = 2.0 * PI * (x[r] - comp.shift[r]);
                g -= comp.k * a.cos();
                gi[r] = 2.0 * PI * comp.k * a.sin();
                gii[r] = 4.0 * PI * PI * comp.k * a.cos();
            }
            let f = g.exp();
            d.value[c] = comp.base + f;
            for r in 0..dim {
                d.grad[r][c] = f * gi[r];
                for s in 0..dim {
                    let gij = if r == s { gii[r] } else { 0.0 };
                    d.hess[r][s][c] = f * (gij + gi[r] * gi[s]);
                }
            }
        }
        d
    }

    /// Derivatives of the normalized magnetization.
    pub fn derivatives(self, x: &[f64; 3]) -> Derivatives {
        normalized_derivatives(&self.raw_derivatives(x), self.dim())
    }

    pub fn value(self, x: &[f64; 3]) -> Vec3 {
        let v = self.raw_derivatives(x).value;
        vec3::scale(1.0 / vec3::norm(v), v)
    }
}

impl fmt::Display for InitialData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for InitialData {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_uppercase().as_str() {
            "EX1" => Ok(InitialData::Ex1),
            "EX2" => Ok(InitialData::Ex2),
            _ => Err(format!("unknown initial data `{s}`")),
        }
    }
}
