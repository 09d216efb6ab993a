use super::quadrature::{composite_simpson, gauss_legendre};
use super::KernelError;
use std::fmt::Write as _;

const MAX_PQ: usize = 12;
const MOMENT_NODES: usize = 96;

/// Polynomial kernel `K(x) = w(x) Σ c_i T_{d_i}(u(x))`.
///
/// Symmetric kernels live on `[-1,1]` with `w = (1-x²)^(q+1)`, `u = x` and
/// even degrees `d_i = 2i`, so odd moments vanish by symmetry. One-sided
/// kernels live on `[0,1]` with `w = (x(1-x))^(q+1)`, `u = 2x-1`, `d_i = i`.
#[derive(Clone, Debug, PartialEq)]
pub struct Kernel {
    p: usize,
    q: usize,
    one_sided: bool,
    coeffs: Vec<f64>,
    moments: Vec<f64>,
}

/// Builds the kernel with moment 0 equal to one and moments `1..=p` zero.
pub fn construct_kernel(p: usize, q: usize, one_sided: bool) -> Result<Kernel, KernelError> {
    if p > MAX_PQ || q > MAX_PQ {
        return Err(KernelError::InvalidParameters { p, q });
    }
    let n = if one_sided { p + 1 } else { p / 2 + 1 };
    let powers: Vec<i32> = if one_sided {
        (0..=p as i32).collect()
    } else {
        (0..n as i32).map(|j| 2 * j).collect()
    };
    let probe = Kernel {
        p,
        q,
        one_sided,
        coeffs: vec![0.0; n],
        moments: Vec::new(),
    };
    let (lo, hi) = probe.support();
    let (gx, gw) = gauss_legendre(MOMENT_NODES);
    let half = 0.5 * (hi - lo);
    let mid = 0.5 * (hi + lo);
    let mut a = vec![vec![0.0; n]; n];
    for (xi, wi) in gx.iter().zip(&gw) {
        let x = mid + half * xi;
        let w = probe.weight(x) * wi * half;
        let t = chebyshev_all(probe.degree(n - 1), probe.u(x));
        for (j, r) in powers.iter().enumerate() {
            let xr = x.powi(*r);
            for (i, aji) in a[j].iter_mut().enumerate() {
                *aji += w * xr * t[probe.degree(i)];
            }
        }
    }
    let mut rhs = vec![0.0; n];
    rhs[0] = 1.0;
    let (coeffs, condition) = solve_with_condition(a, rhs);
    if !(condition <= 1e12) {
        return Err(KernelError::IllConditionedSystem { condition });
    }
    let mut k = Kernel { coeffs, ..probe };
    k.moments = (0..=p).map(|r| k.moment(r)).collect();
    Ok(k)
}

/// `T_0(u)..=T_max(u)`
fn chebyshev_all(max: usize, u: f64) -> Vec<f64> {
    let mut t = vec![1.0; max + 1];
    if max >= 1 {
        t[1] = u;
    }
    for k in 2..=max {
        t[k] = 2.0 * u * t[k - 1] - t[k - 2];
    }
    t
}

/// Gaussian elimination with partial pivoting; also returns the 1-norm
/// condition number from the explicit inverse.
fn solve_with_condition(a: Vec<Vec<f64>>, rhs: Vec<f64>) -> (Vec<f64>, f64) {
    let n = rhs.len();
    let norm_a = (0..n)
        .map(|j| (0..n).map(|i| a[i][j].abs()).sum::<f64>())
        .fold(0.0, f64::max);
    // Augment with identity to obtain the inverse alongside the solution.
    let mut m: Vec<Vec<f64>> = a
        .into_iter()
        .enumerate()
        .map(|(i, mut row)| {
            row.push(rhs[i]);
            row.extend((0..n).map(|k| if k == i { 1.0 } else { 0.0 }));
            row
        })
        .collect();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&x, &y| m[x][col].abs().partial_cmp(&m[y][col].abs()).unwrap())
            .unwrap();
        m.swap(col, piv);
        let d = m[col][col];
        if d == 0.0 {
            return (vec![f64::NAN; n], f64::INFINITY);
        }
        for r in 0..n {
            if r != col {
                let f = m[r][col] / d;
                if f != 0.0 {
                    for c in col..(2 * n + 1) {
                        m[r][c] -= f * m[col][c];
                    }
                }
            }
        }
    }
    let x: Vec<f64> = (0..n).map(|i| m[i][n] / m[i][i]).collect();
    let norm_inv = (0..n)
        .map(|j| {
            (0..n)
                .map(|i| (m[i][n + 1 + j] / m[i][i]).abs())
                .sum::<f64>()
        })
        .fold(0.0, f64::max);
    (x, norm_a * norm_inv)
}

fn falling(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    ((n - k + 1)..=n).map(|v| v as f64).product()
}

fn binomial(n: usize, k: usize) -> f64 {
    falling(n, k) / falling(k, k)
}

/// Monomial coefficients of `T_k`.
fn chebyshev_monomial(k: usize) -> Vec<f64> {
    let mut prev = vec![1.0];
    if k == 0 {
        return prev;
    }
    let mut cur = vec![0.0, 1.0];
    for _ in 1..k {
        let mut next = vec![0.0; cur.len() + 1];
        for (i, c) in cur.iter().enumerate() {
            next[i + 1] += 2.0 * c;
        }
        for (i, c) in prev.iter().enumerate() {
            next[i] -= c;
        }
        prev = cur;
        cur = next;
    }
    cur
}

impl Kernel {
    pub fn p(&self) -> usize {
        self.p
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn one_sided(&self) -> bool {
        self.one_sided
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Moments `0..=p` from Gauss–Legendre quadrature at construction.
    pub fn moment_certificate(&self) -> &[f64] {
        &self.moments
    }

    pub fn support(&self) -> (f64, f64) {
        if self.one_sided {
            (0.0, 1.0)
        } else {
            (-1.0, 1.0)
        }
    }

    fn degree(&self, i: usize) -> usize {
        if self.one_sided {
            i
        } else {
            2 * i
        }
    }

    fn u(&self, x: f64) -> f64 {
        if self.one_sided {
            2.0 * x - 1.0
        } else {
            x
        }
    }

    fn weight(&self, x: f64) -> f64 {
        let base = if self.one_sided {
            x * (1.0 - x)
        } else {
            1.0 - x * x
        };
        base.powi(self.q as i32 + 1)
    }

    /// `K(x)`, zero outside the support.
    pub fn eval(&self, x: f64) -> f64 {
        let (lo, hi) = self.support();
        if !(x > lo && x < hi) {
            return 0.0;
        }
        let u = self.u(x);
        let (mut t0, mut t1) = (1.0, u);
        let mut s = 0.0;
        let step = if self.one_sided { 1 } else { 2 };
        let max_deg = self.degree(self.coeffs.len() - 1);
        let mut ci = 0;
        for k in 0..=max_deg {
            let tk = if k == 0 {
                1.0
            } else if k == 1 {
                u
            } else {
                let t2 = 2.0 * u * t1 - t0;
                t0 = t1;
                t1 = t2;
                t2
            };
            if k % step == 0 {
                s += self.coeffs[ci] * tk;
                ci += 1;
            }
        }
        self.weight(x) * s
    }

    /// `K_μ(x) = K(x/μ)/μ`.
    #[inline]
    pub fn scaled_eval(&self, mu: f64, x: f64) -> f64 {
        self.eval(x / mu) / mu
    }

    /// Tensor-product `Π_r K_μ(x_r)`.
    pub fn tensor_scaled_eval(&self, mu: f64, x: &[f64]) -> f64 {
        x.iter().map(|xr| self.scaled_eval(mu, *xr)).product()
    }

    /// `∫ x^r K(x) dx` by Gauss–Legendre quadrature, exact for these degrees.
    pub fn moment(&self, r: usize) -> f64 {
        let (lo, hi) = self.support();
        let (gx, gw) = gauss_legendre(MOMENT_NODES);
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        gx.iter()
            .zip(&gw)
            .map(|(xi, wi)| {
                let x = mid + half * xi;
                wi * half * x.powi(r as i32) * self.eval(x)
            })
            .sum()
    }

    /// Moments `0..=p` by composite Simpson with `intervals` subintervals.
    pub fn simpson_moments(&self, intervals: usize) -> Vec<f64> {
        let (lo, hi) = self.support();
        (0..=self.p)
            .map(|r| composite_simpson(|x| x.powi(r as i32) * self.eval(x), lo, hi, intervals))
            .collect()
    }

    /// Exact `k`-th derivative via the Leibniz rule on weight and sum.
    pub fn derivative(&self, x: f64, k: usize) -> f64 {
        let (lo, hi) = self.support();
        if x < lo || x > hi {
            return 0.0;
        }
        let n = self.q + 1;
        // w = f(x)^n g(x)^n with linear f, g
        let (f, fs, g, gs) = if self.one_sided {
            (x, 1.0, 1.0 - x, -1.0)
        } else {
            (1.0 - x, -1.0, 1.0 + x, 1.0)
        };
        let pow_der = |base: f64, slope: f64, i: usize| -> f64 {
            if i > n {
                0.0
            } else {
                falling(n, i) * slope.powi(i as i32) * base.powi((n - i) as i32)
            }
        };
        let w_der = |j: usize| -> f64 {
            (0..=j)
                .map(|i| binomial(j, i) * pow_der(f, fs, i) * pow_der(g, gs, j - i))
                .sum()
        };
        // S as a monomial polynomial in u
        let mut poly = vec![0.0; self.degree(self.coeffs.len() - 1) + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            for (e, t) in chebyshev_monomial(self.degree(i)).iter().enumerate() {
                poly[e] += c * t;
            }
        }
        let du: f64 = if self.one_sided { 2.0 } else { 1.0 };
        let u = self.u(x);
        let s_der = |j: usize| -> f64 {
            let mut acc = 0.0;
            for e in (j..poly.len()).rev() {
                acc = acc * u + poly[e] * falling(e, j);
            }
            acc * du.powi(j as i32)
        };
        (0..=k)
            .map(|j| binomial(k, j) * w_der(j) * s_der(k - j))
            .sum()
    }

    /// Plain-text coefficient listing; see [`Kernel::load`].
    pub fn dump(&self) -> String {
        let mut s = String::new();
        s.push_str("# K(x) = w(x) * sum_i c_i T_{d_i}(u)\n");
        s.push_str("# symmetric: support [-1,1], w = (1-x^2)^(q+1), u = x, d_i = 2i\n");
        s.push_str("# one-sided: support [0,1], w = (x(1-x))^(q+1), u = 2x-1, d_i = i\n");
        let _ = writeln!(s, "p {}", self.p);
        let _ = writeln!(s, "q {}", self.q);
        let _ = writeln!(s, "one_sided {}", self.one_sided);
        s.push_str("# columns: i d_i c_i\n");
        for (i, c) in self.coeffs.iter().enumerate() {
            let _ = writeln!(s, "{i} {} {c:.17e}", self.degree(i));
        }
        s
    }

    /// Reads a listing written by [`Kernel::dump`] and recomputes the moments.
    pub fn load(text: &str) -> Result<Kernel, KernelError> {
        let bad = |m: &str| KernelError::Parse(m.to_string());
        let (mut p, mut q, mut one_sided) = (None, None, None);
        let mut coeffs = Vec::new();
        for line in text.lines().map(str::trim) {
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            match parts.as_slice() {
                ["p", v] => p = Some(v.parse::<usize>().map_err(|_| bad("p"))?),
                ["q", v] => q = Some(v.parse::<usize>().map_err(|_| bad("q"))?),
                ["one_sided", v] => {
                    one_sided = Some(v.parse::<bool>().map_err(|_| bad("one_sided"))?)
                }
                [i, _d, c] => {
                    let i: usize = i.parse().map_err(|_| bad("coefficient index"))?;
                    if i != coeffs.len() {
                        return Err(bad("coefficient indices out of order"));
                    }
                    coeffs.push(c.parse::<f64>().map_err(|_| bad("coefficient value"))?);
                }
                _ => return Err(KernelError::Parse(format!("unrecognised line `{line}`"))),
            }
        }
        let (p, q, one_sided) = match (p, q, one_sided) {
            (Some(p), Some(q), Some(o)) => (p, q, o),
            _ => return Err(bad("missing p, q or one_sided")),
        };
        if p > MAX_PQ || q > MAX_PQ {
            return Err(KernelError::InvalidParameters { p, q });
        }
        let n = if one_sided { p + 1 } else { p / 2 + 1 };
        if coeffs.len() != n {
            return Err(KernelError::Parse(format!(
                "expected {n} coefficients, found {}",
                coeffs.len()
            )));
        }
        let mut k = Kernel {
            p,
            q,
            one_sided,
            coeffs,
            moments: Vec::new(),
        };
        k.moments = (0..=p).map(|r| k.moment(r)).collect();
        Ok(k)
    }
}
