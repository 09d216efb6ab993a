use super::GridError;

/// Finite-difference weights (Fornberg's recursion) for derivatives
/// `0..=max_derivative` at point `z` from nodes `x`.
///
/// Returns `w[k][j]`: the weight of node `j` in the `k`-th derivative.
/// With `k = 0` these are the Lagrange basis values at `z`.
pub fn fornberg_weights(z: f64, x: &[f64], max_derivative: usize) -> Vec<Vec<f64>> {
    let n = x.len();
    let mut c = vec![vec![0.0; n]; max_derivative + 1];
    if n == 0 {
        return c;
    }
    let mut c1 = 1.0;
    let mut c4 = x[0] - z;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(max_derivative);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = x[i] - z;
        for j in 0..i {
            let c3 = x[i] - x[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

/// Central stencil of accuracy `order` for the `derivative`-th derivative on
/// unit spacing. The result has `order + 1` entries for offsets
/// `-order/2..=order/2`.
pub fn central_weights(derivative: usize, order: usize) -> Result<Vec<f64>, GridError> {
    if !(derivative == 1 || derivative == 2) {
        return Err(GridError::UnsupportedStencil { derivative, order });
    }
    if !matches!(order, 2 | 4 | 6 | 8) {
        return Err(GridError::UnsupportedStencil { derivative, order });
    }
    let r = (order / 2) as isize;
    let nodes: Vec<f64> = (-r..=r).map(|j| j as f64).collect();
    let mut w = fornberg_weights(0.0, &nodes, derivative).swap_remove(derivative);
    // Enforce the exact (anti)symmetry of central stencils.
    let len = w.len();
    for j in 0..len / 2 {
        let k = len - 1 - j;
        if derivative == 1 {
            let v = 0.5 * (w[k] - w[j]);
            w[j] = -v;
            w[k] = v;
        } else {
            let v = 0.5 * (w[k] + w[j]);
            w[j] = v;
            w[k] = v;
        }
    }
    if derivative == 1 {
        w[len / 2] = 0.0;
    }
    Ok(w)
}

/// Largest modulus of the Fourier symbol of a central stencil on unit
/// spacing, i.e. the spectral radius of the periodic operator times `h^derivative`.
pub fn symbol_max(derivative: usize, order: usize) -> Result<f64, GridError> {
    let w = central_weights(derivative, order)?;
    let r = (w.len() / 2) as isize;
    let samples = 4096;
    let mut best = 0.0f64;
    for s in 0..=samples {
        let theta = std::f64::consts::PI * s as f64 / samples as f64;
        let (mut re, mut im) = (0.0, 0.0);
        for (k, wk) in w.iter().enumerate() {
            let j = k as isize - r;
            re += wk * (j as f64 * theta).cos();
            im += wk * (j as f64 * theta).sin();
        }
        best = best.max((re * re + im * im).sqrt());
    }
    Ok(best)
}
