use super::ReferenceError;
use crate::grid_fd::{Grid, MagnetizationField};
use crate::vec3;
use std::io::Write;

#[derive(Clone, Debug, PartialEq)]
pub struct ErrorReport {
    /// `sqrt(Σ |Δ|² ΔX^d)` on the coarser lattice.
    pub l2: f64,
    /// Largest nodewise `|Δ|`.
    pub linf: f64,
    /// How the two lattices were matched.
    pub grid_note: String,
}

/// Fine-to-coarse node stride per axis, if `fine` refines `coarse` exactly.
fn refinement(fine: &Grid, coarse: &Grid) -> Option<[usize; 3]> {
    if fine.dim() != coarse.dim() || fine.boundary() != coarse.boundary() {
        return None;
    }
    let mut r = [1; 3];
    for a in 0..fine.dim() {
        let (nf, nc) = (fine.count(a), coarse.count(a));
        let ext = coarse.extent(a);
        if nf % nc != 0
            || (fine.extent(a) - ext).abs() > 1e-12 * ext
            || (fine.origin(a) - coarse.origin(a)).abs() > 1e-12 * ext.max(1.0)
        {
            return None;
        }
        r[a] = nf / nc;
    }
    Some(r)
}

/// Discrete L² and max distance after restricting the finer field to the
/// coarser lattice by node coincidence.
pub fn l2_error(
    a: &MagnetizationField,
    b: &MagnetizationField,
) -> Result<ErrorReport, ReferenceError> {
    let (fine, coarse) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    let (gf, gc) = (fine.grid(), coarse.grid());
    let r = refinement(gf, gc).ok_or_else(|| {
        ReferenceError::IncommensurateGrids(format!(
            "{:?} nodes vs {:?} nodes",
            &gf.counts()[..gf.dim()],
            &gc.counts()[..gc.dim()]
        ))
    })?;
    let (mut sum, mut linf) = (0.0, 0.0f64);
    for (i, vc) in coarse.values().iter().enumerate() {
        let mc = gc.multi_index(i);
        let mf = [mc[0] * r[0], mc[1] * r[1], mc[2] * r[2]];
        let d = vec3::norm(vec3::sub(*vc, fine.values()[gf.index(mf)]));
        sum += d * d;
        linf = linf.max(d);
    }
    let grid_note = if r[..gc.dim()].iter().all(|&s| s == 1) {
        "same lattice".to_string()
    } else {
        format!(
            "restricted by node coincidence, stride {:?}",
            &r[..gc.dim()]
        )
    };
    Ok(ErrorReport {
        l2: (sum * gc.cell_volume()).sqrt(),
        linf,
        grid_note,
    })
}

/// Writes `node,x1[,x2[,x3]],m1,m2,m3` rows with a header.
pub fn write_field_csv<W: Write>(field: &MagnetizationField, out: W) -> Result<(), ReferenceError> {
    let io = |e: csv::Error| ReferenceError::Io(e.to_string());
    let g = field.grid();
    let d = g.dim();
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["node".to_string()];
    header.extend((1..=d).map(|a| format!("x{a}")));
    header.extend(["m1", "m2", "m3"].map(String::from));
    w.write_record(&header).map_err(io)?;
    for (i, m) in field.values().iter().enumerate() {
        let x = g.coords(i);
        let mut row = vec![i.to_string()];
        row.extend(x[..d].iter().map(|v| format!("{v:.12e}")));
        row.extend(m.iter().map(|v| format!("{v:.12e}")));
        w.write_record(&row).map_err(io)?;
    }
    w.flush().map_err(|e| ReferenceError::Io(e.to_string()))?;
    Ok(())
}
