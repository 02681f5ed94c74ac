use std::collections::BTreeSet;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};

/// Least-squares fit of `T* = C n^alpha (log q)^beta` in log space.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScalingFit {
    pub c: f64,
    pub alpha: f64,
    /// Absent when every row shares one `q`.
    pub beta: Option<f64>,
    /// Largest absolute residual of `log T*`.
    pub residual: f64,
    pub rows: Vec<(usize, u32, f64)>,
}

pub fn scaling_fit(rows: &[(usize, u32, f64)]) -> Result<ScalingFit> {
    let distinct_n: BTreeSet<usize> = rows.iter().map(|r| r.0).collect();
    if distinct_n.len() < 3 {
        return Err(Error::DegenerateFit(format!(
            "need at least 3 distinct n, got {}",
            distinct_n.len()
        )));
    }
    if let Some(r) = rows.iter().find(|r| !(r.2 > 0.0 && r.2.is_finite()) || r.1 < 2) {
        return Err(Error::DegenerateFit(format!("unusable row {r:?}")));
    }
    let with_q = rows.iter().map(|r| r.1).collect::<BTreeSet<_>>().len() > 1;
    let cols = if with_q { 3 } else { 2 };
    let design = DMatrix::from_fn(rows.len(), cols, |i, j| match j {
        0 => 1.0,
        1 => (rows[i].0 as f64).ln(),
        _ => (rows[i].1 as f64).ln().ln(),
    });
    let target = DVector::from_iterator(rows.len(), rows.iter().map(|r| r.2.ln()));
    let svd = design.clone().svd(true, true);
    let smallest = svd.singular_values.min();
    if smallest <= 1e-12 * svd.singular_values.max() {
        return Err(Error::DegenerateFit("design matrix is rank deficient".into()));
    }
    let coef = svd
        .solve(&target, 1e-12)
        .map_err(|e| Error::DegenerateFit(e.to_string()))?;
    let residual = (&design * &coef - &target).amax();
    Ok(ScalingFit {
        c: coef[0].exp(),
        alpha: coef[1],
        beta: with_q.then(|| coef[2]),
        residual,
        rows: rows.to_vec(),
    })
}
