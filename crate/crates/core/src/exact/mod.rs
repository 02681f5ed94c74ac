//! Exhaustive analysis of small instances: state enumeration, generators,
//! stationarity residuals, transient total variation curves, exact mixing
//! times, spectral gaps and lumpability.

mod generator;
mod lump;
mod space;
mod spectral;
mod uniformize;

pub use generator::{
    build_generator, east_generator, identity_index, stationarity_residual, stationary, total_variation,
    walk_generator, DistVector, RateMatrix, Residuals,
};
pub use lump::{lump_check, LUMP_TOLERANCE};
pub use space::{Model, StateSpace, DEFAULT_CAP};
pub use spectral::{
    spectral_gap, spectral_gap_dense, spectral_gap_iterative, SpectralMethod, SpectralResult, DENSE_LIMIT,
    ITERATIVE_TOLERANCE,
};
pub use uniformize::{
    default_eps, discrete_distribution, exact_tmix, exact_tmix_from, transient, transient_with, tv_curve,
    tv_curve_with, TRUNCATION_TAIL,
};

use std::ops::RangeInclusive;

use serde::Serialize;

use crate::east::{psi_project, EastFlavor, EastStateQ};
use crate::error::{Error, Result};

/// Class map sending each `q`-state East configuration to the binary index
/// of its zero/nonzero pattern.
pub fn psi_partition(q_space: &StateSpace, binary_space: &StateSpace) -> Result<Vec<usize>> {
    let Model::East { flavor: EastFlavor::QState { modulus }, n } = q_space.model() else {
        return Err(Error::invalid("model", "psi partition needs a q-state East space"));
    };
    if binary_space.model().n() != n {
        return Err(Error::DimensionMismatch(binary_space.model().n(), n));
    }
    (0..q_space.size())
        .map(|x| {
            let h = EastStateQ::new(q_space.east_state(x), modulus)?;
            Ok(binary_space.east_index(psi_project(&h).sites()))
        })
        .collect()
}

/// Class map sending each matrix to column `col` (0-based) read as a
/// `(col + 1)`-site `q`-state East configuration: the diagonal 1 is the
/// pinned site and the entries above it are read upward.
pub fn column_partition(walk_space: &StateSpace, col: usize) -> Result<(Vec<usize>, StateSpace)> {
    let Model::GroupWalk { n, modulus } = walk_space.model() else {
        return Err(Error::invalid("model", "column partition needs a group walk space"));
    };
    if col >= n {
        return Err(Error::IndexOutOfRange { index: col, limit: n });
    }
    let east = StateSpace::enumerate(Model::east(col + 1, EastFlavor::QState { modulus })?)?;
    let mut h = vec![1u32; col + 1];
    let classes = (0..walk_space.size())
        .map(|x| {
            let m = walk_space.matrix(x)?;
            for (k, site) in h.iter_mut().enumerate().skip(1) {
                *site = m.get(col - k, col);
            }
            Ok(east.east_index(&h))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((classes, east))
}

#[derive(Clone, Debug, Serialize)]
pub struct GapRow {
    pub n: usize,
    pub states: usize,
    pub result: SpectralResult,
    /// Smallest gap over this and all earlier rows.
    pub running_inf: f64,
}

/// Spectral gaps of the East model of `flavor` for each `n` in range.
pub fn gap_table(flavor: EastFlavor, ns: RangeInclusive<usize>, cap: usize) -> Result<Vec<GapRow>> {
    let mut rows = Vec::new();
    let mut inf = f64::INFINITY;
    for n in ns {
        let space = StateSpace::with_cap(Model::east(n, flavor)?, cap)?;
        let gen = build_generator(&space)?;
        let result = spectral_gap(&gen, &stationary(&space))?;
        inf = inf.min(result.gap);
        rows.push(GapRow {
            n,
            states: space.size(),
            result,
            running_inf: inf,
        });
    }
    Ok(rows)
}

/// Largest `n` whose East state space fits under `cap`.
pub fn max_east_n(flavor: EastFlavor, cap: usize) -> usize {
    let mut n = 1;
    while StateSpace::with_cap(Model::East { n: n + 1, flavor }, cap).is_ok() {
        n += 1;
    }
    n
}

/// A result row in the `model,n,q_or_p,quantity,value,residual` format.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExactRow {
    pub model: String,
    pub n: usize,
    pub q_or_p: String,
    pub quantity: String,
    pub value: f64,
    pub residual: f64,
}

impl ExactRow {
    pub const HEADER: &'static str = "model,n,q_or_p,quantity,value,residual";

    pub fn new(model: &Model, quantity: &str, value: f64, residual: f64) -> Self {
        ExactRow {
            model: model.label().to_string(),
            n: model.n(),
            q_or_p: model.parameter(),
            quantity: quantity.to_string(),
            value,
            residual,
        }
    }

    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            self.model, self.n, self.q_or_p, self.quantity, self.value, self.residual
        )
    }
}

/// Standard exact summary of a model: stationarity and reversibility
/// residuals, spectral gap, and mixing time at `eps` (from the identity for
/// group walks, worst case over starts for East models).
pub fn summarize(model: Model, eps: f64, cap: usize) -> Result<Vec<ExactRow>> {
    let space = StateSpace::with_cap(model, cap)?;
    let gen = build_generator(&space)?;
    let pi = stationary(&space);
    let res = stationarity_residual(&gen, &pi)?;
    let gap = spectral_gap(&gen, &pi)?;
    let tmix = match model {
        Model::GroupWalk { .. } => {
            exact_tmix_from(&gen, &pi, &[DistVector::point_mass(space.size(), identity_index(&space))], eps)?
        }
        Model::East { .. } => exact_tmix(&gen, &pi, eps)?,
    };
    Ok(vec![
        ExactRow::new(&model, "states", space.size() as f64, 0.0),
        ExactRow::new(&model, "stationarity_residual", res.stationarity, 0.0),
        ExactRow::new(&model, "reversibility_residual", res.reversibility, 0.0),
        ExactRow::new(&model, "gap", gap.gap, gap.residual),
        ExactRow::new(&model, "tmix", tmix, 1e-6),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn psi_lumping_small() {
        let q = 3;
        let (qs, qgen) = east_generator(3, EastFlavor::qstate(q).unwrap()).unwrap();
        let (bs, bgen) = east_generator(3, EastFlavor::binary(2.0 / 3.0).unwrap()).unwrap();
        let classes = psi_partition(&qs, &bs).unwrap();
        let lumped = lump_check(&qgen, &classes, bs.size()).unwrap();
        assert!(lumped.max_abs_diff(&bgen) < 1e-12);
    }

    #[test]
    fn column_lumping_small() {
        let (ws, wgen) = walk_generator(3, 2).unwrap();
        for col in 0..3 {
            let (classes, es) = column_partition(&ws, col).unwrap();
            let lumped = lump_check(&wgen, &classes, es.size()).unwrap();
            let egen = build_generator(&es).unwrap();
            assert!(lumped.max_abs_diff(&egen) < 1e-12, "col {col}");
        }
        assert!(column_partition(&ws, 3).is_err());
    }

    #[test]
    fn summary_rows() {
        let rows = summarize(Model::group_walk(2, 2).unwrap(), default_eps(), DEFAULT_CAP).unwrap();
        let tmix = rows.iter().find(|r| r.quantity == "tmix").unwrap();
        assert!((tmix.value - 1.0).abs() < 2e-6);
        assert_eq!(rows[0].to_csv(), "walk,2,2,states,2,0");
    }

    #[test]
    fn max_sizes_under_cap() {
        assert_eq!(max_east_n(EastFlavor::qstate(2).unwrap(), 1 << 16), 17);
        assert_eq!(max_east_n(EastFlavor::qstate(3).unwrap(), 1 << 16), 11);
    }
}
