//! Spectral gap of a reversible generator through the symmetrization
//! `A = D^{1/2} (-L) D^{-1/2}`, `D = diag(pi)`, whose null vector is
//! `sqrt(pi)`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rng::stream_rng;

use super::generator::{stationarity_residual, DistVector, RateMatrix};

/// Largest state count handled by the dense eigensolver.
pub const DENSE_LIMIT: usize = 2000;
pub const ITERATIVE_TOLERANCE: f64 = 1e-10;
const REVERSIBILITY_TOLERANCE: f64 = 1e-10;
const KRYLOV_DIM: usize = 64;
const MAX_RESTARTS: usize = 400;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpectralMethod {
    DenseEigen,
    Iterative,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SpectralResult {
    pub gap: f64,
    pub method: SpectralMethod,
    /// `||A v - gap v||` for the returned unit eigenvector.
    pub residual: f64,
}

struct Symmetrized<'a> {
    gen: &'a RateMatrix,
    sqrt_pi: Vec<f64>,
}

impl Symmetrized<'_> {
    fn apply(&self, v: &[f64], out: &mut [f64]) {
        let s = &self.sqrt_pi;
        for x in 0..v.len() {
            let mut acc = -self.gen.diag(x) * v[x];
            for (y, r) in self.gen.row(x) {
                acc -= s[x] / s[y] * r * v[y];
            }
            out[x] = acc;
        }
    }

    fn dense(&self) -> DMatrix<f64> {
        let n = self.sqrt_pi.len();
        let s = &self.sqrt_pi;
        let mut a = DMatrix::zeros(n, n);
        for x in 0..n {
            a[(x, x)] = -self.gen.diag(x);
            for (y, r) in self.gen.row(x) {
                a[(x, y)] -= 0.5 * s[x] / s[y] * r;
                a[(y, x)] -= 0.5 * s[x] / s[y] * r;
            }
        }
        a
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(y: &mut [f64], a: f64, x: &[f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

fn normalize(v: &mut [f64]) -> f64 {
    let norm = dot(v, v).sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|x| *x /= norm);
    }
    norm
}

fn residual_of(op: &Symmetrized<'_>, v: &[f64], lambda: f64) -> f64 {
    let mut av = vec![0.0; v.len()];
    op.apply(v, &mut av);
    axpy(&mut av, -lambda, v);
    dot(&av, &av).sqrt()
}

fn dense_gap(op: &Symmetrized<'_>) -> SpectralResult {
    let eig = SymmetricEigen::new(op.dense());
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let k = order[1];
    let gap = eig.eigenvalues[k];
    let v: Vec<f64> = eig.eigenvectors.column(k).iter().copied().collect();
    SpectralResult {
        gap,
        method: SpectralMethod::DenseEigen,
        residual: residual_of(op, &v, gap),
    }
}

/// Explicitly restarted Lanczos with full reorthogonalization inside each
/// cycle, run on the complement of `sqrt(pi)`.
fn lanczos_gap(op: &Symmetrized<'_>, tolerance: f64) -> SpectralResult {
    let n = op.sqrt_pi.len();
    let mut null = op.sqrt_pi.clone();
    normalize(&mut null);
    let deflate = |v: &mut [f64]| {
        let c = dot(v, &null);
        axpy(v, -c, &null);
    };

    let mut rng = stream_rng(0, 0x4c41_4e43, n as u64);
    let mut start: Vec<f64> = (0..n).map(|_| rng.random::<f64>() - 0.5).collect();
    deflate(&mut start);
    normalize(&mut start);

    let m = KRYLOV_DIM.min(n - 1);
    let mut best = SpectralResult {
        gap: f64::NAN,
        method: SpectralMethod::Iterative,
        residual: f64::INFINITY,
    };
    let mut w = vec![0.0; n];
    for _ in 0..MAX_RESTARTS {
        let mut basis: Vec<Vec<f64>> = vec![start.clone()];
        let mut alpha = Vec::with_capacity(m);
        let mut beta: Vec<f64> = Vec::with_capacity(m);
        for j in 0..m {
            op.apply(&basis[j], &mut w);
            let a = dot(&w, &basis[j]);
            alpha.push(a);
            // Two passes of Gram-Schmidt against the whole basis and the null vector.
            for _ in 0..2 {
                deflate(&mut w);
                for b in &basis {
                    let c = dot(&w, b);
                    axpy(&mut w, -c, b);
                }
            }
            let norm = normalize(&mut w);
            if j + 1 == m || norm < 1e-12 {
                break;
            }
            beta.push(norm);
            basis.push(w.clone());
        }
        let k = alpha.len();
        let mut t = DMatrix::zeros(k, k);
        for i in 0..k {
            t[(i, i)] = alpha[i];
            if i + 1 < k {
                t[(i, i + 1)] = beta[i];
                t[(i + 1, i)] = beta[i];
            }
        }
        let eig = SymmetricEigen::new(t);
        let (idx, _) = eig
            .eigenvalues
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .unwrap();
        let coeffs: DVector<f64> = eig.eigenvectors.column(idx).into_owned();
        let mut ritz = vec![0.0; n];
        for (c, b) in coeffs.iter().zip(&basis) {
            axpy(&mut ritz, *c, b);
        }
        deflate(&mut ritz);
        normalize(&mut ritz);
        let mut av = vec![0.0; n];
        op.apply(&ritz, &mut av);
        let theta = dot(&av, &ritz);
        axpy(&mut av, -theta, &ritz);
        let residual = dot(&av, &av).sqrt();
        if residual < best.residual {
            best = SpectralResult {
                gap: theta,
                method: SpectralMethod::Iterative,
                residual,
            };
        }
        if residual < tolerance || k < m {
            break;
        }
        start = ritz;
    }
    best
}

fn symmetrize<'a>(gen: &'a RateMatrix, pi: &DistVector) -> Result<Symmetrized<'a>> {
    if gen.size() != pi.len() {
        return Err(Error::DimensionMismatch(gen.size(), pi.len()));
    }
    if gen.size() < 2 {
        return Err(Error::invalid("generator", "spectral gap needs at least two states"));
    }
    let res = stationarity_residual(gen, pi)?;
    if res.reversibility > REVERSIBILITY_TOLERANCE {
        return Err(Error::NotReversible(res.reversibility));
    }
    Ok(Symmetrized {
        gen,
        sqrt_pi: pi.as_slice().iter().map(|p| p.sqrt()).collect(),
    })
}

/// Second-smallest eigenvalue of `-L`: dense below [`DENSE_LIMIT`] states,
/// iterative above.
pub fn spectral_gap(gen: &RateMatrix, pi: &DistVector) -> Result<SpectralResult> {
    let op = symmetrize(gen, pi)?;
    Ok(if gen.size() <= DENSE_LIMIT {
        dense_gap(&op)
    } else {
        lanczos_gap(&op, ITERATIVE_TOLERANCE)
    })
}

/// Forces the iterative solver regardless of size.
pub fn spectral_gap_iterative(gen: &RateMatrix, pi: &DistVector) -> Result<SpectralResult> {
    let op = symmetrize(gen, pi)?;
    Ok(lanczos_gap(&op, ITERATIVE_TOLERANCE))
}

/// Forces the dense solver regardless of size.
pub fn spectral_gap_dense(gen: &RateMatrix, pi: &DistVector) -> Result<SpectralResult> {
    let op = symmetrize(gen, pi)?;
    Ok(dense_gap(&op))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::east::EastFlavor;
    use crate::exact::generator::{east_generator, stationary, walk_generator};

    #[test]
    fn two_state_gaps() {
        for q in [2u32, 3, 5, 7] {
            let (space, gen) = walk_generator(2, q).unwrap();
            let r = spectral_gap(&gen, &stationary(&space)).unwrap();
            assert!((r.gap - 1.0).abs() < 1e-12, "q={q}: {}", r.gap);
            assert_eq!(r.method, SpectralMethod::DenseEigen);
        }
        for p in [0.1, 0.5, 0.9] {
            let (space, gen) = east_generator(2, EastFlavor::binary(p).unwrap()).unwrap();
            let r = spectral_gap(&gen, &stationary(&space)).unwrap();
            assert!((r.gap - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn iterative_agrees_with_dense() {
        for (n, flavor) in [
            (8, EastFlavor::binary(0.5).unwrap()),
            (6, EastFlavor::qstate(3).unwrap()),
            (9, EastFlavor::binary(0.2).unwrap()),
        ] {
            let (space, gen) = east_generator(n, flavor).unwrap();
            let pi = stationary(&space);
            let dense = spectral_gap_dense(&gen, &pi).unwrap();
            let iter = spectral_gap_iterative(&gen, &pi).unwrap();
            assert!((dense.gap - iter.gap).abs() < 1e-9, "{flavor} n={n}: {} vs {}", dense.gap, iter.gap);
            assert!(iter.residual < ITERATIVE_TOLERANCE);
            assert!(dense.residual < 1e-9);
        }
        let (space, gen) = walk_generator(4, 2).unwrap();
        let pi = stationary(&space);
        let dense = spectral_gap_dense(&gen, &pi).unwrap();
        let iter = spectral_gap_iterative(&gen, &pi).unwrap();
        assert!((dense.gap - iter.gap).abs() < 1e-9);
    }

    #[test]
    fn rejects_non_reversible_input() {
        // A 3-cycle is stationary for uniform but not reversible.
        let gen = RateMatrix::from_triplets(3, vec![(0, 1, 1.0), (1, 2, 1.0), (2, 0, 1.0)]).unwrap();
        let pi = DistVector::uniform(3);
        assert!(matches!(spectral_gap(&gen, &pi), Err(Error::NotReversible(_))));
        let single = RateMatrix::from_triplets(1, vec![]).unwrap();
        assert!(spectral_gap(&single, &DistVector::uniform(1)).is_err());
    }
}
