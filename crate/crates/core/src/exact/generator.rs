use crate::east::EastFlavor;
use crate::error::{Error, Result};
use crate::gfq::Unitriangular;

use super::space::{Model, StateSpace};

/// Sparse generator: off-diagonal rates in CSR layout plus the diagonal.
#[derive(Clone, Debug, PartialEq)]
pub struct RateMatrix {
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
    diag: Vec<f64>,
}

impl RateMatrix {
    /// Builds from `(from, to, rate)` triplets. Self-loops are dropped,
    /// duplicates summed, and the diagonal set so rows sum to zero.
    pub fn from_triplets(size: usize, mut triplets: Vec<(usize, usize, f64)>) -> Result<Self> {
        triplets.retain(|&(x, y, _)| x != y);
        if let Some(&(x, y, r)) = triplets.iter().find(|&&(x, y, r)| x >= size || y >= size || r < 0.0) {
            return Err(Error::invalid("triplet", format!("({x}, {y}, {r}) invalid for size {size}")));
        }
        triplets.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut row_ptr = vec![0usize; size + 1];
        let mut cols = Vec::with_capacity(triplets.len());
        let mut vals: Vec<f64> = Vec::with_capacity(triplets.len());
        let mut diag = vec![0.0; size];
        let mut last: Option<(usize, usize)> = None;
        for (x, y, r) in triplets {
            if r == 0.0 {
                continue;
            }
            if last == Some((x, y)) {
                *vals.last_mut().unwrap() += r;
            } else {
                cols.push(y);
                vals.push(r);
                row_ptr[x + 1] += 1;
                last = Some((x, y));
            }
            diag[x] -= r;
        }
        for i in 0..size {
            row_ptr[i + 1] += row_ptr[i];
        }
        Ok(RateMatrix {
            row_ptr,
            cols,
            vals,
            diag,
        })
    }

    pub fn size(&self) -> usize {
        self.diag.len()
    }

    pub fn nnz(&self) -> usize {
        self.cols.len()
    }

    /// Off-diagonal entries of row `x`.
    pub fn row(&self, x: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.row_ptr[x]..self.row_ptr[x + 1];
        self.cols[range.clone()].iter().copied().zip(self.vals[range].iter().copied())
    }

    pub fn diag(&self, x: usize) -> f64 {
        self.diag[x]
    }

    pub fn rate(&self, x: usize, y: usize) -> f64 {
        if x == y {
            return self.diag[x];
        }
        let range = self.row_ptr[x]..self.row_ptr[x + 1];
        let cols = &self.cols[range.clone()];
        match cols.binary_search(&y) {
            Ok(k) => self.vals[range.start + k],
            Err(_) => 0.0,
        }
    }

    pub fn exit_rate(&self, x: usize) -> f64 {
        -self.diag[x]
    }

    pub fn max_exit_rate(&self) -> f64 {
        self.diag.iter().fold(0.0f64, |m, &d| m.max(-d))
    }

    /// Largest `|row sum|` over all rows, including the stored diagonal.
    pub fn max_row_sum(&self) -> f64 {
        (0..self.size())
            .map(|x| (self.row(x).map(|(_, r)| r).sum::<f64>() + self.diag[x]).abs())
            .fold(0.0, f64::max)
    }

    pub fn min_off_diagonal(&self) -> f64 {
        self.vals.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Row vector times generator: `mu L`.
    pub fn left_mul(&self, mu: &[f64], out: &mut [f64]) {
        for (o, (&m, &d)) in out.iter_mut().zip(mu.iter().zip(&self.diag)) {
            *o = m * d;
        }
        for (x, &m) in mu.iter().enumerate() {
            if m == 0.0 {
                continue;
            }
            for (y, r) in self.row(x) {
                out[y] += m * r;
            }
        }
    }

    /// Largest entrywise difference, or infinity when sizes differ.
    pub fn max_abs_diff(&self, other: &RateMatrix) -> f64 {
        if self.size() != other.size() {
            return f64::INFINITY;
        }
        let mut worst = 0.0f64;
        for x in 0..self.size() {
            worst = worst.max((self.diag[x] - other.diag[x]).abs());
            for (y, r) in self.row(x) {
                worst = worst.max((r - other.rate(x, y)).abs());
            }
            for (y, r) in other.row(x) {
                worst = worst.max((r - self.rate(x, y)).abs());
            }
        }
        worst
    }
}

/// A probability vector over an enumerated state space.
#[derive(Clone, Debug, PartialEq)]
pub struct DistVector(Vec<f64>);

impl DistVector {
    pub fn new(p: Vec<f64>) -> Result<Self> {
        let sum: f64 = p.iter().sum();
        if p.iter().any(|&x| !(x >= 0.0)) || (sum - 1.0).abs() > 1e-12 {
            return Err(Error::invalid("distribution", format!("not a probability vector (sum {sum})")));
        }
        Ok(DistVector(p))
    }

    pub fn point_mass(size: usize, index: usize) -> Self {
        let mut p = vec![0.0; size];
        p[index] = 1.0;
        DistVector(p)
    }

    pub fn uniform(size: usize) -> Self {
        DistVector(vec![1.0 / size as f64; size])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn min_positive(&self) -> f64 {
        self.0.iter().copied().filter(|&x| x > 0.0).fold(f64::INFINITY, f64::min)
    }

    /// Mass of the states selected by `pred`.
    pub fn mass(&self, pred: impl Fn(usize) -> bool) -> f64 {
        self.0.iter().enumerate().filter(|&(i, _)| pred(i)).map(|(_, &p)| p).sum()
    }

    pub fn tv(&self, other: &[f64]) -> f64 {
        total_variation(&self.0, other)
    }
}

pub fn total_variation(a: &[f64], b: &[f64]) -> f64 {
    0.5 * a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>()
}

/// Assembles the generator of `space`'s model.
pub fn build_generator(space: &StateSpace) -> Result<RateMatrix> {
    let size = space.size();
    let mut triplets = Vec::new();
    match space.model() {
        Model::GroupWalk { n, modulus } => {
            let q = modulus.get();
            let rate = 1.0 / q as f64;
            for x in 0..size {
                let m = space.matrix(x)?;
                for i in 0..n - 1 {
                    for a in 1..q {
                        let mut y = m.clone();
                        y.add_row_multiple(i, a);
                        triplets.push((x, space.matrix_index(&y), rate));
                    }
                }
            }
        }
        Model::East { n, flavor } => {
            let mut h = vec![0u32; n];
            for x in 0..size {
                h.copy_from_slice(&space.east_state(x));
                for i in 0..n - 1 {
                    if h[i] == 0 {
                        continue;
                    }
                    let old = h[i + 1];
                    for v in 0..flavor.arity() {
                        if v == old {
                            continue;
                        }
                        h[i + 1] = v;
                        triplets.push((x, space.east_index(&h), flavor.site_weight(v)));
                    }
                    h[i + 1] = old;
                }
            }
        }
    }
    RateMatrix::from_triplets(size, triplets)
}

/// The stationary law of the model: uniform on `G_n(q)`, product measure
/// for the East models.
pub fn stationary(space: &StateSpace) -> DistVector {
    match space.model() {
        Model::GroupWalk { .. } => DistVector::uniform(space.size()),
        Model::East { flavor, .. } => {
            let p = (0..space.size())
                .map(|x| {
                    space
                        .decode(x)
                        .iter()
                        .map(|&v| flavor.site_weight(v))
                        .product()
                })
                .collect();
            DistVector(p)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Residuals {
    /// `max_y |(pi L)_y|`.
    pub stationarity: f64,
    /// `max_{x,y} |pi_x L_xy - pi_y L_yx|`.
    pub reversibility: f64,
}

pub fn stationarity_residual(gen: &RateMatrix, pi: &DistVector) -> Result<Residuals> {
    if gen.size() != pi.len() {
        return Err(Error::DimensionMismatch(gen.size(), pi.len()));
    }
    let pi = pi.as_slice();
    let mut flow = vec![0.0; gen.size()];
    gen.left_mul(pi, &mut flow);
    let stationarity = flow.iter().fold(0.0f64, |m, &x| m.max(x.abs()));
    let mut reversibility = 0.0f64;
    for x in 0..gen.size() {
        for (y, r) in gen.row(x) {
            reversibility = reversibility.max((pi[x] * r - pi[y] * gen.rate(y, x)).abs());
        }
    }
    Ok(Residuals {
        stationarity,
        reversibility,
    })
}

/// Enumerates and builds the East model of the given flavor.
pub fn east_generator(n: usize, flavor: EastFlavor) -> Result<(StateSpace, RateMatrix)> {
    let space = StateSpace::enumerate(Model::east(n, flavor)?)?;
    let gen = build_generator(&space)?;
    Ok((space, gen))
}

/// Generator of the walk on `G_n(q)`.
pub fn walk_generator(n: usize, q: u32) -> Result<(StateSpace, RateMatrix)> {
    let space = StateSpace::enumerate(Model::group_walk(n, q)?)?;
    let gen = build_generator(&space)?;
    Ok((space, gen))
}

/// Index of the identity matrix (all upper entries zero).
pub fn identity_index(space: &StateSpace) -> usize {
    debug_assert!(matches!(space.model(), Model::GroupWalk { .. }));
    0
}
