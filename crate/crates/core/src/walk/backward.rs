use std::sync::OnceLock;

use super::log::SplitLog;
use crate::error::{Error, Result};
use crate::gfq::{FieldVector, Matrix, Modulus, UnitriMatrix, Unitriangular};
use crate::path::{Change, SitePath};

/// The backward process `Y` of a split log: `Y_t` is the product of the
/// row-operation matrices of clocks `0..n-2` that ring in `(T - t, T]`, the
/// most recent leftmost. Growing `t` multiplies new factors on the right,
/// so `Y` runs as column dynamics.
#[derive(Debug)]
pub struct BackwardPath<'a> {
    split: &'a SplitLog,
    at_last: OnceLock<Vec<UnitriMatrix>>,
}

impl<'a> BackwardPath<'a> {
    pub fn new(split: &'a SplitLog) -> Self {
        BackwardPath {
            split,
            at_last: OnceLock::new(),
        }
    }

    pub fn split(&self) -> &SplitLog {
        self.split
    }

    /// Product of the f-event matrices with real time in `(lo, hi]`, latest
    /// leftmost.
    pub fn product_over(&self, lo: f64, hi: f64) -> UnitriMatrix {
        let split = self.split;
        let mut y = UnitriMatrix::identity(split.n(), split.modulus());
        let events = split.f_events();
        let start = events.partition_point(|e| e.time <= lo);
        let end = events.partition_point(|e| e.time <= hi);
        for e in events[start..end.max(start)].iter().rev() {
            y.add_col_multiple(e.clock, e.scalar);
        }
        y
    }

    fn check_time(&self, t: f64) -> Result<()> {
        if !(0.0..=self.split.horizon()).contains(&t) {
            return Err(Error::invalid(
                "t",
                format!("{t} outside [0, {}]", self.split.horizon()),
            ));
        }
        Ok(())
    }

    /// `Y_t`.
    pub fn at(&self, t: f64) -> Result<UnitriMatrix> {
        self.check_time(t)?;
        let horizon = self.split.horizon();
        Ok(self.product_over(horizon - t, horizon))
    }

    /// `Y_{t,t'} = Y_t^{-1} Y_{t'}` for `t <= t'`.
    pub fn between(&self, t: f64, t2: f64) -> Result<UnitriMatrix> {
        self.check_time(t)?;
        self.check_time(t2)?;
        if t > t2 {
            return Err(Error::invalid("t", format!("need t <= t', got {t} > {t2}")));
        }
        let horizon = self.split.horizon();
        Ok(self.product_over(horizon - t2, horizon - t))
    }

    /// `Y_{T - s_k}` for every ring `s_k` of the last clock, in ring order.
    /// Computed once by a single backward sweep.
    pub fn at_last_events(&self) -> &[UnitriMatrix] {
        self.at_last.get_or_init(|| {
            let mut out = Vec::with_capacity(self.split.last_events().len());
            sweep_backward::<UnitriMatrix>(self.split, |_, y| out.push(y.clone()));
            out.reverse();
            out
        })
    }
}

/// Walks the merged log from `T` down to 0, carrying `Y` (as `M`) and
/// calling `visit(k, Y_{T - s_k})` at each last-clock ring, `k` decreasing.
pub fn sweep_backward<M: Unitriangular>(split: &SplitLog, mut visit: impl FnMut(usize, &M)) {
    let mut y = M::identity_of(split.n(), split.modulus());
    let f = split.f_events();
    let last = split.last_events();
    let mut fi = f.len();
    for k in (0..last.len()).rev() {
        let s = last[k].time;
        while fi > 0 && f[fi - 1].time > s {
            fi -= 1;
            y.add_col_multiple(f[fi].clock, f[fi].scalar);
        }
        visit(k, &y);
    }
}

/// `Y_T + sum_k a_k Y_{T - s_k} E_{n-2,n-1}`, which reproduces `X_T`.
pub fn expansion_reconstruct(split: &SplitLog) -> Result<UnitriMatrix> {
    let n = split.n();
    let m = split.modulus();
    let path = BackwardPath::new(split);
    let e_last = Matrix::elementary(n, n - 2, n - 1, m)?;
    let mut acc = path.at(split.horizon())?.into_matrix();
    for (ev, y) in split.last_events().iter().zip(path.at_last_events()) {
        let term = y.as_matrix().mul(&e_last)?.scale(ev.scalar);
        acc = acc.add(&term)?;
    }
    UnitriMatrix::try_from_matrix(acc)
}

/// The path of `Z_t = b Y_t` for `b` with vanishing last entry, after
/// normalizing `b` so its leading entry is 1.
#[derive(Clone, Debug, PartialEq)]
pub struct ZTrajectory {
    modulus: Modulus,
    leading: usize,
    path: SitePath,
}

impl ZTrajectory {
    pub fn modulus(&self) -> Modulus {
        self.modulus
    }

    /// Index `l` of the pinned leading 1.
    pub fn leading(&self) -> usize {
        self.leading
    }

    pub fn path(&self) -> &SitePath {
        &self.path
    }
}

pub fn inner_chain(b: &FieldVector, split: &SplitLog) -> Result<ZTrajectory> {
    let n = split.n();
    if b.len() != n {
        return Err(Error::DimensionMismatch(b.len(), n));
    }
    if b.modulus() != split.modulus() {
        return Err(Error::ModulusMismatch(split.modulus().get(), b.modulus().get()));
    }
    let leading = b
        .leading_index()
        .ok_or_else(|| Error::invalid("b", "must be nonzero"))?;
    if b.entries()[n - 1] != 0 {
        return Err(Error::invalid("b", "last entry must vanish"));
    }
    let m = split.modulus();
    let b = b.normalized();
    let horizon = split.horizon();
    let mut z = b.entries().to_vec();
    let mut path = SitePath::new(z.clone(), horizon);
    for e in split.f_events().iter().rev() {
        let i = e.clock;
        let new = m.axpy(z[i + 1], e.scalar, z[i]);
        if new != z[i + 1] {
            z[i + 1] = new;
            path.push(Change {
                time: (horizon - e.time).max(0.0),
                site: i + 1,
                value: new,
            });
        }
    }
    Ok(ZTrajectory {
        modulus: m,
        leading,
        path,
    })
}
