use std::fmt;

use crate::east::EastFlavor;
use crate::error::{Error, Result};
use crate::gfq::{Modulus, UnitriMatrix};

pub const DEFAULT_CAP: usize = 1 << 16;

/// Which chain a state space belongs to.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Model {
    /// The walk on `G_n(q)`.
    GroupWalk { n: usize, modulus: Modulus },
    /// The East model on `n` sites with pinned site 0.
    East { n: usize, flavor: EastFlavor },
}

impl Model {
    pub fn group_walk(n: usize, q: u32) -> Result<Self> {
        if n < 2 {
            return Err(Error::invalid("n", format!("need n >= 2, got {n}")));
        }
        Ok(Model::GroupWalk {
            n,
            modulus: Modulus::new(q)?,
        })
    }

    pub fn east(n: usize, flavor: EastFlavor) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("n", "East model needs at least one site"));
        }
        Ok(Model::East { n, flavor })
    }

    pub fn n(&self) -> usize {
        match *self {
            Model::GroupWalk { n, .. } | Model::East { n, .. } => n,
        }
    }

    fn radix(&self) -> u32 {
        match *self {
            Model::GroupWalk { modulus, .. } => modulus.get(),
            Model::East { flavor, .. } => flavor.arity(),
        }
    }

    fn digits(&self) -> usize {
        match *self {
            Model::GroupWalk { n, .. } => n * (n - 1) / 2,
            Model::East { n, .. } => n - 1,
        }
    }

    /// Short label used in CSV output.
    pub fn label(&self) -> &'static str {
        match self {
            Model::GroupWalk { .. } => "walk",
            Model::East { flavor: EastFlavor::Binary { .. }, .. } => "east-binary",
            Model::East { flavor: EastFlavor::QState { .. }, .. } => "east-q",
        }
    }

    /// `q` or `p` as printed in output rows.
    pub fn parameter(&self) -> String {
        match *self {
            Model::GroupWalk { modulus, .. } => modulus.to_string(),
            Model::East { flavor: EastFlavor::Binary { p }, .. } => p.to_string(),
            Model::East { flavor: EastFlavor::QState { modulus }, .. } => modulus.to_string(),
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(n={}, {})", self.label(), self.n(), self.parameter())
    }
}

/// Complete enumeration of a model's states.
///
/// States are digit strings: the strictly upper entries read row-major for
/// the walk, sites `1..n` for the East models. Indices are lexicographic
/// with the first digit most significant.
#[derive(Clone, Debug)]
pub struct StateSpace {
    model: Model,
    radix: u32,
    digits: usize,
    size: usize,
}

impl StateSpace {
    pub fn enumerate(model: Model) -> Result<Self> {
        Self::with_cap(model, DEFAULT_CAP)
    }

    pub fn with_cap(model: Model, cap: usize) -> Result<Self> {
        let radix = model.radix();
        let digits = model.digits();
        let size = (radix as u128).checked_pow(digits as u32).unwrap_or(u128::MAX);
        if size > cap as u128 {
            return Err(Error::CapExceeded { size, cap });
        }
        Ok(StateSpace {
            model,
            radix,
            digits,
            size: size as usize,
        })
    }

    pub fn model(&self) -> Model {
        self.model
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn digits(&self) -> usize {
        self.digits
    }

    pub fn decode_into(&self, mut index: usize, out: &mut [u32]) {
        let r = self.radix as usize;
        for d in out.iter_mut().rev() {
            *d = (index % r) as u32;
            index /= r;
        }
    }

    pub fn decode(&self, index: usize) -> Vec<u32> {
        let mut out = vec![0; self.digits];
        self.decode_into(index, &mut out);
        out
    }

    pub fn encode(&self, digits: &[u32]) -> usize {
        debug_assert_eq!(digits.len(), self.digits);
        digits
            .iter()
            .fold(0usize, |acc, &d| acc * self.radix as usize + d as usize)
    }

    /// Full East configuration (with the pinned site) of `index`.
    pub fn east_state(&self, index: usize) -> Vec<u32> {
        let mut h = vec![1; self.digits + 1];
        self.decode_into(index, &mut h[1..]);
        h
    }

    /// Index of a full East configuration; the pinned site is ignored.
    pub fn east_index(&self, h: &[u32]) -> usize {
        self.encode(&h[1..])
    }

    pub fn matrix(&self, index: usize) -> Result<UnitriMatrix> {
        match self.model {
            Model::GroupWalk { n, modulus } => {
                UnitriMatrix::from_upper_entries(n, &self.decode(index), modulus)
            }
            Model::East { .. } => Err(Error::invalid("model", "not a group walk")),
        }
    }

    pub fn matrix_index(&self, x: &UnitriMatrix) -> usize {
        self.encode(&x.upper_entries())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes() {
        assert_eq!(StateSpace::enumerate(Model::group_walk(2, 2).unwrap()).unwrap().size(), 2);
        assert_eq!(StateSpace::enumerate(Model::group_walk(3, 2).unwrap()).unwrap().size(), 8);
        let east = Model::east(4, EastFlavor::qstate(3).unwrap()).unwrap();
        assert_eq!(StateSpace::enumerate(east).unwrap().size(), 27);
        let east = Model::east(5, EastFlavor::binary(0.3).unwrap()).unwrap();
        assert_eq!(StateSpace::enumerate(east).unwrap().size(), 16);
    }

    #[test]
    fn cap_is_enforced() {
        let big = Model::group_walk(7, 2).unwrap();
        assert!(matches!(
            StateSpace::enumerate(big),
            Err(Error::CapExceeded { size: 2097152, cap: 65536 })
        ));
        assert!(StateSpace::with_cap(Model::group_walk(6, 2).unwrap(), 1 << 15).is_ok());
        assert!(StateSpace::with_cap(Model::group_walk(6, 2).unwrap(), (1 << 15) - 1).is_err());
        assert!(StateSpace::enumerate(Model::group_walk(40, 7).unwrap()).is_err());
    }

    #[test]
    fn lexicographic_indexing() {
        let s = StateSpace::enumerate(Model::group_walk(3, 3).unwrap()).unwrap();
        assert_eq!(s.decode(0), vec![0, 0, 0]);
        assert_eq!(s.decode(1), vec![0, 0, 1]);
        assert_eq!(s.decode(9), vec![1, 0, 0]);
        for i in 0..s.size() {
            assert_eq!(s.encode(&s.decode(i)), i);
            assert_eq!(s.matrix_index(&s.matrix(i).unwrap()), i);
        }
        let e = StateSpace::enumerate(Model::east(3, EastFlavor::binary(0.5).unwrap()).unwrap()).unwrap();
        assert_eq!(e.east_state(2), vec![1, 1, 0]);
        assert_eq!(e.east_index(&[1, 1, 0]), 2);
    }
}
