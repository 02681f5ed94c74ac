use std::fmt;

use crate::error::{Error, Result};

/// A prime modulus `q`, validated by trial division.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Modulus(u32);

pub fn is_prime(q: u32) -> bool {
    if q < 2 {
        return false;
    }
    let q = q as u64;
    let mut d = 2u64;
    while d * d <= q {
        if q % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl Modulus {
    pub fn new(q: u32) -> Result<Self> {
        if is_prime(q) {
            Ok(Modulus(q))
        } else {
            Err(Error::NotPrime(q))
        }
    }

    #[inline]
    pub fn get(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn reduce(self, x: u64) -> u32 {
        (x % self.0 as u64) as u32
    }

    #[inline]
    pub fn add(self, x: u32, y: u32) -> u32 {
        let s = x + y;
        if s >= self.0 {
            s - self.0
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(self, x: u32, y: u32) -> u32 {
        if x >= y {
            x - y
        } else {
            x + self.0 - y
        }
    }

    #[inline]
    pub fn neg(self, x: u32) -> u32 {
        if x == 0 {
            0
        } else {
            self.0 - x
        }
    }

    #[inline]
    pub fn mul(self, x: u32, y: u32) -> u32 {
        ((x as u64 * y as u64) % self.0 as u64) as u32
    }

    /// `x + a*y`, the kernel of every row and column operation.
    #[inline]
    pub fn axpy(self, x: u32, a: u32, y: u32) -> u32 {
        ((x as u64 + a as u64 * y as u64) % self.0 as u64) as u32
    }

    /// Inverse by the extended Euclidean algorithm.
    pub fn inv(self, x: u32) -> Result<u32> {
        let x = x % self.0;
        if x == 0 {
            return Err(Error::ZeroInverse);
        }
        let (mut r0, mut r1) = (self.0 as i64, x as i64);
        let (mut t0, mut t1) = (0i64, 1i64);
        while r1 != 0 {
            let k = r0 / r1;
            (r0, r1) = (r1, r0 - k * r1);
            (t0, t1) = (t1, t0 - k * t1);
        }
        debug_assert_eq!(r0, 1);
        Ok(t0.rem_euclid(self.0 as i64) as u32)
    }
}

impl fmt::Display for Modulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// An element of `Z_q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FieldScalar {
    value: u32,
    modulus: Modulus,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Mul,
    Neg,
    Inv,
}

impl FieldScalar {
    pub fn new(value: u64, modulus: Modulus) -> Self {
        FieldScalar {
            value: modulus.reduce(value),
            modulus,
        }
    }

    pub fn zero(modulus: Modulus) -> Self {
        FieldScalar { value: 0, modulus }
    }

    pub fn one(modulus: Modulus) -> Self {
        FieldScalar { value: 1, modulus }
    }

    #[inline]
    pub fn value(self) -> u32 {
        self.value
    }

    #[inline]
    pub fn modulus(self) -> Modulus {
        self.modulus
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    fn check(self, other: FieldScalar) -> Result<Modulus> {
        if self.modulus != other.modulus {
            return Err(Error::ModulusMismatch(
                self.modulus.get(),
                other.modulus.get(),
            ));
        }
        Ok(self.modulus)
    }

    pub fn add(self, other: FieldScalar) -> Result<FieldScalar> {
        let m = self.check(other)?;
        Ok(FieldScalar {
            value: m.add(self.value, other.value),
            modulus: m,
        })
    }

    pub fn mul(self, other: FieldScalar) -> Result<FieldScalar> {
        let m = self.check(other)?;
        Ok(FieldScalar {
            value: m.mul(self.value, other.value),
            modulus: m,
        })
    }

    pub fn neg(self) -> FieldScalar {
        FieldScalar {
            value: self.modulus.neg(self.value),
            modulus: self.modulus,
        }
    }

    pub fn inv(self) -> Result<FieldScalar> {
        Ok(FieldScalar {
            value: self.modulus.inv(self.value)?,
            modulus: self.modulus,
        })
    }

    /// Dispatch form; unary ops ignore `rhs`.
    pub fn apply(self, op: ArithOp, rhs: FieldScalar) -> Result<FieldScalar> {
        match op {
            ArithOp::Add => self.add(rhs),
            ArithOp::Mul => self.mul(rhs),
            ArithOp::Neg => Ok(self.neg()),
            ArithOp::Inv => self.inv(),
        }
    }
}

impl fmt::Display for FieldScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}
