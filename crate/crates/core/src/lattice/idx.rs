use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::scalar::Real;

/// Largest supported torus dimension.
pub const MAX_DIM: usize = 3;

/// Integer lattice vector in `Z^d`, `d ≤ 3`, zero-padded.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Idx(pub [i32; MAX_DIM]);

impl Idx {
    pub const ZERO: Idx = Idx([0; MAX_DIM]);

    /// Panics if `v.len() > MAX_DIM`.
    pub fn from_slice(v: &[i32]) -> Self {
        assert!(v.len() <= MAX_DIM, "lattice vector longer than {MAX_DIM}");
        let mut out = [0; MAX_DIM];
        out[..v.len()].copy_from_slice(v);
        Idx(out)
    }

    pub fn scalar(k: i32) -> Self {
        Idx([k, 0, 0])
    }

    pub fn as_slice(&self, d: usize) -> &[i32] {
        &self.0[..d]
    }

    pub fn is_zero(&self) -> bool {
        self.0 == [0; MAX_DIM]
    }

    pub fn linf(&self) -> i32 {
        self.0.iter().map(|x| x.abs()).max().unwrap_or(0)
    }

    /// Euclidean norm.
    pub fn norm<T: Real>(&self) -> T {
        let s: i64 = self.0.iter().map(|&x| x as i64 * x as i64).sum();
        T::from_int(s).sqrt()
    }

    /// `k·v` for a real vector `v` of length `≤ MAX_DIM`.
    pub fn dot<T: Real>(&self, v: &[T]) -> T {
        self.0.iter().zip(v).fold(T::zero(), |acc, (&k, &w)| acc + T::from_int(k as i64) * w)
    }
}

impl fmt::Debug for Idx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.0[0], self.0[1], self.0[2])
    }
}

impl Add for Idx {
    type Output = Idx;
    fn add(self, o: Idx) -> Idx {
        Idx([self.0[0] + o.0[0], self.0[1] + o.0[1], self.0[2] + o.0[2]])
    }
}

impl Sub for Idx {
    type Output = Idx;
    fn sub(self, o: Idx) -> Idx {
        Idx([self.0[0] - o.0[0], self.0[1] - o.0[1], self.0[2] - o.0[2]])
    }
}

impl Neg for Idx {
    type Output = Idx;
    fn neg(self) -> Idx {
        Idx([-self.0[0], -self.0[1], -self.0[2]])
    }
}

impl Mul<i32> for Idx {
    type Output = Idx;
    fn mul(self, s: i32) -> Idx {
        Idx([self.0[0] * s, self.0[1] * s, self.0[2] * s])
    }
}

/// Fourier mode `(k, m)`: `exp(i k·x) exp(i 2π m·ξ / L)`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Debug)]
pub struct Mode {
    pub k: Idx,
    pub m: Idx,
}

impl Mode {
    pub const ZERO: Mode = Mode { k: Idx::ZERO, m: Idx::ZERO };

    pub fn new(k: Idx, m: Idx) -> Self {
        Mode { k, m }
    }

    /// One-dimensional shorthand.
    pub fn d1(k: i32, m: i32) -> Self {
        Mode { k: Idx::scalar(k), m: Idx::scalar(m) }
    }
}

impl Add for Mode {
    type Output = Mode;
    fn add(self, o: Mode) -> Mode {
        Mode { k: self.k + o.k, m: self.m + o.m }
    }
}

impl Neg for Mode {
    type Output = Mode;
    fn neg(self) -> Mode {
        Mode { k: -self.k, m: -self.m }
    }
}
