use arrayvec::ArrayVec;
use serde::{Deserialize, Serialize};
use std::hash::{BuildHasherDefault, Hasher};

use super::GroupError;

/// Point of the polarized integer model of the rank-2 Heisenberg group.
///
/// Coordinates follow the generator order `X1, X2, Y1, Y2, Z`: `a` and `b`
/// are the `X` coordinates, `c` and `d` the `Y` coordinates, `e` the center.
/// All arithmetic is checked; overflow panics rather than wrapping.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct DiscretePoint {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
    pub e: i64,
}

/// Point of the 3-dimensional subgroup generated by `X1, Y1, Z`.
///
/// Product: `(a,c,e) * (a',c',e') = (a+a', c+c', e+e'+a c')`. Embeds into
/// [`DiscretePoint`] with `b = d = 0`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct DiscretePoint3 {
    pub a: i64,
    pub c: i64,
    pub e: i64,
}

#[inline]
fn add(x: i64, y: i64) -> i64 {
    x.checked_add(y).expect("integer overflow in group product")
}

#[inline]
fn mul(x: i64, y: i64) -> i64 {
    x.checked_mul(y).expect("integer overflow in group product")
}

impl DiscretePoint {
    pub const IDENTITY: DiscretePoint = DiscretePoint {
        a: 0,
        b: 0,
        c: 0,
        d: 0,
        e: 0,
    };

    pub const X1: DiscretePoint = DiscretePoint { a: 1, b: 0, c: 0, d: 0, e: 0 };
    pub const X2: DiscretePoint = DiscretePoint { a: 0, b: 1, c: 0, d: 0, e: 0 };
    pub const Y1: DiscretePoint = DiscretePoint { a: 0, b: 0, c: 1, d: 0, e: 0 };
    pub const Y2: DiscretePoint = DiscretePoint { a: 0, b: 0, c: 0, d: 1, e: 0 };
    pub const Z: DiscretePoint = DiscretePoint { a: 0, b: 0, c: 0, d: 0, e: 1 };

    pub const fn new(a: i64, b: i64, c: i64, d: i64, e: i64) -> Self {
        DiscretePoint { a, b, c, d, e }
    }

    /// Group product in the polarized model.
    #[inline]
    pub fn mul(self, q: DiscretePoint) -> DiscretePoint {
        DiscretePoint {
            a: add(self.a, q.a),
            b: add(self.b, q.b),
            c: add(self.c, q.c),
            d: add(self.d, q.d),
            e: add(add(self.e, q.e), add(mul(self.a, q.c), mul(self.b, q.d))),
        }
    }

    /// Group inverse: `(-a, -b, -c, -d, -e + a c + b d)`.
    #[inline]
    pub fn inv(self) -> DiscretePoint {
        DiscretePoint {
            a: -self.a,
            b: -self.b,
            c: -self.c,
            d: -self.d,
            e: add(-self.e, add(mul(self.a, self.c), mul(self.b, self.d))),
        }
    }

    /// Commutator `p^-1 q^-1 p q`.
    pub fn commutator(self, q: DiscretePoint) -> DiscretePoint {
        self.inv().mul(q.inv()).mul(self).mul(q)
    }

    /// Integer power by repeated squaring on the checked product.
    pub fn pow(self, n: i64) -> DiscretePoint {
        if n < 0 {
            return self.inv().pow(-n);
        }
        let mut acc = DiscretePoint::IDENTITY;
        let mut base = self;
        let mut k = n;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(base);
            }
        }
        acc
    }

    /// Right translation by `Z^t`; only the center coordinate moves.
    #[inline]
    pub fn z_shift(self, t: i64) -> DiscretePoint {
        DiscretePoint { e: add(self.e, t), ..self }
    }
}

impl DiscretePoint3 {
    pub const IDENTITY: DiscretePoint3 = DiscretePoint3 { a: 0, c: 0, e: 0 };
    pub const X1: DiscretePoint3 = DiscretePoint3 { a: 1, c: 0, e: 0 };
    pub const Y1: DiscretePoint3 = DiscretePoint3 { a: 0, c: 1, e: 0 };
    pub const Z: DiscretePoint3 = DiscretePoint3 { a: 0, c: 0, e: 1 };

    pub const fn new(a: i64, c: i64, e: i64) -> Self {
        DiscretePoint3 { a, c, e }
    }

    #[inline]
    pub fn mul(self, q: DiscretePoint3) -> DiscretePoint3 {
        DiscretePoint3 {
            a: add(self.a, q.a),
            c: add(self.c, q.c),
            e: add(add(self.e, q.e), mul(self.a, q.c)),
        }
    }

    #[inline]
    pub fn inv(self) -> DiscretePoint3 {
        DiscretePoint3 {
            a: -self.a,
            c: -self.c,
            e: add(-self.e, mul(self.a, self.c)),
        }
    }

    pub fn pow(self, n: i64) -> DiscretePoint3 {
        self.embed().pow(n).project()
    }

    #[inline]
    pub fn z_shift(self, t: i64) -> DiscretePoint3 {
        DiscretePoint3 { e: add(self.e, t), ..self }
    }

    /// Embedding into the rank-2 group with `b = d = 0`; a homomorphism.
    #[inline]
    pub fn embed(self) -> DiscretePoint {
        DiscretePoint { a: self.a, b: 0, c: self.c, d: 0, e: self.e }
    }
}

impl DiscretePoint {
    /// Restriction to the subgroup `b = d = 0`; panics off the subgroup.
    #[inline]
    pub fn project(self) -> DiscretePoint3 {
        assert!(self.b == 0 && self.d == 0, "point is not in the 3-dimensional subgroup");
        DiscretePoint3 { a: self.a, c: self.c, e: self.e }
    }
}

/// Lattice points that breadth-first searches and perimeter scans run over.
///
/// `pack` encodes a point into a 64-bit key (dense sets of millions of points
/// are stored as keys only); it returns an error once a coordinate leaves the
/// supported window, which callers surface as a resource-cap failure.
pub trait LatticePoint: Copy + Eq + std::hash::Hash + std::fmt::Debug {
    /// Number of generators, which is also the neighbor count.
    const DEGREE: usize;

    fn identity() -> Self;

    /// Group product.
    fn compose(self, other: Self) -> Self;

    /// Group inverse.
    fn inverse(self) -> Self;

    /// Right Cayley neighbors `p * s` over the symmetric generating set.
    fn neighbors(self) -> ArrayVec<Self, 8>;

    /// Right translation by `Z^t`.
    fn z_shift(self, t: i64) -> Self;

    /// Fiber key: all coordinates except the center.
    fn fiber(self) -> u64;

    /// Center coordinate.
    fn center(self) -> i64;

    fn pack(self) -> Result<u64, GroupError>;
    fn unpack(key: u64) -> Self;

    /// Lexicographic coordinate tuple used for deterministic output ordering.
    fn sort_key(self) -> (i64, i64, i64, i64, i64);
}

// Packed layouts. A 64-bit key cannot hold four 12-bit horizontal fields plus
// a 28-bit center (76 bits), so the rank-2 layout is 10+10+10+10+24: balls up
// to radius 511 fit, with center range +-2^23 (a radius-R ball needs at most
// R^2 <= 2^18). The 3-dimensional layout is 16+16+32.
const H5_HORIZ_BITS: u32 = 10;
const H5_CENTER_BITS: u32 = 24;
const H3_HORIZ_BITS: u32 = 16;

#[inline]
fn pack_field(v: i64, bits: u32) -> Option<u64> {
    let half = 1i64 << (bits - 1);
    if v < -half || v >= half {
        return None;
    }
    Some((v + half) as u64)
}

#[inline]
fn unpack_field(f: u64, bits: u32) -> i64 {
    f as i64 - (1i64 << (bits - 1))
}

impl LatticePoint for DiscretePoint {
    const DEGREE: usize = 8;

    fn identity() -> Self {
        DiscretePoint::IDENTITY
    }

    #[inline]
    fn compose(self, other: Self) -> Self {
        self.mul(other)
    }

    #[inline]
    fn inverse(self) -> Self {
        self.inv()
    }

    #[inline]
    fn neighbors(self) -> ArrayVec<Self, 8> {
        let DiscretePoint { a, b, c, d, e } = self;
        let mut out = ArrayVec::new();
        out.push(DiscretePoint { a: a + 1, b, c, d, e });
        out.push(DiscretePoint { a: a - 1, b, c, d, e });
        out.push(DiscretePoint { a, b: b + 1, c, d, e });
        out.push(DiscretePoint { a, b: b - 1, c, d, e });
        out.push(DiscretePoint { a, b, c: c + 1, d, e: e + a });
        out.push(DiscretePoint { a, b, c: c - 1, d, e: e - a });
        out.push(DiscretePoint { a, b, c, d: d + 1, e: e + b });
        out.push(DiscretePoint { a, b, c, d: d - 1, e: e - b });
        out
    }

    #[inline]
    fn z_shift(self, t: i64) -> Self {
        DiscretePoint::z_shift(self, t)
    }

    #[inline]
    fn fiber(self) -> u64 {
        // Horizontal coordinates are well inside 16 bits wherever fibers are
        // grouped (perimeter-scale sets); truncating casts are injective there.
        (self.a as u16 as u64)
            | (self.b as u16 as u64) << 16
            | (self.c as u16 as u64) << 32
            | (self.d as u16 as u64) << 48
    }

    #[inline]
    fn center(self) -> i64 {
        self.e
    }

    #[inline]
    fn pack(self) -> Result<u64, GroupError> {
        let f = |v| pack_field(v, H5_HORIZ_BITS);
        match (f(self.a), f(self.b), f(self.c), f(self.d), pack_field(self.e, H5_CENTER_BITS)) {
            (Some(a), Some(b), Some(c), Some(d), Some(e)) => Ok(a
                | b << H5_HORIZ_BITS
                | c << (2 * H5_HORIZ_BITS)
                | d << (3 * H5_HORIZ_BITS)
                | e << (4 * H5_HORIZ_BITS)),
            _ => Err(GroupError::Unpackable(format!("{self:?}"))),
        }
    }

    #[inline]
    fn unpack(key: u64) -> Self {
        let m = (1u64 << H5_HORIZ_BITS) - 1;
        DiscretePoint {
            a: unpack_field(key & m, H5_HORIZ_BITS),
            b: unpack_field(key >> H5_HORIZ_BITS & m, H5_HORIZ_BITS),
            c: unpack_field(key >> (2 * H5_HORIZ_BITS) & m, H5_HORIZ_BITS),
            d: unpack_field(key >> (3 * H5_HORIZ_BITS) & m, H5_HORIZ_BITS),
            e: unpack_field(key >> (4 * H5_HORIZ_BITS), H5_CENTER_BITS),
        }
    }

    fn sort_key(self) -> (i64, i64, i64, i64, i64) {
        (self.a, self.b, self.c, self.d, self.e)
    }
}

impl LatticePoint for DiscretePoint3 {
    const DEGREE: usize = 4;

    fn identity() -> Self {
        DiscretePoint3::IDENTITY
    }

    #[inline]
    fn compose(self, other: Self) -> Self {
        self.mul(other)
    }

    #[inline]
    fn inverse(self) -> Self {
        self.inv()
    }

    #[inline]
    fn neighbors(self) -> ArrayVec<Self, 8> {
        let DiscretePoint3 { a, c, e } = self;
        let mut out = ArrayVec::new();
        out.push(DiscretePoint3 { a: a + 1, c, e });
        out.push(DiscretePoint3 { a: a - 1, c, e });
        out.push(DiscretePoint3 { a, c: c + 1, e: e + a });
        out.push(DiscretePoint3 { a, c: c - 1, e: e - a });
        out
    }

    #[inline]
    fn z_shift(self, t: i64) -> Self {
        DiscretePoint3::z_shift(self, t)
    }

    #[inline]
    fn fiber(self) -> u64 {
        (self.a as u32 as u64) | (self.c as u32 as u64) << 32
    }

    #[inline]
    fn center(self) -> i64 {
        self.e
    }

    #[inline]
    fn pack(self) -> Result<u64, GroupError> {
        match (
            pack_field(self.a, H3_HORIZ_BITS),
            pack_field(self.c, H3_HORIZ_BITS),
            pack_field(self.e, 32),
        ) {
            (Some(a), Some(c), Some(e)) => Ok(a | c << H3_HORIZ_BITS | e << 32),
            _ => Err(GroupError::Unpackable(format!("{self:?}"))),
        }
    }

    #[inline]
    fn unpack(key: u64) -> Self {
        let m = (1u64 << H3_HORIZ_BITS) - 1;
        DiscretePoint3 {
            a: unpack_field(key & m, H3_HORIZ_BITS),
            c: unpack_field(key >> H3_HORIZ_BITS & m, H3_HORIZ_BITS),
            e: unpack_field(key >> 32, 32),
        }
    }

    fn sort_key(self) -> (i64, i64, i64, i64, i64) {
        (self.a, 0, self.c, 0, self.e)
    }
}

/// Multiply-xor finalizer for packed keys; BFS maps hold millions of them and
/// the default hasher dominates the profile otherwise.
#[derive(Default)]
pub struct KeyHasher(u64);

impl Hasher for KeyHasher {
    #[inline]
    fn finish(&self) -> u64 {
        self.0
    }

    fn write(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.write_u64(b as u64);
        }
    }

    #[inline]
    fn write_u64(&mut self, mut x: u64) {
        // splitmix64 finalizer
        x = x.wrapping_add(0x9e37_79b9_7f4a_7c15) ^ self.0;
        x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        self.0 = x ^ (x >> 31);
    }
}

pub type KeyBuildHasher = BuildHasherDefault<KeyHasher>;
