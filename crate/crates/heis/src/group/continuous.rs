use serde::{Deserialize, Serialize};

use super::{DiscretePoint, GroupError};

/// Point of the symmetric (real) model of the rank-2 Heisenberg group.
///
/// Product: coordinatewise sum plus the commutator correction
/// `(x1 y1' - y1 x1' + x2 y2' - y2 x2') / 2` on the center. The inverse is
/// plain negation, Haar measure is Lebesgue measure, and `scale` is a group
/// automorphism.
#[derive(Clone, Copy, PartialEq, Debug, Serialize, Deserialize)]
pub struct ContinuousPoint {
    pub x1: f64,
    pub x2: f64,
    pub y1: f64,
    pub y2: f64,
    pub z: f64,
}

impl ContinuousPoint {
    pub const IDENTITY: ContinuousPoint = ContinuousPoint {
        x1: 0.0,
        x2: 0.0,
        y1: 0.0,
        y2: 0.0,
        z: 0.0,
    };

    pub const fn new(x1: f64, x2: f64, y1: f64, y2: f64, z: f64) -> Self {
        ContinuousPoint { x1, x2, y1, y2, z }
    }

    /// Checked constructor for boundary input; rejects NaN and infinities.
    pub fn try_new(x1: f64, x2: f64, y1: f64, y2: f64, z: f64) -> Result<Self, GroupError> {
        let p = ContinuousPoint { x1, x2, y1, y2, z };
        if [x1, x2, y1, y2, z].iter().all(|v| v.is_finite()) {
            Ok(p)
        } else {
            Err(GroupError::NonFinite)
        }
    }

    #[inline]
    pub fn mul(self, v: ContinuousPoint) -> ContinuousPoint {
        let twist =
            self.x1 * v.y1 - self.y1 * v.x1 + self.x2 * v.y2 - self.y2 * v.x2;
        ContinuousPoint {
            x1: self.x1 + v.x1,
            x2: self.x2 + v.x2,
            y1: self.y1 + v.y1,
            y2: self.y2 + v.y2,
            z: self.z + v.z + 0.5 * twist,
        }
    }

    /// In the symmetric model the inverse is coordinatewise negation.
    #[inline]
    pub fn inv(self) -> ContinuousPoint {
        ContinuousPoint {
            x1: -self.x1,
            x2: -self.x2,
            y1: -self.y1,
            y2: -self.y2,
            z: -self.z,
        }
    }

    /// Group automorphism scaling horizontal coordinates by `t` and the
    /// center by `t^2`.
    #[inline]
    pub fn scale(self, t: f64) -> ContinuousPoint {
        ContinuousPoint {
            x1: t * self.x1,
            x2: t * self.x2,
            y1: t * self.y1,
            y2: t * self.y2,
            z: t * t * self.z,
        }
    }

    /// Right translation by `Z^t` (center shift; no twist since `Z` is central).
    #[inline]
    pub fn z_translate(self, t: f64) -> ContinuousPoint {
        ContinuousPoint { z: self.z + t, ..self }
    }

    /// Homogeneous quasi-norm `|x1| + |x2| + |y1| + |y2| + 4 sqrt(|z|)`,
    /// comparable to the exact invariant metric within a bounded factor.
    #[inline]
    pub fn quasi_norm(self) -> f64 {
        self.x1.abs() + self.x2.abs() + self.y1.abs() + self.y2.abs() + 4.0 * self.z.abs().sqrt()
    }

    /// Left-invariant quasi-distance `quasi_norm(u^-1 v)`.
    #[inline]
    pub fn quasi_dist(self, v: ContinuousPoint) -> f64 {
        self.inv().mul(v).quasi_norm()
    }
}

/// Isomorphism from the polarized integer model to the symmetric model:
/// `(a,b,c,d,e) -> (a,b,c,d, e - (a c + b d)/2)`.
///
/// Values are integers or half-integers, hence exact in `f64` throughout the
/// supported coordinate range.
pub fn polarized_to_symmetric(p: DiscretePoint) -> ContinuousPoint {
    ContinuousPoint {
        x1: p.a as f64,
        x2: p.b as f64,
        y1: p.c as f64,
        y2: p.d as f64,
        z: p.e as f64 - 0.5 * (p.a as f64 * p.c as f64 + p.b as f64 * p.d as f64),
    }
}
