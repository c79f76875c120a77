use core::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_8, PI};

use crate::distribution::PairSelector;
use crate::math;

/// Linear-polarization direction in radians, taken mod π.
///
/// The stored value is the canonical representative in `[0, π)`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct Angle(f64);

impl Angle {
    pub const ZERO: Angle = Angle(0.0);

    pub fn new(radians: f64) -> Self {
        let mut r = radians - PI * math::floor(radians / PI);
        // floor can leave r == π (or a hair below zero) after rounding
        if !(0.0..PI).contains(&r) {
            r = 0.0;
        }
        Angle(r)
    }

    pub fn from_degrees(degrees: f64) -> Self {
        Angle::new(degrees.to_radians())
    }

    pub fn radians(self) -> f64 {
        self.0
    }

    pub fn degrees(self) -> f64 {
        self.0.to_degrees()
    }

    /// The direction rotated by π/2.
    pub fn orthogonal(self) -> Angle {
        Angle::new(self.0 + FRAC_PI_2)
    }

    /// Distance on the circle of directions (period π), in `[0, π/2]`.
    pub fn distance(self, other: Angle) -> f64 {
        let d = Angle::new(self.0 - other.0).0;
        if d > FRAC_PI_2 {
            PI - d
        } else {
            d
        }
    }
}

impl From<f64> for Angle {
    fn from(radians: f64) -> Self {
        Angle::new(radians)
    }
}

/// The four polarizer directions of a Bell experiment: `a1`/`b1` on side 1,
/// `a2`/`b2` on side 2.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Settings {
    pub a1: Angle,
    pub b1: Angle,
    pub a2: Angle,
    pub b2: Angle,
}

impl Settings {
    pub fn new(a1: Angle, b1: Angle, a2: Angle, b2: Angle) -> Self {
        Settings { a1, b1, a2, b2 }
    }

    /// A1 = 0°, B1 = 45°, A2 = −22.5°, B2 = −67.5°. For `phi_plus` this
    /// saturates the Eq.-1 form of the CHSH expression at 2√2.
    pub fn chsh_optimal() -> Self {
        Settings {
            a1: Angle::ZERO,
            b1: Angle::new(FRAC_PI_4),
            a2: Angle::new(-FRAC_PI_8),
            b2: Angle::new(-3.0 * FRAC_PI_8),
        }
    }

    /// Every direction equal to `theta`.
    pub fn uniform(theta: Angle) -> Self {
        Settings { a1: theta, b1: theta, a2: theta, b2: theta }
    }

    /// Directions `(side 1, side 2)` measured in the given pair experiment.
    pub fn for_pair(&self, pair: PairSelector) -> (Angle, Angle) {
        match pair {
            PairSelector::A1A2 => (self.a1, self.a2),
            PairSelector::A1B2 => (self.a1, self.b2),
            PairSelector::B1A2 => (self.b1, self.a2),
            PairSelector::B1B2 => (self.b1, self.b2),
        }
    }
}

impl Default for Settings {
    fn default() -> Self {
        Settings::chsh_optimal()
    }
}
