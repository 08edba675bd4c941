//! Scalar fields on the coordinate space with exact second-order jets.

mod expr;
mod fd;
mod jet;
mod lemma;
mod parse;

pub use expr::{Func, Node, ScalarField, EPS_DENOMINATOR};
pub use fd::fd_jet2_oracle;
pub use jet::{Jet1, Jet2};
pub use lemma::{lemma14_pq, lemma14_residuals, Lemma14Residuals};
pub use parse::{parse_field, parse_field_with, Bindings};

use crate::error::Error;
use crate::scalar::Scalar;

/// Coordinates of a point. `N = 4` for `(x1, x2, x3, x4)`, `N = 2` for a base
/// point `(x3, x4)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point<T, const N: usize>(pub [T; N]);

impl<T: Scalar, const N: usize> Point<T, N> {
    pub fn new(coords: [T; N]) -> Result<Self, Error> {
        const { assert!(N == 2 || N == 4, "points have 2 or 4 coordinates") };
        if let Some(bad) = coords.iter().position(|c| !c.is_finite()) {
            return Err(Error::Point(format!("coordinate {} is not finite", bad + 1)));
        }
        Ok(Point(coords))
    }

    pub fn coords(&self) -> &[T; N] {
        &self.0
    }

    /// Slot of coordinate `x{k}` in this point, if the dimension carries it.
    pub fn slot(k: u8) -> Option<usize> {
        match (N, k) {
            (4, 1..=4) => Some(k as usize - 1),
            (2, 3 | 4) => Some(k as usize - 3),
            _ => None,
        }
    }

    pub fn coord(&self, k: u8) -> Option<T> {
        Self::slot(k).map(|s| self.0[s])
    }
}

impl<T: Scalar> Point<T, 2> {
    /// Embeds a base point into the zero fiber `(0, 0, x3, x4)`.
    pub fn lift(&self) -> Point<T, 4> {
        Point([T::zero(), T::zero(), self.0[0], self.0[1]])
    }
}

impl<T: Scalar> Point<T, 4> {
    pub fn base(&self) -> Point<T, 2> {
        Point([self.0[2], self.0[3]])
    }
}
