//! Shared domain primitives: ecosystem axis and per-ecosystem value triples.

use std::fmt;

use crate::error::{Error, Result};
use crate::num::Scalar;

/// The three ecosystem types tracked separately through the whole pipeline.
///
/// Values indexed by ecosystem must never be summed across the axis directly;
/// collapsing them into a single number goes through the species-share
/// weighting in [`crate::footprint::biodiversity_equivalent`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Ecosystem {
    Terrestrial,
    Freshwater,
    Marine,
}

impl Ecosystem {
    pub const ALL: [Ecosystem; 3] = [
        Ecosystem::Terrestrial,
        Ecosystem::Freshwater,
        Ecosystem::Marine,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Ecosystem::Terrestrial => "terrestrial",
            Ecosystem::Freshwater => "freshwater",
            Ecosystem::Marine => "marine",
        }
    }

    pub fn parse(text: &str) -> Result<Ecosystem> {
        match text.trim().to_ascii_lowercase().as_str() {
            "terrestrial" => Ok(Ecosystem::Terrestrial),
            "freshwater" => Ok(Ecosystem::Freshwater),
            "marine" => Ok(Ecosystem::Marine),
            other => Err(Error::Invalid(format!("unknown ecosystem {other:?}"))),
        }
    }
}

impl fmt::Display for Ecosystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One value per ecosystem type.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ByEcosystem<S> {
    pub terrestrial: S,
    pub freshwater: S,
    pub marine: S,
}

impl<S> ByEcosystem<S> {
    pub fn new(terrestrial: S, freshwater: S, marine: S) -> Self {
        Self {
            terrestrial,
            freshwater,
            marine,
        }
    }

    pub fn get_ref(&self, eco: Ecosystem) -> &S {
        match eco {
            Ecosystem::Terrestrial => &self.terrestrial,
            Ecosystem::Freshwater => &self.freshwater,
            Ecosystem::Marine => &self.marine,
        }
    }

    pub fn set(&mut self, eco: Ecosystem, value: S) {
        match eco {
            Ecosystem::Terrestrial => self.terrestrial = value,
            Ecosystem::Freshwater => self.freshwater = value,
            Ecosystem::Marine => self.marine = value,
        }
    }
}

impl<S: Scalar> ByEcosystem<S> {
    pub fn zero() -> Self {
        Self::splat(S::zero())
    }

    pub fn splat(value: S) -> Self {
        Self::new(value, value, value)
    }

    pub fn get(&self, eco: Ecosystem) -> S {
        *self.get_ref(eco)
    }

    pub fn map(&self, mut f: impl FnMut(S) -> S) -> Self {
        Self::new(f(self.terrestrial), f(self.freshwater), f(self.marine))
    }

    pub fn zip(&self, other: &Self, mut f: impl FnMut(S, S) -> S) -> Self {
        Self::new(
            f(self.terrestrial, other.terrestrial),
            f(self.freshwater, other.freshwater),
            f(self.marine, other.marine),
        )
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a + b)
    }

    pub fn scale(&self, factor: S) -> Self {
        self.map(|v| v * factor)
    }

    pub fn add_assign(&mut self, other: &Self) {
        *self = self.add(other);
    }

    pub fn is_zero(&self) -> bool {
        self.terrestrial.is_zero() && self.freshwater.is_zero() && self.marine.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        self.terrestrial.is_finite() && self.freshwater.is_finite() && self.marine.is_finite()
    }
}
