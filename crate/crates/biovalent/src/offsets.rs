//! Offset pricing: biodiversity gain from retiring land from intensive use,
//! the area and cost needed to balance a footprint, and carbon offset cost.
//!
//! Recovery is modeled as a linear ramp from the working condition `c0`
//! (impact factor of continued intensive use, BDe per m2) to full recovery at
//! `t_rec` years: the gain at year `t` is `c0 * t / t_rec`. Gains are
//! averaged over a balancing horizon and the footprint is divided by the
//! average gain to get the required area.

use crate::error::{Error, Result};
use crate::num::Scalar;

/// Square metres per hectare.
const M2_PER_HA: f64 = 10_000.0;

/// How the per-year gains are averaged over the horizon.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AveragingConvention {
    /// Continuous-time mean of the ramp: `c0 * horizon / (2 * t_rec)`.
    #[default]
    Continuous,
    /// Mean over whole years t = 1..horizon: `c0 * (horizon + 1) / (2 * t_rec)`.
    DiscreteYears,
}

impl AveragingConvention {
    pub fn parse(text: &str) -> Result<Self> {
        match text.trim().to_ascii_lowercase().as_str() {
            "continuous" => Ok(AveragingConvention::Continuous),
            "discrete" | "discrete_years" => Ok(AveragingConvention::DiscreteYears),
            other => Err(Error::Config(format!(
                "unknown averaging convention {other:?}"
            ))),
        }
    }
}

/// Gain at year `t` of the linear recovery ramp.
///
/// Algebraically `c0 - c0 * (t_rec - t) / t_rec`, i.e. `c0 * t / t_rec`.
pub fn restoration_gain<S: Scalar>(c0: S, t_rec: S, t: S) -> Result<S> {
    if !(t >= S::zero() && t <= t_rec) {
        return Err(Error::Domain(format!(
            "time {t} outside the recovery window [0, {t_rec}]"
        )));
    }
    if t_rec <= S::zero() {
        return Err(Error::Domain("recovery time must be positive".into()));
    }
    Ok(c0 * t / t_rec)
}

/// Mean gain over the balancing horizon.
pub fn average_gain<S: Scalar>(
    c0: S,
    t_rec: S,
    horizon: S,
    convention: AveragingConvention,
) -> Result<S> {
    if t_rec <= S::zero() || horizon <= S::zero() || horizon > t_rec {
        return Err(Error::Domain(format!(
            "horizon {horizon} must lie in (0, t_rec = {t_rec}]"
        )));
    }
    let two = S::from_f64_lossy(2.0);
    Ok(match convention {
        AveragingConvention::Continuous => c0 * horizon / (two * t_rec),
        AveragingConvention::DiscreteYears => c0 * (horizon + S::one()) / (two * t_rec),
    })
}

/// Area (hectares) whose average gain balances the footprint.
pub fn required_area<S: Scalar>(footprint_bde: S, average_gain_per_m2: S) -> Result<S> {
    if average_gain_per_m2 <= S::zero() || !average_gain_per_m2.is_finite() {
        return Err(Error::Scenario(
            "average gain must be positive to size an offset area".into(),
        ));
    }
    let area_m2 = footprint_bde / average_gain_per_m2;
    Ok(area_m2 / S::from_f64_lossy(M2_PER_HA))
}

/// Total land cost in currency units.
pub fn offset_cost<S: Scalar>(area_ha: S, land_price_per_ha: S) -> S {
    area_ha * land_price_per_ha
}

/// Spread a total cost evenly over the balancing horizon.
pub fn annualize<S: Scalar>(total_cost: S, horizon: S) -> Result<S> {
    if horizon <= S::zero() {
        return Err(Error::Domain("horizon must be positive".into()));
    }
    Ok(total_cost / horizon)
}

// ---------------------------------------------------------------------------
// Scenarios and quotes
// ---------------------------------------------------------------------------

/// A named offsetting opportunity: where land would be retired, at what
/// starting condition, price, and over which balancing period.
#[derive(Debug, Clone)]
pub struct OffsetScenario<S> {
    pub name: String,
    pub country: String,
    /// Biodiversity impact factor of continued intensive use, BDe per m2.
    pub c0: S,
    /// Full recovery time in years.
    pub t_rec: S,
    /// Balancing horizon in years.
    pub horizon: S,
    /// Land price, currency per hectare.
    pub land_price: S,
    pub averaging: AveragingConvention,
    /// Share of the footprint to offset; 1 = full offsetting.
    pub fraction: S,
    pub notes: Option<String>,
}

impl<S: Scalar> OffsetScenario<S> {
    pub fn validate(&self) -> Result<()> {
        if self.c0 < S::zero() || !self.c0.is_finite() {
            return Err(Error::Scenario(format!(
                "{}: starting condition must be finite and >= 0",
                self.name
            )));
        }
        if !(self.horizon > S::zero() && self.horizon <= self.t_rec) {
            return Err(Error::Scenario(format!(
                "{}: horizon must lie in (0, t_rec]",
                self.name
            )));
        }
        if self.land_price <= S::zero() {
            return Err(Error::Scenario(format!(
                "{}: land price must be positive",
                self.name
            )));
        }
        if self.fraction < S::zero() || self.fraction > S::one() {
            return Err(Error::Scenario(format!(
                "{}: offset fraction must lie in [0, 1]",
                self.name
            )));
        }
        Ok(())
    }

    pub fn average_gain(&self) -> Result<S> {
        average_gain(self.c0, self.t_rec, self.horizon, self.averaging)
    }

    /// Price the offset for a footprint (in BDe).
    pub fn quote(&self, footprint_bde: S) -> Result<OffsetQuote<S>> {
        self.validate()?;
        let gain = self.average_gain()?;
        let offsettable = footprint_bde * self.fraction;
        let area = required_area(offsettable, gain)?;
        let total = offset_cost(area, self.land_price);
        Ok(OffsetQuote {
            required_area_ha: area,
            total_cost: total,
            annual_cost: annualize(total, self.horizon)?,
            average_gain: gain,
            offset_bde: offsettable,
        })
    }
}

/// Priced biodiversity offset.
#[derive(Debug, Clone, Copy)]
pub struct OffsetQuote<S> {
    pub required_area_ha: S,
    pub total_cost: S,
    /// Total cost spread over the horizon.
    pub annual_cost: S,
    /// Mean gain used for the sizing, BDe per m2.
    pub average_gain: S,
    /// Footprint amount the quote balances.
    pub offset_bde: S,
}

/// Priced carbon offset: `cost = tonnes * unit_price * fx`.
#[derive(Debug, Clone, Copy)]
pub struct CarbonOffsetQuote<S> {
    pub tonnes: S,
    /// Price per tonne in the pricing currency.
    pub unit_price: S,
    /// Currency units per pricing-currency unit.
    pub fx_rate: S,
}

impl<S: Scalar> CarbonOffsetQuote<S> {
    pub fn new(tonnes: S, unit_price: S, fx_rate: S) -> Result<Self> {
        if tonnes < S::zero() || unit_price < S::zero() || fx_rate < S::zero() {
            return Err(Error::Scenario(
                "carbon offset inputs must be >= 0".into(),
            ));
        }
        Ok(Self {
            tonnes,
            unit_price,
            fx_rate,
        })
    }

    pub fn cost(&self) -> S {
        self.tonnes * self.unit_price * self.fx_rate
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel_close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * b.abs()
    }

    #[test]
    fn gain_ramp_endpoints_and_interior() {
        assert_eq!(restoration_gain(2.65e-17, 100.0, 0.0).unwrap(), 0.0);
        assert_eq!(restoration_gain(2.65e-17, 100.0, 100.0).unwrap(), 2.65e-17);
        let g = restoration_gain(2.65e-17, 100.0, 30.0).unwrap();
        assert!(rel_close(g, 7.95e-18, 1e-12));
        assert!(restoration_gain(1.0, 100.0, 150.0).is_err());
        assert!(restoration_gain(1.0, 100.0, -1.0).is_err());
    }

    #[test]
    fn gain_is_monotone_and_linear_in_c0() {
        let mut previous = -1.0;
        for t in 0..=100 {
            let g = restoration_gain(3.0, 100.0, t as f64).unwrap();
            assert!(g >= previous);
            previous = g;
        }
        let a = restoration_gain(1.0, 100.0, 40.0).unwrap();
        let b = restoration_gain(2.0, 100.0, 40.0).unwrap();
        assert_eq!(b, 2.0 * a);
    }

    #[test]
    fn average_gain_conventions() {
        let full = average_gain(1.0, 100.0, 100.0, AveragingConvention::Continuous).unwrap();
        assert_eq!(full, 0.5);
        let continuous =
            average_gain(2.65e-17, 100.0, 30.0, AveragingConvention::Continuous).unwrap();
        assert!(rel_close(continuous, 3.975e-18, 1e-12));
        // three significant figures of the continuous value: 3.97e-18
        assert!(rel_close(continuous, 3.97e-18, 2e-3));
        let discrete =
            average_gain(1.0, 100.0, 30.0, AveragingConvention::DiscreteYears).unwrap();
        assert!(rel_close(discrete, 31.0 / 200.0, 1e-15));
        assert!(average_gain(1.0, 100.0, 120.0, AveragingConvention::Continuous).is_err());
    }

    #[test]
    fn required_area_reproduces_reference_values() {
        let fin = required_area(68.79e-9, 3.97e-18).unwrap();
        assert!(rel_close(fin, 1_732_030.0, 5e-3));
        let bra = required_area(68.79e-9, 3.42e-16).unwrap();
        assert!(rel_close(bra, 20_135.0, 2e-3));
        assert_eq!(required_area(0.0, 1e-18).unwrap(), 0.0);
        assert!(required_area(1.0, 0.0).is_err());
        assert!(required_area(1.0, -1.0).is_err());
    }

    #[test]
    fn area_times_gain_recovers_footprint() {
        let footprint = 68.79e-9;
        let gain = 3.975e-18;
        let area_ha = required_area(footprint, gain).unwrap();
        let recovered = area_ha * 10_000.0 * gain;
        assert!(rel_close(recovered, footprint, 1e-12));
    }

    #[test]
    fn costs_and_annualization() {
        let total = offset_cost(1_732_030.0, 7_548.0);
        assert!(rel_close(total, 13_073_362_127.0, 1e-4));
        let annual = annualize(13_073_362_127.0, 30.0).unwrap();
        assert!(rel_close(annual, 435_778_737.6, 1e-9));
        let bra = offset_cost(20_135.0, 901.0);
        assert!(rel_close(bra, 18_141_975.0, 1e-4));
        assert!(annualize(1.0, 0.0).is_err());
    }

    #[test]
    fn quote_arithmetic_is_consistent() {
        let scenario = OffsetScenario {
            name: "finland".to_string(),
            country: "Finland".to_string(),
            c0: 2.65e-17,
            t_rec: 100.0,
            horizon: 30.0,
            land_price: 7_548.0,
            averaging: AveragingConvention::Continuous,
            fraction: 1.0,
            notes: None,
        };
        let quote = scenario.quote(68.79e-9).unwrap();
        assert!(rel_close(quote.annual_cost * 30.0, quote.total_cost, 1e-12));
        assert!(rel_close(
            quote.total_cost,
            quote.required_area_ha * 7_548.0,
            1e-12
        ));
        // linear in area and price: doubling the footprint doubles the cost
        let double = scenario.quote(2.0 * 68.79e-9).unwrap();
        assert!(rel_close(double.total_cost, 2.0 * quote.total_cost, 1e-12));

        let partial = OffsetScenario {
            fraction: 0.5,
            ..scenario.clone()
        };
        let half = partial.quote(68.79e-9).unwrap();
        assert!(rel_close(half.offset_bde, 68.79e-9 / 2.0, 1e-12));
        assert!(rel_close(half.total_cost, quote.total_cost / 2.0, 1e-12));
    }

    #[test]
    fn scenario_validation_catches_bad_inputs() {
        let mut s = OffsetScenario {
            name: "x".to_string(),
            country: "X".to_string(),
            c0: 1e-17,
            t_rec: 100.0,
            horizon: 30.0,
            land_price: 100.0,
            averaging: AveragingConvention::Continuous,
            fraction: 1.0,
            notes: None,
        };
        assert!(s.validate().is_ok());
        s.horizon = 0.0;
        assert!(s.validate().is_err());
        s.horizon = 130.0;
        assert!(s.validate().is_err());
        s.horizon = 30.0;
        s.land_price = 0.0;
        assert!(s.validate().is_err());
        s.land_price = 100.0;
        s.fraction = 1.5;
        assert!(s.validate().is_err());
    }

    #[test]
    fn carbon_offset_cost_examples() {
        let quote = CarbonOffsetQuote::new(25_640.0, 96.0, 0.9665).unwrap();
        assert!(rel_close(quote.cost(), 2_379_000.0, 1e-3));
        assert_eq!(CarbonOffsetQuote::new(10.0, 0.0, 1.0).unwrap().cost(), 0.0);
        assert_eq!(CarbonOffsetQuote::new(1.0, 100.0, 1.0).unwrap().cost(), 100.0);
        assert!(CarbonOffsetQuote::new(-1.0, 1.0, 1.0).is_err());
    }
}
