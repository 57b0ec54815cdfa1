//! Physical constants and pointwise constitutive laws shared by both
//! engines.
//!
//! All quantities are plain `f64` in CGS-style units (cm, s, g/cm^3); units
//! are documented but not enforced. The ambient moisture content is treated
//! as a volumetric fraction even though it is tabulated with concentration
//! units in the source data.

use crate::error::SimError;
use crate::Result;

/// Material and process constants of the imbibition/drying experiment.
///
/// The defaults are the calibrated brick parameters used throughout the
/// batch studies; sweeps perturb copies, never the baseline in place.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalParameters {
    /// Initial porosity of the material (dimensionless).
    pub porosity_init: f64,
    /// Property of the porous matrix scaling the saturation law (cm^2/s).
    pub perm_scale: f64,
    /// Minimum saturation level for hydraulic continuity (dimensionless).
    pub sat_threshold: f64,
    /// Na2SO4 diffusivity (cm^2/s).
    pub ion_diff: f64,
    /// Moisture content of the ambient air, treated as a volumetric fraction.
    pub moisture_ambient: f64,
    /// Sodium-sulfate concentration in the supplied water (g/cm^3).
    pub ion_supply: f64,
    /// Specific volume of the crystals (cm^3/g).
    pub crystal_vol: f64,
    /// Crystallization rate coefficient (1/s).
    pub rate_cryst: f64,
    /// Evaporation exchange coefficient at the top boundary (cm/s).
    pub exchange_top: f64,
    /// Saturated sodium-sulfate concentration in water (g/cm^3).
    pub ion_sat: f64,
    /// Growth rate of hydrated crystals (1/s).
    pub rate_hydrate: f64,
}

impl Default for PhysicalParameters {
    fn default() -> Self {
        Self {
            porosity_init: 2.8510e-1,
            perm_scale: 9.8073e-4,
            sat_threshold: 2.1904e-1,
            ion_diff: 1.2300e-5,
            moisture_ambient: 6.2540e-2,
            ion_supply: 9.9500e-2,
            crystal_vol: 6.0000e-1,
            rate_cryst: 4.1000e-5,
            exchange_top: 1.5e-2,
            ion_sat: 0.4399,
            rate_hydrate: 1.0000e-4,
        }
    }
}

impl PhysicalParameters {
    /// Checks positivity and the open-interval constraints on the porosity
    /// and the saturation threshold.
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("porosity_init", self.porosity_init),
            ("perm_scale", self.perm_scale),
            ("sat_threshold", self.sat_threshold),
            ("ion_diff", self.ion_diff),
            ("moisture_ambient", self.moisture_ambient),
            ("ion_supply", self.ion_supply),
            ("crystal_vol", self.crystal_vol),
            ("rate_cryst", self.rate_cryst),
            ("exchange_top", self.exchange_top),
            ("ion_sat", self.ion_sat),
            ("rate_hydrate", self.rate_hydrate),
        ];
        for (name, v) in fields {
            if !v.is_finite() || v <= 0.0 {
                return Err(SimError::Config(format!(
                    "parameter {name} must be finite and strictly positive, got {v}"
                )));
            }
        }
        if self.sat_threshold >= 1.0 {
            return Err(SimError::Config(format!(
                "sat_threshold must lie in (0,1), got {}",
                self.sat_threshold
            )));
        }
        if self.porosity_init >= 1.0 {
            return Err(SimError::Config(format!(
                "porosity_init must lie in (0,1), got {}",
                self.porosity_init
            )));
        }
        Ok(())
    }

    /// The saturation law induced by these parameters.
    pub fn saturation_law(&self) -> SaturationLaw {
        SaturationLaw {
            threshold: self.sat_threshold,
            scale: self.perm_scale,
        }
    }
}

/// Piecewise-cubic law governing the fluid saturation of the matrix.
///
/// Flat (zero) below the hydraulic-continuity threshold, a cubic ramp on
/// `[threshold, 1]`, constant above full saturation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaturationLaw {
    /// Saturation threshold `a`, in (0,1).
    pub threshold: f64,
    /// Scale constant `c` (cm^2/s).
    pub scale: f64,
}

impl SaturationLaw {
    /// Evaluates the law at saturation ratio `s = theta/n`.
    ///
    /// Continuous at both branch points.
    pub fn value(&self, s: f64) -> Result<f64> {
        if !s.is_finite() {
            return Err(SimError::NonFinite {
                what: "saturation ratio",
            });
        }
        let a = self.threshold;
        let c = self.scale;
        Ok(if s < a {
            0.0
        } else if s <= 1.0 {
            let u = (1.0 - s) / (1.0 - a);
            (2.0 / 3.0) * c * (u * u * (3.0 * a - 1.0 - 2.0 * s) + (1.0 - a))
        } else {
            (2.0 / 3.0) * c * (1.0 - a)
        })
    }

    /// Derivative of [`SaturationLaw::value`]; nonnegative everywhere, zero
    /// outside `[threshold, 1]`, maximal (equal to `scale`) at the midpoint
    /// of the ramp.
    pub fn derivative(&self, s: f64) -> Result<f64> {
        if !s.is_finite() {
            return Err(SimError::NonFinite {
                what: "saturation ratio",
            });
        }
        let a = self.threshold;
        let c = self.scale;
        Ok(if s < a || s > 1.0 {
            0.0
        } else {
            4.0 * c * (1.0 - s) * (s - a) / ((1.0 - a) * (1.0 - a))
        })
    }
}

/// Scalar transport mobility `(n/n0^2) * B'(theta/n)` multiplying the
/// moisture gradient.
pub fn mobility(theta: f64, n: f64, p: &PhysicalParameters) -> Result<f64> {
    if n <= 0.0 {
        return Err(SimError::DegeneratePorosity { porosity: n });
    }
    let n0 = p.porosity_init;
    Ok(n / (n0 * n0) * p.saturation_law().derivative(theta / n)?)
}

/// Drift vector `(1/n0^2) * B'(theta/n) * grad_n` induced by the porosity
/// gradient. `grad_n` is zero-padded to three components.
pub fn drift_coefficient(
    theta: f64,
    n: f64,
    grad_n: [f64; 3],
    p: &PhysicalParameters,
) -> Result<[f64; 3]> {
    if n <= 0.0 {
        return Err(SimError::DegeneratePorosity { porosity: n });
    }
    let n0 = p.porosity_init;
    let s = p.saturation_law().derivative(theta / n)? / (n0 * n0);
    Ok([s * grad_n[0], s * grad_n[1], s * grad_n[2]])
}

/// Crystallization kinetics: `Ks*ci*(n - theta)^2 + Kbar*(ci - c_sat)+ * theta`.
///
/// The positive part is the exact `max(., 0)`, no smoothing.
pub fn crystallization_rate(ci: f64, theta: f64, n: f64, p: &PhysicalParameters) -> Result<f64> {
    for (what, v) in [("ci", ci), ("theta", theta), ("n", n)] {
        if !v.is_finite() {
            return Err(SimError::NonFinite { what });
        }
    }
    let gap = n - theta;
    let excess = (ci - p.ion_sat).max(0.0);
    Ok(p.rate_cryst * ci * gap * gap + p.rate_hydrate * excess * theta)
}

/// Porosity as an affine function of the crystal content,
/// `n = n0 - gamma*cs`. Fails when the pores clog (result <= 0).
pub fn porosity_from_cs(cs: f64, p: &PhysicalParameters) -> Result<f64> {
    if !cs.is_finite() {
        return Err(SimError::NonFinite { what: "cs" });
    }
    let n = p.porosity_init - p.crystal_vol * cs;
    if n <= 0.0 {
        return Err(SimError::PoreClogged {
            porosity: n,
            node: None,
        });
    }
    Ok(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn table() -> PhysicalParameters {
        PhysicalParameters::default()
    }

    #[test]
    fn defaults_are_valid() {
        table().validate().unwrap();
    }

    #[test]
    fn law_below_threshold_is_zero() {
        let law = table().saturation_law();
        assert_eq!(law.value(0.1).unwrap(), 0.0);
        assert_eq!(law.value(-2.0).unwrap(), 0.0);
    }

    #[test]
    fn law_continuous_at_threshold() {
        let law = table().saturation_law();
        // The ramp evaluates to exactly zero at s = a.
        let at_a = law.value(law.threshold).unwrap();
        assert!(at_a.abs() <= 1e-12, "B(a) = {at_a}");
    }

    #[test]
    fn law_continuous_and_frozen_at_saturation() {
        let law = table().saturation_law();
        let ramp = law.value(1.0).unwrap();
        let plateau = law.value(1.5).unwrap();
        assert!((ramp - plateau).abs() <= 1e-12);
        // Direct evaluation of (2/3)*c*(1-a) with the calibrated constants.
        assert_relative_eq!(ramp, 5.106072672e-4, max_relative = 1e-12);
    }

    #[test]
    fn derivative_vanishes_at_branch_points() {
        let law = table().saturation_law();
        assert_eq!(law.derivative(law.threshold).unwrap(), 0.0);
        assert_eq!(law.derivative(1.0).unwrap(), 0.0);
        assert_eq!(law.derivative(1.5).unwrap(), 0.0);
        assert_eq!(law.derivative(0.0).unwrap(), 0.0);
    }

    #[test]
    fn derivative_peaks_at_ramp_midpoint() {
        let law = table().saturation_law();
        let mid = (1.0 + law.threshold) / 2.0;
        assert_relative_eq!(law.derivative(mid).unwrap(), law.scale, max_relative = 1e-12);
    }

    #[test]
    fn non_finite_inputs_rejected() {
        let law = table().saturation_law();
        assert!(law.value(f64::NAN).is_err());
        assert!(law.derivative(f64::INFINITY).is_err());
    }

    #[test]
    fn mobility_zero_when_dry_or_saturated() {
        let p = table();
        let n0 = p.porosity_init;
        assert_eq!(mobility(0.0, n0, &p).unwrap(), 0.0);
        assert_eq!(mobility(n0, n0, &p).unwrap(), 0.0);
    }

    #[test]
    fn mobility_peak_value() {
        let p = table();
        let n0 = p.porosity_init;
        let theta = (1.0 + p.sat_threshold) / 2.0 * n0;
        assert_relative_eq!(
            mobility(theta, n0, &p).unwrap(),
            p.perm_scale / n0,
            max_relative = 1e-12
        );
        assert!(mobility(0.1, 0.0, &p).is_err());
    }

    #[test]
    fn drift_vector_cases() {
        let p = table();
        let n0 = p.porosity_init;
        assert_eq!(
            drift_coefficient(0.15, n0, [0.0; 3], &p).unwrap(),
            [0.0; 3]
        );
        // Below the threshold the derivative vanishes.
        let dry = drift_coefficient(0.1 * n0, n0, [3.0, -1.0, 0.5], &p).unwrap();
        assert_eq!(dry, [0.0; 3]);
        let theta = (1.0 + p.sat_threshold) / 2.0 * n0;
        let v = drift_coefficient(theta, n0, [0.0, 1.0, 0.0], &p).unwrap();
        assert_eq!(v[0], 0.0);
        assert_relative_eq!(v[1], p.perm_scale / (n0 * n0), max_relative = 1e-12);
    }

    #[test]
    fn crystallization_rate_cases() {
        let p = table();
        assert_eq!(crystallization_rate(0.0, 0.1, 0.2851, &p).unwrap(), 0.0);
        // At ci = c_sat the hydrated-growth term sits exactly at the kink.
        let at_kink = crystallization_rate(p.ion_sat, 0.1, 0.2851, &p).unwrap();
        let expected = p.rate_cryst * p.ion_sat * (0.2851f64 - 0.1).powi(2);
        assert_relative_eq!(at_kink, expected, max_relative = 1e-14);
        // A frozen arithmetic check with the calibrated constants.
        let r = crystallization_rate(0.0995, 0.1, 0.2851, &p).unwrap();
        assert_relative_eq!(r, 1.39771869795e-7, max_relative = 1e-12);
    }

    #[test]
    fn porosity_affine_and_clogging() {
        let p = table();
        assert_eq!(porosity_from_cs(0.0, &p).unwrap(), 0.2851);
        assert_relative_eq!(porosity_from_cs(0.1, &p).unwrap(), 0.2251, max_relative = 1e-14);
        let clog = porosity_from_cs(p.porosity_init / p.crystal_vol, &p);
        assert!(matches!(clog, Err(SimError::PoreClogged { .. })));
    }

    #[test]
    fn porosity_is_affine_exactly_on_dyadic_inputs() {
        // All products below are exact in binary arithmetic, so the affine
        // identity f(ax+by) = a f(x) + b f(y) - (a+b-1) n0 holds bitwise.
        let p = PhysicalParameters {
            porosity_init: 0.5,
            crystal_vol: 0.5,
            ..PhysicalParameters::default()
        };
        let (alpha, beta, x, y) = (0.5, 0.25, 0.125, 0.25);
        let lhs = porosity_from_cs(alpha * x + beta * y, &p).unwrap();
        let rhs = alpha * porosity_from_cs(x, &p).unwrap()
            + beta * porosity_from_cs(y, &p).unwrap()
            - (alpha + beta - 1.0) * p.porosity_init;
        assert_eq!(lhs.to_bits(), rhs.to_bits());
    }

    #[test]
    fn derivative_matches_central_difference() {
        let law = table().saturation_law();
        let a = law.threshold;
        let eps = 1e-6;
        for k in 1..20 {
            let s = a + (1.0 - a) * k as f64 / 20.0;
            let fd = (law.value(s + eps).unwrap() - law.value(s - eps).unwrap()) / (2.0 * eps);
            assert!(
                (fd - law.derivative(s).unwrap()).abs() <= 1e-12,
                "mismatch at s={s}"
            );
        }
    }

    proptest! {
        #[test]
        fn ramp_is_nondecreasing(s1 in 0.21904f64..1.0, s2 in 0.21904f64..1.0) {
            let law = table().saturation_law();
            let (lo, hi) = if s1 <= s2 { (s1, s2) } else { (s2, s1) };
            prop_assert!(law.value(lo).unwrap() <= law.value(hi).unwrap() + 1e-18);
        }

        #[test]
        fn derivative_is_nonnegative(s in -1.0f64..2.0) {
            let law = table().saturation_law();
            prop_assert!(law.derivative(s).unwrap() >= 0.0);
        }

        #[test]
        fn rate_nonnegative_for_physical_states(
            ci in 0.0f64..0.5,
            theta in 0.0f64..0.3,
            n in 0.0f64..0.3,
        ) {
            prop_assert!(crystallization_rate(ci, theta, n, &table()).unwrap() >= 0.0);
        }
    }
}
