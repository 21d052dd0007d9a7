use crate::error::{Error, Result};

/// Best fidelity of a classical intercept-resend memory.
pub const INTERCEPT_RESEND_BOUND: f64 = 0.71;
/// Best classical fidelity exploiting the non-unitary efficiency, ⟨n⟩ = 1 and η = 5 %.
pub const NONUNITARY_BOUND: f64 = 0.836;

/// Fidelity of a signal with intrinsic fidelity `f0` mixed with unpolarised
/// background at signal-to-background ratio `sbr`: (sbr·F₀ + ½)/(sbr + 1).
pub fn sbr_to_fidelity(sbr: f64, f0: f64) -> Result<f64> {
    if !(sbr >= 0.0) || sbr.is_nan() {
        return Err(Error::param("sbr", format!("must be >= 0, got {sbr}")));
    }
    if !(0.5..=1.0).contains(&f0) {
        return Err(Error::param("intrinsic_fidelity", format!("must lie in [0.5, 1], got {f0}")));
    }
    if sbr.is_infinite() {
        return Ok(f0);
    }
    Ok((sbr * f0 + 0.5) / (sbr + 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassicalThresholds {
    pub intercept_resend: f64,
    pub nonunitary: f64,
}

/// Classical-memory fidelity bounds. Only the tabulated point ⟨n⟩ = 1, η = 0.05 is known.
pub fn classical_thresholds(mean_photons: f64, efficiency: f64) -> Result<ClassicalThresholds> {
    const TOL: f64 = 1e-12;
    if (mean_photons - 1.0).abs() <= TOL && (efficiency - 0.05).abs() <= TOL {
        Ok(ClassicalThresholds { intercept_resend: INTERCEPT_RESEND_BOUND, nonunitary: NONUNITARY_BOUND })
    } else {
        Err(Error::Unsupported(format!(
            "classical fidelity bounds are tabulated only for <n> = 1 and efficiency = 0.05 \
             (got <n> = {mean_photons}, efficiency = {efficiency}); other operating points need \
             the bound evaluated for their photon statistics"
        )))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FidelityReport {
    pub fidelity: f64,
    pub qber: f64,
    pub vs_intercept_resend: f64,
    pub vs_nonunitary_bound: f64,
}

impl FidelityReport {
    pub fn new(fidelity: f64, thresholds: &ClassicalThresholds) -> Result<Self> {
        if !(0.0..=1.0).contains(&fidelity) {
            return Err(Error::param("fidelity", format!("must lie in [0, 1], got {fidelity}")));
        }
        Ok(Self {
            fidelity,
            qber: 1.0 - fidelity,
            vs_intercept_resend: fidelity - thresholds.intercept_resend,
            vs_nonunitary_bound: fidelity - thresholds.nonunitary,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn reported_pairs() {
        let f = sbr_to_fidelity(2.9, 1.0).unwrap();
        assert!((f - 3.4 / 3.9).abs() < 1e-15);
        assert!((f - 0.866).abs() <= 0.01);
        assert!((sbr_to_fidelity(3.7, 1.0).unwrap() - 0.90).abs() <= 0.01);
        assert!((sbr_to_fidelity(25.0, 1.0).unwrap() - 0.98).abs() <= 0.005);
        assert_eq!(sbr_to_fidelity(0.0, 1.0).unwrap(), 0.5);
        assert!(sbr_to_fidelity(-1.0, 1.0).is_err());
        assert!(sbr_to_fidelity(1.0, 0.4).is_err());
    }

    #[test]
    fn thresholds_and_margins() {
        let t = classical_thresholds(1.0, 0.05).unwrap();
        assert_eq!((t.intercept_resend, t.nonunitary), (0.71, 0.836));
        let r = FidelityReport::new(0.866, &t).unwrap();
        assert!((r.vs_intercept_resend - 0.156).abs() < 1e-12);
        assert!((r.vs_nonunitary_bound - 0.030).abs() < 1e-12);
        assert!(matches!(classical_thresholds(2.0, 0.1), Err(Error::Unsupported(_))));
    }

    proptest! {
        #[test]
        fn monotone_in_sbr(a in 0.0f64..1e3, b in 0.0f64..1e3, f0 in 0.5f64..=1.0) {
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            let (flo, fhi) = (sbr_to_fidelity(lo, f0).unwrap(), sbr_to_fidelity(hi, f0).unwrap());
            prop_assert!(flo <= fhi + 1e-15);
            prop_assert!((0.5..=f0 + 1e-15).contains(&fhi));
        }

        #[test]
        fn qber_complements_fidelity(f in 0.0f64..=1.0) {
            let t = classical_thresholds(1.0, 0.05).unwrap();
            let r = FidelityReport::new(f, &t).unwrap();
            prop_assert_eq!(r.qber + r.fidelity, 1.0);
        }
    }
}
