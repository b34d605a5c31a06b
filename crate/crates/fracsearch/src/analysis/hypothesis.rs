//! Fractal dimensions and the oracle-call scaling hypothesis
//! c = d_s/(d_E - 1) + d_f - s for the effective call count Q/sqrt(P) ~ N^c.

use crate::notation::format_last_digit;
use serde::Serialize;

/// The three characteristic dimensions of a self-similar lattice, plus the
/// construction parameters (M self-similar pieces at scale factor s).
#[derive(Debug, Clone, Serialize)]
pub struct DimensionSet {
    pub euclidean: u32,
    pub fractal: f64,
    pub spectral: f64,
    pub spectral_err: f64,
    pub scale_factor: u32,
    pub piece_count: u64,
}

impl DimensionSet {
    pub fn new(euclidean: u32, piece_count: u64, scale_factor: u32, spectral: f64, spectral_err: f64) -> Self {
        DimensionSet {
            euclidean,
            fractal: fractal_dimension(piece_count, scale_factor),
            spectral,
            spectral_err,
            scale_factor,
            piece_count,
        }
    }
}

/// d_f = ln M / ln s for M self-similar pieces at scale factor s.
pub fn fractal_dimension(piece_count: u64, scale_factor: u32) -> f64 {
    assert!(piece_count >= 1, "piece count must be >= 1");
    assert!(scale_factor >= 2, "scale factor must be >= 2");
    (piece_count as f64).ln() / (scale_factor as f64).ln()
}

/// Closed-form spectral dimension of the Sierpinski gasket family,
/// d_s = 2 ln(d_E + 1) / ln(d_E + 3).
pub fn gasket_spectral_dimension(euclidean: u32) -> f64 {
    assert!(euclidean >= 1, "Euclidean dimension must be >= 1");
    let d = euclidean as f64;
    2.0 * (d + 1.0).ln() / (d + 3.0).ln()
}

#[derive(Debug, Clone, Serialize)]
pub struct HypothesisReport {
    /// Measured side c = b + a/2.
    pub lhs: Option<SideValue>,
    /// Predicted side d_s/(d_E - 1) + d_f - s.
    pub rhs: SideValue,
    /// |lhs - rhs| over the combined error, when both sides are available.
    pub discrepancy_sigma: Option<f64>,
    pub dimensions: DimensionSet,
}

#[derive(Debug, Clone, Serialize)]
pub struct SideValue {
    pub value: f64,
    pub err: f64,
    pub notation: String,
}

impl SideValue {
    fn new(value: f64, err: f64) -> Self {
        SideValue {
            value,
            err,
            notation: format_last_digit(value, err),
        }
    }
}

/// Evaluates both sides of the scaling hypothesis. `measured` carries the fit
/// exponents (b, sigma_b, a, sigma_a) when available; the lhs error is
/// sqrt(sigma_b^2 + (sigma_a/2)^2) and the rhs error is sigma_ds/(d_E - 1)
/// (d_E, d_f, s enter exactly).
pub fn check_hypothesis(
    measured: Option<(f64, f64, f64, f64)>,
    dims: &DimensionSet,
) -> HypothesisReport {
    let denom = (dims.euclidean - 1).max(1) as f64;
    let rhs_value = dims.spectral / denom + dims.fractal - dims.scale_factor as f64;
    let rhs_err = dims.spectral_err / denom;
    let rhs = SideValue::new(rhs_value, rhs_err);

    let lhs = measured.map(|(b, b_err, a, a_err)| {
        SideValue::new(b + a / 2.0, (b_err.powi(2) + (a_err / 2.0).powi(2)).sqrt())
    });
    let discrepancy_sigma = lhs.as_ref().map(|l| {
        let combined = (l.err.powi(2) + rhs.err.powi(2)).sqrt();
        if combined > 0.0 {
            (l.value - rhs.value).abs() / combined
        } else {
            f64::INFINITY
        }
    });
    HypothesisReport {
        lhs,
        rhs,
        discrepancy_sigma,
        dimensions: dims.clone(),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct InverseSpectralReport {
    pub inverse_spectral: SideValue,
    pub b: SideValue,
    pub discrepancy_sigma: f64,
}

/// Compares the measured b against 1/d_s with error propagated as
/// sigma/d_s^2.
pub fn inverse_spectral_comparison(
    b: f64,
    b_err: f64,
    spectral: f64,
    spectral_err: f64,
) -> InverseSpectralReport {
    assert!(spectral > 0.0, "spectral dimension must be positive");
    let inv = 1.0 / spectral;
    let inv_err = spectral_err / (spectral * spectral);
    let combined = (b_err.powi(2) + inv_err.powi(2)).sqrt();
    let sigma = if combined > 0.0 {
        (b - inv).abs() / combined
    } else {
        f64::INFINITY
    };
    InverseSpectralReport {
        inverse_spectral: SideValue::new(inv, inv_err),
        b: SideValue::new(b, b_err),
        discrepancy_sigma: sigma,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn carpet_fractal_dimension() {
        let df = fractal_dimension(8, 3);
        assert!((df - 1.892789).abs() < 1e-6);
        // exact for integer dimensions
        assert!((fractal_dimension(9, 3) - 2.0).abs() < 1e-15);
        assert!((fractal_dimension(16, 2) - 4.0).abs() < 1e-15);
        // gasket
        assert!((fractal_dimension(3, 2) - 1.58496).abs() < 1e-5);
    }

    #[test]
    fn gasket_spectral_dimensions() {
        assert!((gasket_spectral_dimension(2) - 2.0 * 3f64.ln() / 5f64.ln()).abs() < 1e-15);
        assert!((gasket_spectral_dimension(2) - 1.36521).abs() < 1e-5);
        assert!((gasket_spectral_dimension(3) - 1.54741).abs() < 1e-4);
        assert!((gasket_spectral_dimension(1) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn carpet_hypothesis_values() {
        let dims = DimensionSet::new(2, 8, 3, 1.742, 0.008);
        let report = check_hypothesis(Some((0.5647, 0.0006, 0.154, 0.002)), &dims);
        let lhs = report.lhs.unwrap();
        assert!((lhs.value - 0.6417).abs() < 1e-12);
        assert!((lhs.err - (0.0006f64.powi(2) + 0.001f64.powi(2)).sqrt()).abs() < 1e-12);
        let expected_rhs = 1.742 + 8f64.ln() / 3f64.ln() - 3.0;
        assert!((report.rhs.value - expected_rhs).abs() < 1e-12);
        assert!((report.rhs.err - 0.008).abs() < 1e-12);
        // equality holds within the standard error
        assert!(report.discrepancy_sigma.unwrap() < 1.0);
    }

    #[test]
    fn gasket_and_tetrahedron_rhs() {
        let gasket = DimensionSet::new(2, 3, 2, gasket_spectral_dimension(2), 0.0);
        let r = check_hypothesis(None, &gasket);
        assert!((r.rhs.value - 0.95017).abs() < 5e-5);
        assert!(r.lhs.is_none());

        let tetra = DimensionSet::new(3, 4, 2, gasket_spectral_dimension(3), 0.0);
        let r = check_hypothesis(None, &tetra);
        assert!((r.rhs.value - 0.77370).abs() < 5e-5);
    }

    #[test]
    fn error_propagation_scales_linearly() {
        let dims = DimensionSet::new(2, 8, 3, 1.742, 0.008);
        let r1 = check_hypothesis(Some((0.5647, 0.0006, 0.154, 0.002)), &dims);
        let dims2 = DimensionSet::new(2, 8, 3, 1.742, 0.016);
        let r2 = check_hypothesis(Some((0.5647, 0.0012, 0.154, 0.004)), &dims2);
        let (l1, l2) = (r1.lhs.unwrap(), r2.lhs.unwrap());
        assert!((l2.err - 2.0 * l1.err).abs() < 1e-12);
        assert!((r2.rhs.err - 2.0 * r1.rhs.err).abs() < 1e-12);
        assert!(
            (r2.discrepancy_sigma.unwrap() - r1.discrepancy_sigma.unwrap() / 2.0).abs() < 1e-9
        );
    }

    #[test]
    fn inverse_spectral_matches_paper_numbers() {
        let r = inverse_spectral_comparison(0.5647, 0.0006, 1.742, 0.008);
        assert!((r.inverse_spectral.value - 0.574).abs() < 5e-4);
        assert!((r.inverse_spectral.err - 0.008 / (1.742 * 1.742)).abs() < 1e-12);
        assert!(r.discrepancy_sigma < 4.0);
        // contrast value 1/d_f
        let inv_df = 1.0 / fractal_dimension(8, 3);
        assert!((inv_df - 0.5283).abs() < 5e-5);
    }

    #[test]
    fn one_dimensional_denominator_clamped() {
        // d_E = 1 would divide by zero; the clamp keeps the report finite
        let dims = DimensionSet::new(1, 2, 2, 1.0, 0.0);
        let r = check_hypothesis(None, &dims);
        assert!(r.rhs.value.is_finite());
    }
}
