//! Error function and the phase terms shared by every closed form.

/// `erf(x)`, accurate to a few ulp over the whole real line.
#[inline]
pub fn erf(x: f64) -> f64 {
    libm::erf(x)
}

/// Squared trig values below this are rounding residue of `φ` at a multiple
/// of `π/2` and are flushed to zero.
const TRIG_FLUSH: f64 = 1e-30;

/// `(1 + cos 2φ, 1 - cos 2φ)`, computed as `(2cos²φ, 2sin²φ)` so that neither
/// side loses precision near its zero.
#[inline]
pub fn phase_terms(phi: f64) -> (f64, f64) {
    let (s, c) = phi.sin_cos();
    let (mut s2, mut c2) = (s * s, c * c);
    if s2 < TRIG_FLUSH {
        s2 = 0.0;
    }
    if c2 < TRIG_FLUSH {
        c2 = 0.0;
    }
    (2.0 * c2, 2.0 * s2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn phase_terms_exact_at_nodes() {
        assert_eq!(phase_terms(0.0), (2.0, 0.0));
        assert_eq!(phase_terms(PI / 2.0), (0.0, 2.0));
        assert_eq!(phase_terms(PI), (2.0, 0.0));
        let (p, m) = phase_terms(PI / 4.0);
        assert!((p - 1.0).abs() < 1e-15 && (m - 1.0).abs() < 1e-15);
    }

    #[test]
    fn phase_terms_sum_to_two() {
        for k in 0..100 {
            let (p, m) = phase_terms(k as f64 * 0.0731);
            assert!((p + m - 2.0).abs() < 1e-15);
        }
    }

    #[test]
    fn erf_reference_points() {
        assert_eq!(erf(0.0), 0.0);
        assert!((erf(1.0) - 0.842_700_792_949_714_9).abs() < 3e-16);
        assert!((erf(-1.5) + 0.966_105_146_475_310_7).abs() < 3e-16);
    }
}
