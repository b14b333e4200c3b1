//! Least-squares bearing estimation from range rates.
//!
//! Radial speed obeys `u_r = A cos(theta - psi)` for a vehicle cruising at
//! speed `A` with heading `psi` when the beacon bearing `theta` is roughly
//! constant over the sample window. Expanding the cosine turns this into the
//! linear model `u_r = K1 cos(psi) + K2 sin(psi)`, solved by ordinary least
//! squares; the bearing is `atan2(K2, K1)` (two-argument form, so the
//! quadrant is resolved) and the fitted speed is `sqrt(K1^2 + K2^2)`.
//!
//! A window whose headings barely vary gives a rank-deficient design matrix
//! and no usable bearing. The conditioning value below is the smallest
//! singular value of the design matrix scaled by 1/sqrt(n), which for a
//! near-constant heading set reduces to the RMS heading spread in radians.

/// Minimum conditioning for a usable fit, radians of heading spread.
pub const CONDITIONING_THRESHOLD: f64 = 1e-3;

/// Result of one bearing regression.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaEstimate {
    /// Bearing of the beacon-to-vehicle axis, radians in (-pi, pi].
    pub theta: f64,
    /// Fitted cruise speed, m/s; nonnegative.
    pub amplitude: f64,
    /// Smallest-singular-value proxy of the regression (see module docs).
    pub conditioning: f64,
    pub valid: bool,
}

impl ThetaEstimate {
    fn invalid(conditioning: f64) -> Self {
        Self {
            theta: 0.0,
            amplitude: 0.0,
            conditioning,
            valid: false,
        }
    }
}

/// Fit `(u_r, psi)` pairs to the linear model above. Needs at least two
/// samples with distinct headings; anything less is flagged invalid.
pub fn estimate_theta<I>(samples: I) -> ThetaEstimate
where
    I: IntoIterator<Item = (f64, f64)>,
{
    let (mut n, mut scc, mut scs, mut sss, mut scu, mut ssu) = (0u32, 0.0, 0.0, 0.0, 0.0, 0.0);
    for (u_r, psi) in samples {
        let (s, c) = psi.sin_cos();
        n += 1;
        scc += c * c;
        scs += c * s;
        sss += s * s;
        scu += c * u_r;
        ssu += s * u_r;
    }
    if n < 2 {
        return ThetaEstimate::invalid(0.0);
    }
    // Smallest eigenvalue of the 2x2 normal matrix [[scc, scs], [scs, sss]].
    let half_tr = (scc + sss) / 2.0;
    let disc = (((scc - sss) / 2.0).powi(2) + scs * scs).sqrt();
    let lambda_min = (half_tr - disc).max(0.0);
    let conditioning = (lambda_min / n as f64).sqrt();
    if conditioning <= CONDITIONING_THRESHOLD {
        return ThetaEstimate::invalid(conditioning);
    }
    let det = scc * sss - scs * scs;
    let k1 = (sss * scu - scs * ssu) / det;
    let k2 = (scc * ssu - scs * scu) / det;
    ThetaEstimate {
        theta: crate::angles::wrap_angle(k2.atan2(k1)),
        amplitude: k1.hypot(k2),
        conditioning,
        valid: true,
    }
}
