//! Closed-form outage probabilities.
//!
//! The exact expressions hold for any `(R, rho)`; the series forms are the
//! low-SNR expansions in `alpha = 2R/rho` for unit-mean links and are only
//! meaningful for `alpha << 1`. Series values are never clamped to `[0, 1]`.

use serde::Serialize;

use crate::error::{nonnegative, positive, Error, Result};
use crate::fading::{exponential_cdf, exponential_sf, ChannelStats};

/// Relative mean difference below which the sum of two exponentials is
/// evaluated as an Erlang-2 at the averaged mean.
pub const EQUAL_MEANS_RTOL: f64 = 1e-6;

/// Below this value of `x / min(mean)` the sum CDF is summed as a power series.
const SERIES_CUTOFF: f64 = 0.5;

/// Default half-width accepted around the target remainder order.
pub const SERIES_ORDER_TOLERANCE: f64 = 0.2;

/// Target rate and SNR, with the two derived outage thresholds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinkBudget {
    rate: f64,
    snr: f64,
    alpha: f64,
    epsilon: f64,
}

impl LinkBudget {
    /// `rate` is in nats per channel use, `snr` is `P_s / N_0`.
    pub fn new(rate: f64, snr: f64) -> Result<Self> {
        let rate = positive("rate", rate)?;
        let snr = positive("snr", snr)?;
        Ok(Self {
            rate,
            snr,
            alpha: 2.0 * rate / snr,
            epsilon: (2.0 * rate).exp_m1() / snr,
        })
    }

    /// Picks the SNR at which the exact threshold `(e^{2R} - 1)/rho` equals
    /// `epsilon` for the given rate.
    pub fn for_epsilon(epsilon: f64, rate: f64) -> Result<Self> {
        let epsilon = positive("epsilon", epsilon)?;
        let rate = positive("rate", rate)?;
        let mut budget = Self::new(rate, (2.0 * rate).exp_m1() / epsilon)?;
        budget.epsilon = epsilon;
        Ok(budget)
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn snr(&self) -> f64 {
        self.snr
    }

    /// `2R / rho`.
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// `(e^{2R} - 1) / rho`; the SNR-normalised threshold every exact event uses.
    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }
}

/// CDF of `X1 + X2` with `X1`, `X2` independent exponentials of the given means.
///
/// Distinct means give the hypoexponential law, equal means the Erlang-2 law
/// `1 - e^{-x/m}(1 + x/m)`. Small arguments are summed as a power series that
/// covers both cases without cancellation.
pub fn sum_exp_cdf(x: f64, mean1: f64, mean2: f64) -> Result<f64> {
    let x = nonnegative("x", x)?;
    let m1 = positive("mean1", mean1)?;
    let m2 = positive("mean2", mean2)?;
    if x == 0.0 {
        return Ok(0.0);
    }
    if x.is_infinite() {
        return Ok(1.0);
    }
    let (a, b) = (1.0 / m1, 1.0 / m2);
    if x * a.max(b) <= SERIES_CUTOFF {
        return Ok(sum_exp_cdf_series(x, a, b));
    }
    let p = if (m1 - m2).abs() <= EQUAL_MEANS_RTOL * m1.max(m2) {
        let m = 0.5 * (m1 + m2);
        1.0 - (-x / m).exp() * (1.0 + x / m)
    } else {
        // m1 F1 - m2 F2 over m1 - m2, with Fi the component exponential CDFs
        let f1 = -(-x / m1).exp_m1();
        let f2 = -(-x / m2).exp_m1();
        (m1 * f1 - m2 * f2) / (m1 - m2)
    };
    Ok(p.clamp(0.0, 1.0))
}

/// `ab * sum_{k>=2} (-x)^k / k! * h_{k-2}(a, b)` where `h_n` is the complete
/// homogeneous polynomial `sum_j a^j b^{n-j}`; `a`, `b` are the rates.
fn sum_exp_cdf_series(x: f64, a: f64, b: f64) -> f64 {
    let mut pow_term = x * x / 2.0;
    let mut h = 1.0;
    let mut b_pow = 1.0;
    let mut sum = pow_term;
    for k in 3..64 {
        pow_term *= -x / k as f64;
        b_pow *= b;
        h = a * h + b_pow;
        let t = pow_term * h;
        sum += t;
        if t.abs() <= 1e-18 * sum.abs() {
            break;
        }
    }
    a * b * sum
}

/// Exact SDF outage probability for the budget's threshold.
///
/// `P{g1 < eps/2} P{h < eps} + P{g1 + g2 < eps} P{h >= eps}`.
pub fn sdf_outage_exact(budget: &LinkBudget, stats: &ChannelStats) -> f64 {
    sdf_outage_exact_at(budget.epsilon(), stats)
}

/// [`sdf_outage_exact`] parameterised directly by the threshold `epsilon`.
pub fn sdf_outage_exact_eps(epsilon: f64, stats: &ChannelStats) -> Result<f64> {
    Ok(sdf_outage_exact_at(nonnegative("epsilon", epsilon)?, stats))
}

fn sdf_outage_exact_at(eps: f64, stats: &ChannelStats) -> f64 {
    // Inputs are validated, so the component CDFs cannot fail.
    let direct = exponential_cdf(eps / 2.0, stats.sigma_sd()).unwrap();
    let relay_fails = exponential_cdf(eps, stats.sigma_sr()).unwrap();
    let combined = sum_exp_cdf(eps, stats.sigma_sd(), stats.sigma_rd()).unwrap();
    let relay_decodes = exponential_sf(eps, stats.sigma_sr());
    direct * relay_fails + combined * relay_decodes
}

/// `alpha^2`.
pub fn sdf_outage_leading(alpha: f64) -> f64 {
    alpha * alpha
}

/// `alpha^2 - (29/24) alpha^3`.
pub fn sdf_outage_series(alpha: f64) -> f64 {
    alpha * alpha - 29.0 / 24.0 * alpha.powi(3)
}

/// Bursty amplify-and-forward: `alpha^2 - (2/3) alpha^3 ln(alpha)`.
pub fn baf_outage_series(alpha: f64) -> Result<f64> {
    let alpha = positive("alpha", alpha)?;
    Ok(alpha * alpha - 2.0 / 3.0 * alpha.powi(3) * alpha.ln())
}

/// Adaptive BAF/DF switching: `alpha^2 + 2 alpha^3`.
pub fn as_outage_series(alpha: f64) -> f64 {
    alpha * alpha + 2.0 * alpha.powi(3)
}

/// Max-flow min-cut bound expansion `alpha^2 - alpha^3`.
pub fn cutset_bound_series(alpha: f64) -> f64 {
    alpha * alpha - alpha.powi(3)
}

/// Outcome of [`verify_series_order`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesOrderReport {
    pub alphas: Vec<f64>,
    /// `|exact - series|` at each alpha.
    pub residuals: Vec<f64>,
    /// Least-squares slope of `ln residual` against `ln alpha`; `None` when
    /// some residual is exactly zero.
    pub slope: Option<f64>,
    pub expected_order: u32,
    pub tolerance: f64,
    /// Slope within `tolerance` of `expected_order`, or every residual zero.
    pub order_ok: bool,
}

/// Fits the order of `|exact(alpha) - series(alpha)|` as `alpha -> 0`.
pub fn verify_series_order<E, S>(
    exact: E,
    series: S,
    alphas: &[f64],
    order: u32,
) -> Result<SeriesOrderReport>
where
    E: Fn(f64) -> f64,
    S: Fn(f64) -> f64,
{
    verify_series_order_with_tolerance(exact, series, alphas, order, SERIES_ORDER_TOLERANCE)
}

pub fn verify_series_order_with_tolerance<E, S>(
    exact: E,
    series: S,
    alphas: &[f64],
    order: u32,
    tolerance: f64,
) -> Result<SeriesOrderReport>
where
    E: Fn(f64) -> f64,
    S: Fn(f64) -> f64,
{
    if alphas.len() < 3 {
        return Err(Error::TooFewPoints(alphas.len()));
    }
    for &a in alphas {
        positive("alpha", a)?;
    }
    if alphas.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Domain("alphas must be strictly decreasing".into()));
    }

    let residuals: Vec<f64> = alphas
        .iter()
        .map(|&a| (exact(a) - series(a)).abs())
        .collect();
    let all_zero = residuals.iter().all(|&r| r == 0.0);
    let slope = if residuals.iter().any(|&r| r == 0.0 || !r.is_finite()) {
        None
    } else {
        let xs: Vec<f64> = alphas.iter().map(|a| a.ln()).collect();
        let ys: Vec<f64> = residuals.iter().map(|r| r.ln()).collect();
        Some(least_squares_slope(&xs, &ys))
    };
    let order_ok = all_zero || slope.is_some_and(|s| (s - order as f64).abs() <= tolerance);

    Ok(SeriesOrderReport {
        alphas: alphas.to_vec(),
        residuals,
        slope,
        expected_order: order,
        tolerance,
        order_ok,
    })
}

fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    /// Trapezoidal convolution of the two densities, independent of the
    /// closed forms above.
    fn convolution_cdf(x: f64, m1: f64, m2: f64) -> f64 {
        // P{X1 + X2 < x} = int_0^x f1(t) F2(x - t) dt
        let n = 200_000;
        let h = x / n as f64;
        let f = |t: f64| (-t / m1).exp() / m1 * (1.0 - (-(x - t) / m2).exp());
        let mut s = 0.5 * (f(0.0) + f(x));
        for i in 1..n {
            s += f(i as f64 * h);
        }
        s * h
    }

    fn eq14_literal(eps: f64) -> f64 {
        (1.0 - (-eps / 2.0).exp()) * (1.0 - (-eps).exp())
            + (1.0 - (-eps).exp() * (1.0 + eps)) * (-eps).exp()
    }

    #[test]
    fn budget_derivations() {
        let b = LinkBudget::new(0.01, 0.5).unwrap();
        assert_eq!(b.alpha(), 0.04);
        assert_relative_eq!(b.epsilon(), (0.02f64).exp_m1() / 0.5, max_relative = 1e-16);
        assert!(b.epsilon() > b.alpha());
        assert!(LinkBudget::new(0.0, 1.0).is_err());
        assert!(LinkBudget::new(1.0, -1.0).is_err());

        let e = LinkBudget::for_epsilon(0.1, 1e-3).unwrap();
        assert_eq!(e.epsilon(), 0.1);
        assert_relative_eq!(
            (2.0 * e.rate()).exp_m1() / e.snr(),
            0.1,
            max_relative = 1e-15
        );
    }

    #[test]
    fn sum_cdf_known_values() {
        assert_eq!(sum_exp_cdf(0.0, 3.0, 0.2).unwrap(), 0.0);
        assert_eq!(sum_exp_cdf(f64::INFINITY, 3.0, 0.2).unwrap(), 1.0);
        // 1 - 2/e
        assert_relative_eq!(
            sum_exp_cdf(1.0, 1.0, 1.0).unwrap(),
            0.264_241_117_657_115_35,
            max_relative = 1e-14
        );
        assert_relative_eq!(
            sum_exp_cdf(1.0, 2.0, 1.0).unwrap(),
            0.154_818_121_746_175_47,
            max_relative = 1e-14
        );
        assert!(sum_exp_cdf(-1.0, 1.0, 1.0).is_err());
        assert!(sum_exp_cdf(1.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn sum_cdf_matches_convolution() {
        for &(x, m1, m2) in &[
            (1.0, 2.0, 1.0),
            (0.3, 0.5, 4.0),
            (2.5, 1.0, 1.0),
            (0.05, 1.0, 3.0),
        ] {
            let oracle = convolution_cdf(x, m1, m2);
            let got = sum_exp_cdf(x, m1, m2).unwrap();
            assert_relative_eq!(got, oracle, max_relative = 1e-8);
        }
    }

    #[test]
    fn sum_cdf_near_equal_means_is_erlang() {
        for &x in &[0.01f64, 0.4, 1.0, 3.0, 10.0] {
            for &m in &[0.3f64, 1.0, 2.0] {
                let erlang: f64 = 1.0 - (-x / m).exp() * (1.0 + x / m);
                for &d in &[1.0 + 1e-8, 1.0 - 1e-8] {
                    let m2 = m * d;
                    let mbar = 0.5 * (m + m2);
                    let at_mean: f64 = 1.0 - (-x / mbar).exp() * (1.0 + x / mbar);
                    let got = sum_exp_cdf(x, m, m2).unwrap();
                    assert!((got - at_mean).abs() < 1e-10, "x={x} m={m}");
                    assert!((got - erlang).abs() < 1e-8);
                }
            }
        }
    }

    #[test]
    fn sum_cdf_continuous_across_branch_switch() {
        // just above and below the equal-means switch, and across the series cutoff
        for &x in &[0.7f64, 2.0, 6.0] {
            for &d in &[0.9e-6, 1.1e-6, 5e-6] {
                let m2 = 1.0 + d;
                let mbar = 0.5 * (1.0 + m2);
                let erlang = 1.0 - (-x / mbar).exp() * (1.0 + x / mbar);
                let got = sum_exp_cdf(x, 1.0, m2).unwrap();
                assert!((got - erlang).abs() < 1e-9, "x={x} d={d}");
            }
        }
        // cutoff sits at x = 0.5 * min(mean)
        let below = sum_exp_cdf(0.35 - 1e-12, 1.0, 0.7).unwrap();
        let above = sum_exp_cdf(0.35 + 1e-12, 1.0, 0.7).unwrap();
        assert!((below - above).abs() < 1e-11);
    }

    #[test]
    fn exact_outage_known_value() {
        let stats = ChannelStats::unit();
        assert_eq!(sdf_outage_exact_eps(0.0, &stats).unwrap(), 0.0);
        // (1-e^{-0.05})(1-e^{-0.1}) + (1 - 1.1 e^{-0.1}) e^{-0.1}, 40-digit evaluation
        assert_relative_eq!(
            sdf_outage_exact_eps(0.1, &stats).unwrap(),
            8.874_723_538_563_754e-3,
            max_relative = 1e-13
        );
        let b = LinkBudget::for_epsilon(0.1, 0.02).unwrap();
        assert_relative_eq!(
            sdf_outage_exact(&b, &stats),
            8.874_723_538_563_754e-3,
            max_relative = 1e-13
        );
    }

    #[test]
    fn exact_matches_literal_closed_form() {
        let stats = ChannelStats::unit();
        for &eps in &[0.5, 0.8, 1.0, 2.0, 3.5, 5.0] {
            let a = sdf_outage_exact_eps(eps, &stats).unwrap();
            let b = eq14_literal(eps);
            assert!(((a - b) / b).abs() <= 1e-15, "eps={eps}: {a} vs {b}");
        }
    }

    #[test]
    fn series_values() {
        assert_eq!(sdf_outage_series(0.0), 0.0);
        assert_relative_eq!(
            sdf_outage_series(0.1),
            0.008_791_666_666_666_667,
            max_relative = 1e-14
        );
        assert_eq!(sdf_outage_leading(0.1), 0.1 * 0.1);
        assert_relative_eq!(sdf_outage_leading(0.01), 1e-4, max_relative = 1e-15);
        assert_relative_eq!(
            baf_outage_series(0.1).unwrap(),
            0.011_535_056_728_662_697,
            max_relative = 1e-12
        );
        assert!(baf_outage_series(0.0).is_err());
        assert!(baf_outage_series(1e-12).unwrap() < 1e-23);
        assert_relative_eq!(as_outage_series(0.1), 0.012, max_relative = 1e-14);
        assert_relative_eq!(as_outage_series(0.05), 0.00275, max_relative = 1e-14);
        assert_eq!(as_outage_series(0.0), 0.0);
        assert_relative_eq!(cutset_bound_series(0.1), 0.009, max_relative = 1e-14);
        assert_eq!(cutset_bound_series(0.0), 0.0);
    }

    #[test]
    fn series_residual_at_tenth() {
        let exact = sdf_outage_exact_eps(0.1, &ChannelStats::unit()).unwrap();
        let r = exact - sdf_outage_series(0.1);
        assert!((r - 8.3e-5).abs() < 0.05e-5, "residual {r}");
    }

    #[test]
    fn series_order_of_exact_expansion() {
        let exact = |a: f64| sdf_outage_exact_eps(a, &ChannelStats::unit()).unwrap();
        let alphas = [1e-1, 1e-2, 1e-3];
        let rep = verify_series_order(exact, sdf_outage_series, &alphas, 4).unwrap();
        let s = rep.slope.unwrap();
        assert!((3.8..=4.2).contains(&s), "slope {s}");
        assert!(rep.order_ok);

        let rep = verify_series_order(exact, sdf_outage_leading, &alphas, 3).unwrap();
        let s = rep.slope.unwrap();
        assert!((2.8..=3.2).contains(&s), "slope {s}");
        assert!(rep.order_ok);

        let rep = verify_series_order(exact, sdf_outage_leading, &alphas, 4).unwrap();
        assert!(!rep.order_ok);
    }

    #[test]
    fn series_order_identical_functions() {
        let rep =
            verify_series_order(as_outage_series, as_outage_series, &[0.3, 0.1, 0.01], 7).unwrap();
        assert!(rep.residuals.iter().all(|&r| r == 0.0));
        assert_eq!(rep.slope, None);
        assert!(rep.order_ok);
    }

    #[test]
    fn series_order_input_checks() {
        let f = |a: f64| a;
        assert_eq!(
            verify_series_order(f, f, &[0.1, 0.01], 2),
            Err(Error::TooFewPoints(2))
        );
        assert!(verify_series_order(f, f, &[0.1, 0.0, -1.0], 2).is_err());
        assert!(verify_series_order(f, f, &[0.01, 0.1, 0.001], 2).is_err());
    }

    #[test]
    fn comparison_ordering_on_grid() {
        for i in 1..=2000 {
            let a = 0.2 * i as f64 / 2000.0;
            let sdf = sdf_outage_series(a);
            let bound = cutset_bound_series(a);
            assert!(sdf < bound && bound < as_outage_series(a), "alpha={a}");
            assert!(sdf < baf_outage_series(a).unwrap(), "alpha={a}");
        }
        for i in 1..=300 {
            let a = 0.3 * i as f64 / 300.0;
            assert!(baf_outage_series(a).unwrap() > sdf_outage_series(a));
        }
    }

    proptest! {
        #[test]
        fn sum_cdf_is_a_cdf(x in 0.0..50.0f64, dx in 0.0..2.0f64, m1 in 0.05..10.0f64, m2 in 0.05..10.0f64) {
            let p = sum_exp_cdf(x, m1, m2).unwrap();
            let q = sum_exp_cdf(x + dx, m1, m2).unwrap();
            prop_assert!((0.0..=1.0).contains(&p));
            prop_assert!(q >= p - 1e-15);
        }

        #[test]
        fn sum_cdf_symmetric_in_means(x in 0.0..20.0f64, m1 in 0.05..10.0f64, m2 in 0.05..10.0f64) {
            let p = sum_exp_cdf(x, m1, m2).unwrap();
            let q = sum_exp_cdf(x, m2, m1).unwrap();
            prop_assert!((p - q).abs() <= 1e-14);
        }

        #[test]
        fn exact_outage_is_probability_and_monotone_in_rate(
            rate in 1e-4..2.0f64,
            bump in 1.0..1.5f64,
            snr in 1e-3..10.0f64,
            sd in 0.1..5.0f64, rd in 0.1..5.0f64, sr in 0.1..5.0f64,
        ) {
            let stats = ChannelStats::new(sd, rd, sr).unwrap();
            let p = sdf_outage_exact(&LinkBudget::new(rate, snr).unwrap(), &stats);
            let q = sdf_outage_exact(&LinkBudget::new(rate * bump, snr).unwrap(), &stats);
            prop_assert!((0.0..=1.0).contains(&p));
            prop_assert!(q >= p - 1e-15);
        }
    }
}
