use crate::error::{domain, Result};

pub fn erf(x: f64) -> f64 {
    libm::erf(x)
}

pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}

/// Standard normal cdf, via `erfc` so the lower tail keeps full relative
/// precision.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x * std::f64::consts::FRAC_1_SQRT_2)
}

pub fn ln_factorial(k: u64) -> f64 {
    if k < 2 {
        0.0
    } else {
        libm::lgamma(k as f64 + 1.0)
    }
}

/// Poisson pmf `rate^k e^{-rate} / k!`, evaluated in log space.
pub fn poisson_pmf(k: u64, rate: f64) -> Result<f64> {
    if !(rate >= 0.0 && rate.is_finite()) {
        return Err(domain(format!("Poisson rate must be finite and non-negative, got {rate}")));
    }
    Ok(poisson_pmf_unchecked(k, rate))
}

pub(crate) fn poisson_pmf_unchecked(k: u64, rate: f64) -> f64 {
    if rate == 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    (k as f64 * rate.ln() - rate - ln_factorial(k)).exp()
}

/// Binomial pmf over `0..=trials`, as a vector.
pub(crate) fn binomial_pmf_vec(trials: u64, p: f64) -> Vec<f64> {
    if p <= 0.0 {
        let mut v = vec![0.0; trials as usize + 1];
        v[0] = 1.0;
        return v;
    }
    if p >= 1.0 {
        let mut v = vec![0.0; trials as usize + 1];
        v[trials as usize] = 1.0;
        return v;
    }
    let (lp, lq) = (p.ln(), (-p).ln_1p());
    let ln_n = ln_factorial(trials);
    (0..=trials)
        .map(|k| {
            (ln_n - ln_factorial(k) - ln_factorial(trials - k) + k as f64 * lp + (trials - k) as f64 * lq).exp()
        })
        .collect()
}

/// Central window `[lo, hi]` of a Poisson law with each tail below
/// `tail_each`, plus the exact mass outside it. Fails if the window would
/// need more than `cap` points.
pub(crate) fn poisson_window(rate: f64, tail_each: f64, cap: u64) -> Option<PoissonWindow> {
    if rate == 0.0 {
        return Some(PoissonWindow { lo: 0, hi: 0, outside: 0.0 });
    }
    let mode = rate.floor() as u64;
    let mut lo = mode;
    let mut below = lower_cdf_exclusive(mode, rate);
    while below >= tail_each && lo > 0 {
        lo -= 1;
        below -= poisson_pmf_unchecked(lo, rate);
    }
    let mut hi = mode;
    let mut above = upper_tail_exclusive(mode, rate);
    while above >= tail_each {
        hi += 1;
        if hi - lo > cap {
            return None;
        }
        above -= poisson_pmf_unchecked(hi, rate);
    }
    // recompute both tails from their small terms for full precision
    let outside = lower_cdf_exclusive(lo, rate) + upper_tail_exclusive(hi, rate);
    Some(PoissonWindow { lo, hi, outside })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct PoissonWindow {
    pub lo: u64,
    pub hi: u64,
    pub outside: f64,
}

/// `P(X < m)`, summed from the bottom.
fn lower_cdf_exclusive(m: u64, rate: f64) -> f64 {
    // summed smallest-first so that small results keep their precision
    let mut terms: Vec<f64> = (0..m).map(|k| poisson_pmf_unchecked(k, rate)).collect();
    terms.sort_by(f64::total_cmp);
    terms.iter().sum()
}

/// `P(X > m)`, summed from far in the tail back towards `m`.
fn upper_tail_exclusive(m: u64, rate: f64) -> f64 {
    let mut terms = Vec::new();
    let mut k = m + 1;
    let mut term = poisson_pmf_unchecked(k, rate);
    while term > 0.0 && (term > 1e-30 || (k as f64) < rate) {
        terms.push(term);
        k += 1;
        term *= rate / k as f64;
    }
    terms.iter().rev().sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    // 40-digit reference values
    const ERF: [(f64, f64, f64); 8] = [
        (0.1, 0.112_462_916_018_284_9, 0.887_537_083_981_715_2),
        (0.5, 0.520_499_877_813_046_5, 0.479_500_122_186_953_5),
        (1.0, 0.842_700_792_949_714_9, 0.157_299_207_050_285_13),
        (1.5, 0.966_105_146_475_310_8, 0.033_894_853_524_689_274),
        (2.5, 0.999_593_047_982_555, 0.000_406_952_017_444_958_9),
        (3.7, 0.999_999_832_848_942_1, 1.671_510_579_091_462e-7),
        (6.0, 0.999_999_999_999_999_978_48, 2.151_973_671_249_891_3e-17),
        (-0.3, -0.328_626_759_459_127_45, 1.328_626_759_459_127_4),
    ];

    #[test]
    fn erf_matches_reference() {
        for (x, e, c) in ERF {
            assert!((erf(x) - e).abs() <= 1e-15, "erf({x})");
            assert!((erfc(x) - c).abs() <= 1e-13 * c, "erfc({x})");
        }
        assert_eq!(erf(0.0), 0.0);
        assert_eq!(erf(9.0), 1.0);
        assert_eq!(erf(-9.0), -1.0);
    }

    #[test]
    fn normal_cdf_values() {
        assert_eq!(normal_cdf(0.0), 0.5);
        assert!((normal_cdf(2.0) - 0.977_249_868_051_820_8).abs() < 1e-15);
        assert!((normal_cdf(-8.0) / 6.220_960_574_271_784e-16 - 1.0).abs() < 1e-12);
        assert!((normal_cdf(-30.0) / 4.906_713_927_148_187e-198 - 1.0).abs() < 1e-12);
        assert_eq!(normal_cdf(40.0), 1.0);
    }

    #[test]
    fn erf_and_cdf_agree() {
        for i in -800..=800 {
            let x = i as f64 / 100.0;
            let via_erf = 0.5 * (erf(x * std::f64::consts::FRAC_1_SQRT_2) + 1.0);
            assert!((via_erf - normal_cdf(x)).abs() <= 1e-12, "{x}");
            assert_eq!(erf(-x), -erf(x));
        }
    }

    #[test]
    fn poisson_values() {
        assert_eq!(poisson_pmf(0, 3.5).unwrap(), (-3.5f64).exp());
        assert!((poisson_pmf(2, 1.0).unwrap() - 0.183_939_720_585_721_17).abs() < 1e-15);
        assert!((poisson_pmf(40, 10.0).unwrap() / 5.564_294_565_210_527e-13 - 1.0).abs() < 1e-12);
        assert!((poisson_pmf(1000, 900.0).unwrap() / 5.926_953_285_418_9e-5 - 1.0).abs() < 1e-10);
        let total: f64 = (0..=200).map(|k| poisson_pmf(k, 10.0).unwrap()).sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert_eq!(poisson_pmf(0, 0.0).unwrap(), 1.0);
        assert_eq!(poisson_pmf(3, 0.0).unwrap(), 0.0);
        assert!(poisson_pmf(1, -1.0).is_err());
    }

    #[test]
    fn binomial_sums_to_one() {
        let v = binomial_pmf_vec(500, 0.0194);
        assert!((v.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert_eq!(binomial_pmf_vec(3, 0.0), vec![1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn window_tails() {
        for rate in [0.5, 3.0, 8.16, 57.0, 420.0] {
            let w = poisson_window(rate, 1e-9, 100_000).unwrap();
            let below: f64 = (0..w.lo).map(|k| poisson_pmf_unchecked(k, rate)).sum();
            let inside: f64 = (w.lo..=w.hi).map(|k| poisson_pmf_unchecked(k, rate)).sum();
            assert!(below < 1e-9, "{rate}");
            assert!(1.0 - inside - below < 1e-9 + 1e-14, "{rate}");
            assert!((w.outside - (1.0 - inside)).abs() < 1e-13, "{rate}");
        }
        assert_eq!(poisson_window(0.0, 1e-9, 10).unwrap().outside, 0.0);
        assert!(poisson_window(1e6, 1e-9, 10).is_none());
    }
}
