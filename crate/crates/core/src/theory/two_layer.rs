use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::special::{normal_cdf, poisson_pmf_unchecked, poisson_window, PoissonWindow};
use crate::error::{domain, Error, Result};

/// Sign of the scalar `K` that the two-layer network collapses to.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sign {
    #[default]
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn of(x: f64) -> Self {
        if x < 0.0 {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwoLayerQuery {
    pub mu: f64,
    pub sigma: f64,
    pub d: f64,
    pub lambda: f64,
    pub sign_k: Sign,
    pub tail_mass_bound: f64,
}

impl TwoLayerQuery {
    pub fn new(mu: f64, sigma: f64, d: f64, lambda: f64) -> Self {
        Self {
            mu,
            sigma,
            d,
            lambda,
            sign_k: Sign::Plus,
            tail_mass_bound: 1e-8,
        }
    }

    fn validate(&self) -> Result<()> {
        if !self.mu.is_finite() {
            return Err(domain(format!("mu must be finite, got {}", self.mu)));
        }
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(domain(format!("sigma must be positive, got {}", self.sigma)));
        }
        if !(self.tail_mass_bound > 0.0 && self.tail_mass_bound < 1.0) {
            return Err(domain(format!("tail mass bound must lie in (0, 1), got {}", self.tail_mass_bound)));
        }
        degree_rates(self.d, self.lambda).map(|_| ())
    }
}

/// Largest index reached by each of the four sums.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct TruncationLimits {
    pub n_in: u64,
    pub n_out: u64,
    pub n2_in: u64,
    pub n2_out: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TheoryResult {
    pub accuracy: f64,
    pub truncation_limits: TruncationLimits,
    /// Probability mass of the index configurations left out of the sum.
    pub neglected_mass: f64,
}

/// Expected same- and other-class degrees `(d ± λ√d)/2`.
fn degree_rates(d: f64, lambda: f64) -> Result<(f64, f64)> {
    if !(d > 0.0 && d.is_finite()) {
        return Err(domain(format!("d must be positive, got {d}")));
    }
    if !lambda.is_finite() || lambda.abs() > d.sqrt() {
        return Err(domain(format!("|lambda| = {} exceeds sqrt(d) = {}", lambda.abs(), d.sqrt())));
    }
    let spread = lambda * d.sqrt();
    Ok((((d + spread) / 2.0).max(0.0), ((d - spread) / 2.0).max(0.0)))
}

/// Signal-to-noise ratio of the two-layer output for a node with the given
/// first- and second-shell class counts.
pub fn psi(c: f64, n_in: u64, n_out: u64, n2_in: u64, n2_out: u64) -> f64 {
    let (n_in, n_out, n2_in, n2_out) = (n_in as f64, n_out as f64, n2_in as f64, n2_out as f64);
    let first = n_in + n_out;
    let num = 1.0 + 3.0 * n_in - n_out + n2_in - n2_out;
    let den = ((first + 1.0) * (first + 1.0) + 4.0 * first + n2_in + n2_out).sqrt();
    c * num / den
}

/// Poisson probability of the neighbourhood configuration.
pub fn structure_prob(n_in: u64, n_out: u64, n2_in: u64, n2_out: u64, d: f64, lambda: f64) -> Result<f64> {
    let (d_in, d_out) = degree_rates(d, lambda)?;
    let (r_in, r_out) = second_shell_rates(n_in, n_out, d_in, d_out);
    Ok(poisson_pmf_unchecked(n_in, d_in)
        * poisson_pmf_unchecked(n_out, d_out)
        * poisson_pmf_unchecked(n2_in, r_in)
        * poisson_pmf_unchecked(n2_out, r_out))
}

fn second_shell_rates(n_in: u64, n_out: u64, d_in: f64, d_out: f64) -> (f64, f64) {
    let (a, b) = (n_in as f64, n_out as f64);
    (d_in * a + d_out * b, d_out * a + d_in * b)
}

/// Quadruple Poisson sum `Σ P · Φ(ψ(sgn(K)·μ/σ, …))`.
///
/// The first-shell sums stop where the Poisson upper tail drops below a
/// quarter of the tail bound. The second-shell sums cover a central window
/// whose two tails are each below an eighth of it.
pub fn two_layer_accuracy(q: &TwoLayerQuery) -> Result<TheoryResult> {
    two_layer_accuracy_scaled(q, 1.0)
}

const WINDOW_CAP: u64 = 1_000_000;

/// As [`two_layer_accuracy`], with the distance from each truncation limit
/// to its Poisson rate multiplied by `scale ≥ 1`.
pub fn two_layer_accuracy_scaled(q: &TwoLayerQuery, scale: f64) -> Result<TheoryResult> {
    q.validate()?;
    if !(scale >= 1.0 && scale.is_finite()) {
        return Err(domain(format!("limit scale must be >= 1, got {scale}")));
    }
    let (d_in, d_out) = degree_rates(q.d, q.lambda)?;
    let c = q.sign_k.value() * q.mu / q.sigma;
    let tail = q.tail_mass_bound;

    let outer = |rate: f64, index: &'static str| -> Result<PoissonWindow> {
        let w = poisson_window(rate, tail / 4.0, WINDOW_CAP).ok_or(Error::Truncation { index, cap: WINDOW_CAP })?;
        Ok(widen(PoissonWindow { lo: 0, ..w }, rate, scale, true))
    };
    let w_in = outer(d_in, "n_in")?;
    let w_out = outer(d_out, "n_out")?;

    let rows: Vec<Result<Row>> = (0..=w_in.hi)
        .into_par_iter()
        .map(|n_in| {
            let p_in = poisson_pmf_unchecked(n_in, d_in);
            let mut row = Row::default();
            for n_out in 0..=w_out.hi {
                let p_first = p_in * poisson_pmf_unchecked(n_out, d_out);
                let (r_in, r_out) = second_shell_rates(n_in, n_out, d_in, d_out);
                let inner = |rate: f64, index: &'static str| -> Result<PoissonWindow> {
                    let w = poisson_window(rate, tail / 8.0, WINDOW_CAP)
                        .ok_or(Error::Truncation { index, cap: WINDOW_CAP })?;
                    Ok(widen(w, rate, scale, false))
                };
                let w2_in = inner(r_in, "n2_in")?;
                let w2_out = inner(r_out, "n2_out")?;
                let pmf_out: Vec<f64> = (w2_out.lo..=w2_out.hi).map(|k| poisson_pmf_unchecked(k, r_out)).collect();
                let mut acc = 0.0;
                for n2_in in w2_in.lo..=w2_in.hi {
                    let p2 = poisson_pmf_unchecked(n2_in, r_in);
                    let mut s = 0.0;
                    for (n2_out, &p3) in (w2_out.lo..=w2_out.hi).zip(&pmf_out) {
                        s += p3 * normal_cdf(psi(c, n_in, n_out, n2_in, n2_out));
                    }
                    acc += p2 * s;
                }
                row.accuracy += p_first * acc;
                row.neglected += p_first * union(w2_in.outside, w2_out.outside);
                row.n2_in = row.n2_in.max(w2_in.hi);
                row.n2_out = row.n2_out.max(w2_out.hi);
            }
            Ok(row)
        })
        .collect();

    // fixed-order reduction keeps the result independent of the thread count
    let mut accuracy = 0.0;
    let mut neglected = union(w_in.outside, w_out.outside);
    let mut limits = TruncationLimits {
        n_in: w_in.hi,
        n_out: w_out.hi,
        ..Default::default()
    };
    for row in rows {
        let row = row?;
        accuracy += row.accuracy;
        neglected += row.neglected;
        limits.n2_in = limits.n2_in.max(row.n2_in);
        limits.n2_out = limits.n2_out.max(row.n2_out);
    }
    Ok(TheoryResult {
        accuracy: accuracy.clamp(0.0, 1.0),
        truncation_limits: limits,
        neglected_mass: neglected,
    })
}

#[derive(Default)]
struct Row {
    accuracy: f64,
    neglected: f64,
    n2_in: u64,
    n2_out: u64,
}

/// Mass outside the product of two independent windows.
fn union(a: f64, b: f64) -> f64 {
    a + b - a * b
}

/// Stretch the window's distance from the rate by `scale` on each side.
fn widen(w: PoissonWindow, rate: f64, scale: f64, from_zero: bool) -> PoissonWindow {
    if scale == 1.0 {
        return w;
    }
    let lo = if from_zero {
        0
    } else {
        (rate - scale * (rate - w.lo as f64)).floor().max(0.0) as u64
    };
    let hi = (rate + scale * (w.hi as f64 - rate)).ceil() as u64;
    let below: f64 = (0..lo).map(|k| poisson_pmf_unchecked(k, rate)).sum();
    let mut above = 0.0;
    let mut k = hi + 1;
    loop {
        let t = poisson_pmf_unchecked(k, rate);
        above += t;
        if t == 0.0 || (k as f64 > rate && t < 1e-30 * above) {
            break;
        }
        k += 1;
    }
    PoissonWindow { lo, hi, outside: below + above }
}
