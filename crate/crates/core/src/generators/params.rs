use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// How class feature means are laid out.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum MeanMode {
    /// Class `v` has mean `μ·e_v`.
    #[default]
    Orthogonal,
    /// Two classes with means `±μ·m` for a fixed unit vector `m`.
    Diametric,
}

/// Per-node degree weights for the degree-corrected model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum DegreeWeightSpec {
    /// Discrete power law `P(w) ∝ w^(-exponent)` for integers `w ≥ w_min`.
    PowerLaw { exponent: f64, w_min: f64 },
    Explicit { weights: Vec<f64> },
}

impl Default for DegreeWeightSpec {
    fn default() -> Self {
        DegreeWeightSpec::PowerLaw {
            exponent: 2.5,
            w_min: 1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CsbmParams {
    pub n: usize,
    pub k: usize,
    /// Expected average degree.
    pub d: f64,
    /// Edge information: positive is homophilous, negative heterophilous.
    pub lambda: f64,
    /// Feature information: distance of the class means from the origin.
    pub mu: f64,
    pub m_feat: usize,
    pub sigma: f64,
    pub mean_mode: MeanMode,
    pub degree_correction: Option<DegreeWeightSpec>,
}

impl Default for CsbmParams {
    fn default() -> Self {
        Self {
            n: 1000,
            k: 2,
            d: 10.0,
            lambda: 0.0,
            mu: 0.0,
            m_feat: 10,
            sigma: 0.2,
            mean_mode: MeanMode::Orthogonal,
            degree_correction: None,
        }
    }
}

impl CsbmParams {
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 || self.n == 0 || !self.n.is_multiple_of(self.k) {
            return Err(domain(format!(
                "n = {} must be a positive multiple of k = {}",
                self.n, self.k
            )));
        }
        lambda_to_probs(self.d, self.lambda, self.n)?;
        if !(self.mu.is_finite() && self.mu >= 0.0) {
            return Err(domain(format!("mu must be finite and non-negative, got {}", self.mu)));
        }
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(domain(format!("sigma must be positive, got {}", self.sigma)));
        }
        match self.mean_mode {
            MeanMode::Diametric if self.k != 2 => {
                return Err(domain(format!("diametric means need k = 2, got {}", self.k)))
            }
            MeanMode::Diametric if self.m_feat == 0 => {
                return Err(domain("diametric means need m_feat >= 1"))
            }
            MeanMode::Orthogonal if self.m_feat < self.k => {
                return Err(domain(format!(
                    "orthogonal means need m_feat >= k, got m_feat = {} < k = {}",
                    self.m_feat, self.k
                )))
            }
            _ => {}
        }
        if let Some(spec) = &self.degree_correction {
            spec.validate(self.n)?;
        }
        Ok(())
    }

    pub fn probs(&self) -> Result<(f64, f64)> {
        lambda_to_probs(self.d, self.lambda, self.n)
    }

    /// Unit direction separating the two class means, and the signed
    /// distance of each class mean from the origin along it.
    ///
    /// Diametric means project to `±μ`; orthogonal means `μ·e_0`, `μ·e_1`
    /// project onto `(e_0 − e_1)/√2` at `±μ/√2`.
    pub fn separating_direction(&self) -> Result<(Vec<f64>, f64)> {
        if self.k != 2 {
            return Err(domain(format!("separating direction needs k = 2, got {}", self.k)));
        }
        let mut m = vec![0.0; self.m_feat];
        match self.mean_mode {
            MeanMode::Diametric => {
                m.copy_from_slice(&diametric_direction(self.m_feat));
                Ok((m, self.mu))
            }
            MeanMode::Orthogonal => {
                if self.m_feat < 2 {
                    return Err(domain("orthogonal means need m_feat >= 2"));
                }
                m[0] = std::f64::consts::FRAC_1_SQRT_2;
                m[1] = -std::f64::consts::FRAC_1_SQRT_2;
                Ok((m, self.mu * std::f64::consts::FRAC_1_SQRT_2))
            }
        }
    }
}

/// The fixed unit vector `m` used for diametric means: the first basis vector.
pub fn diametric_direction(m_feat: usize) -> Vec<f64> {
    let mut m = vec![0.0; m_feat];
    if m_feat > 0 {
        m[0] = 1.0;
    }
    m
}

impl DegreeWeightSpec {
    fn validate(&self, n: usize) -> Result<()> {
        match self {
            DegreeWeightSpec::PowerLaw { exponent, w_min } => {
                if !(*exponent > 1.0 && exponent.is_finite()) {
                    return Err(domain(format!("power-law exponent must exceed 1, got {exponent}")));
                }
                if !(*w_min >= 1.0 && w_min.is_finite()) {
                    return Err(domain(format!("power-law w_min must be >= 1, got {w_min}")));
                }
            }
            DegreeWeightSpec::Explicit { weights } => {
                if weights.len() != n {
                    return Err(domain(format!(
                        "explicit weights have length {}, expected {n}",
                        weights.len()
                    )));
                }
                if let Some(w) = weights.iter().find(|w| !(**w > 0.0 && w.is_finite())) {
                    return Err(domain(format!("degree weights must be positive, got {w}")));
                }
            }
        }
        Ok(())
    }
}

/// Intra- and inter-class edge probabilities `(d ± λ√d)/n`.
pub fn lambda_to_probs(d: f64, lambda: f64, n: usize) -> Result<(f64, f64)> {
    if !(d > 0.0 && d.is_finite()) || n == 0 {
        return Err(domain(format!("need d > 0 and n > 0, got d = {d}, n = {n}")));
    }
    if !lambda.is_finite() || lambda.abs() > d.sqrt() {
        return Err(domain(format!("|lambda| = {} exceeds sqrt(d) = {}", lambda.abs(), d.sqrt())));
    }
    let spread = lambda * d.sqrt();
    let p_in = (d + spread) / n as f64;
    let p_out = ((d - spread) / n as f64).max(0.0);
    if p_in > 1.0 || p_out > 1.0 {
        return Err(domain(format!(
            "edge probability exceeds 1 (p_in = {p_in}, p_out = {p_out})"
        )));
    }
    Ok((p_in.max(0.0), p_out))
}
