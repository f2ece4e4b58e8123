use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_THRESHOLD: f64 = 0.011;

const GLM_MAX_ITER: usize = 10_000;
const GLM_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassifierMode {
    FixedThreshold,
    Glm,
}

impl std::str::FromStr for ClassifierMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "threshold" | "fixed_threshold" => Ok(ClassifierMode::FixedThreshold),
            "glm" => Ok(ClassifierMode::Glm),
            other => Err(Error::InvalidParameter(format!(
                "unknown classifier {other:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GlmWeights {
    pub bias: f64,
    pub slope: f64,
}

impl GlmWeights {
    pub fn probability(&self, score: f64) -> f64 {
        sigmoid(self.bias + self.slope * score)
    }

    /// Score at which the predicted probability crosses one half.
    pub fn boundary(&self) -> f64 {
        -self.bias / self.slope
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassifierConfig {
    pub mode: ClassifierMode,
    pub threshold: f64,
    pub glm_weights: Option<GlmWeights>,
}

impl Default for ClassifierConfig {
    fn default() -> Self {
        ClassifierConfig {
            mode: ClassifierMode::FixedThreshold,
            threshold: DEFAULT_THRESHOLD,
            glm_weights: None,
        }
    }
}

impl ClassifierConfig {
    pub fn threshold(threshold: f64) -> Self {
        ClassifierConfig {
            threshold,
            ..Default::default()
        }
    }

    pub fn glm(weights: GlmWeights) -> Self {
        ClassifierConfig {
            mode: ClassifierMode::Glm,
            glm_weights: Some(weights),
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.threshold > -1.0 && self.threshold < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "threshold {} outside (-1, 1)",
                self.threshold
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Decision {
    SameSource,
    DifferentSource,
}

pub fn classify(score: f64, cfg: &ClassifierConfig) -> Result<Decision> {
    cfg.validate()?;
    let same = match cfg.mode {
        ClassifierMode::FixedThreshold => score > cfg.threshold,
        ClassifierMode::Glm => {
            cfg.glm_weights
                .ok_or(Error::UntrainedModel)?
                .probability(score)
                > 0.5
        }
    };
    Ok(if same {
        Decision::SameSource
    } else {
        Decision::DifferentSource
    })
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `log(1 + exp(z))` without overflow.
fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

fn log_likelihood(scores: &[f64], labels: &[bool], w: GlmWeights) -> f64 {
    scores
        .iter()
        .zip(labels)
        .map(|(&x, &y)| {
            let z = w.bias + w.slope * x;
            if y {
                -softplus(-z)
            } else {
                -softplus(z)
            }
        })
        .sum()
}

/// Logistic regression of `labels` on `scores` by Newton-Raphson (IRLS),
/// starting from zero weights.
///
/// Separable data drives the weights towards infinity; iteration stops once
/// the log-likelihood stalls or the Hessian becomes numerically singular.
pub fn train_glm(scores: &[f64], labels: &[bool]) -> Result<GlmWeights> {
    if scores.len() != labels.len() {
        return Err(Error::InvalidParameter(format!(
            "{} scores but {} labels",
            scores.len(),
            labels.len()
        )));
    }
    if scores.iter().any(|s| !s.is_finite()) {
        return Err(Error::InvalidParameter("scores must be finite".into()));
    }
    if !labels.contains(&true) || !labels.contains(&false) {
        return Err(Error::SingleClass);
    }
    let mut w = GlmWeights {
        bias: 0.0,
        slope: 0.0,
    };
    let mut ll = log_likelihood(scores, labels, w);
    for _ in 0..GLM_MAX_ITER {
        let (mut g0, mut g1, mut h00, mut h01, mut h11) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for (&x, &y) in scores.iter().zip(labels) {
            let p = w.probability(x);
            let r = if y { 1.0 - p } else { -p };
            let v = p * (1.0 - p);
            g0 += r;
            g1 += r * x;
            h00 += v;
            h01 += v * x;
            h11 += v * x * x;
        }
        let det = h00 * h11 - h01 * h01;
        if !det.is_finite() || det.abs() <= 1e-300 {
            return Ok(w);
        }
        let step0 = (h11 * g0 - h01 * g1) / det;
        let step1 = (h00 * g1 - h01 * g0) / det;
        // step halving keeps the update monotone in likelihood
        let mut t = 1.0;
        let mut next;
        let mut next_ll;
        loop {
            next = GlmWeights {
                bias: w.bias + t * step0,
                slope: w.slope + t * step1,
            };
            next_ll = log_likelihood(scores, labels, next);
            if next_ll >= ll - 1e-12 || t < 1e-10 {
                break;
            }
            t *= 0.5;
        }
        let change = (next_ll - ll).abs();
        w = next;
        ll = next_ll;
        if change < GLM_TOL {
            return Ok(w);
        }
    }
    Err(Error::NonConvergence(GLM_MAX_ITER))
}

/// Threshold maximising Youden's J for the rule `score > t`.
///
/// Candidates are midpoints between consecutive distinct scores plus one
/// point below the minimum; ties go to the lowest candidate. Returns the
/// threshold and its J.
pub fn youden_threshold(scores: &[f64], labels: &[bool]) -> Result<(f64, f64)> {
    if scores.len() != labels.len() {
        return Err(Error::InvalidParameter(
            "scores and labels differ in length".into(),
        ));
    }
    let pos = labels.iter().filter(|&&l| l).count();
    let neg = labels.len() - pos;
    if pos == 0 || neg == 0 {
        return Err(Error::SingleClass);
    }
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    idx.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    // everything above the first candidate is classified positive
    let mut tp = pos;
    let mut fp = neg;
    let j = |tp: usize, fp: usize| tp as f64 / pos as f64 - fp as f64 / neg as f64;
    let mut best = (scores[idx[0]] - 1e-9, j(tp, fp));
    let mut i = 0;
    while i < idx.len() {
        let v = scores[idx[i]];
        while i < idx.len() && scores[idx[i]] == v {
            if labels[idx[i]] {
                tp -= 1;
            } else {
                fp -= 1;
            }
            i += 1;
        }
        let t = if i < idx.len() {
            0.5 * (v + scores[idx[i]])
        } else {
            v
        };
        let cand = j(tp, fp);
        if cand > best.1 {
            best = (t, cand);
        }
    }
    Ok(best)
}
