use std::cmp::Ordering;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::report::{ChannelOutcome, EvaluationReport, Task};
use crate::channel::{apply_channel, find_profile, SNChannelProfile, UploadContext};
use crate::corpus::{corpus_camera, shoot_many, ShootSpec, BASE_TIMESTAMP};
use crate::diff::MetadataMap;
use crate::error::{Error, Result};
use crate::image::ImageBuffer;
use crate::prnu::{
    classify, correlate, extract_residual, train_glm, CameraFingerprint, ClassifierConfig,
    ClassifierMode, Decision, DenoiserSpec, FingerprintAccumulator, GlmWeights,
};

/// Networks used for cross-network linking unless told otherwise.
pub const INTER_LAYER_DEFAULT: [&str; 4] = ["Facebook", "Instagram", "Telegram", "WhatsApp"];

/// Images taken by one device, as files (decoded, with their source bytes).
#[derive(Debug, Clone, PartialEq)]
pub struct DeviceImages {
    pub device_id: String,
    pub images: Vec<ImageBuffer>,
}

/// Camera originals of `cameras` synthetic devices, `per_camera` each.
pub fn synthetic_corpus(
    cameras: usize,
    per_camera: usize,
    dims: (usize, usize),
    strength: f64,
    seed: u64,
) -> Result<Vec<DeviceImages>> {
    (0..cameras)
        .map(|c| {
            let cam = corpus_camera(c, dims, strength, seed)?;
            let images = shoot_many(&cam, 0, per_camera, &ShootSpec::default())?
                .into_iter()
                .map(|o| o.image)
                .collect();
            Ok(DeviceImages {
                device_id: cam.camera_id,
                images,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalSplit {
    pub train_count: usize,
    pub test_count: usize,
    pub seed: u64,
}

impl Default for EvalSplit {
    fn default() -> Self {
        EvalSplit {
            train_count: 33,
            test_count: 17,
            seed: 0,
        }
    }
}

impl EvalSplit {
    /// Train and test indices of device number `device` owning `available`
    /// images.
    pub fn indices(&self, device: usize, available: usize) -> Result<(Vec<usize>, Vec<usize>)> {
        let needed = self.train_count + self.test_count;
        if self.train_count == 0 || self.test_count == 0 || needed > available {
            return Err(Error::InsufficientImages(format!(
                "split needs {} train + {} test images, device {device} has {available}",
                self.train_count, self.test_count
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(
            self.seed ^ (device as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15),
        );
        let order = rand::seq::index::sample(&mut rng, available, needed).into_vec();
        Ok((
            order[..self.train_count].to_vec(),
            order[self.train_count..].to_vec(),
        ))
    }
}

/// Which score sets a trained classifier is fitted on.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GlmScope {
    /// One model per network (or network pair).
    #[default]
    PerChannel,
    /// One model over every channel of the task.
    Global,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct EvalConfig {
    #[serde(default)]
    pub classifier: ClassifierConfig,
    #[serde(default)]
    pub denoiser: DenoiserSpec,
    #[serde(default)]
    pub glm_scope: GlmScope,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Attribution {
    Device(String),
    Unknown,
}

/// Index of the best score; equal scores go to the lowest id.
fn best<S: AsRef<str>>(scores: &[f64], ids: &[S]) -> Option<usize> {
    (0..scores.len()).reduce(|b, i| match scores[i].partial_cmp(&scores[b]) {
        Some(Ordering::Greater) => i,
        Some(Ordering::Equal) if ids[i].as_ref() < ids[b].as_ref() => i,
        _ => b,
    })
}

/// Arg-max over `scores` (one per candidate in `ids`), kept only when the
/// classifier accepts the winning score.
pub fn decide<S: AsRef<str>>(
    scores: &[f64],
    ids: &[S],
    cfg: &ClassifierConfig,
) -> Result<Option<usize>> {
    if scores.len() != ids.len() {
        return Err(Error::InvalidParameter(
            "one score per candidate expected".into(),
        ));
    }
    match best(scores, ids) {
        Some(i) if classify(scores[i], cfg)? == Decision::SameSource => Ok(Some(i)),
        _ => Ok(None),
    }
}

/// Attributes one image to the device whose fingerprint correlates best
/// with it, or to nobody.
pub fn attribute(
    img: &ImageBuffer,
    fps: &[CameraFingerprint],
    cfg: &ClassifierConfig,
) -> Result<Attribution> {
    attribute_with(img, fps, cfg, &DenoiserSpec::default())
}

pub fn attribute_with(
    img: &ImageBuffer,
    fps: &[CameraFingerprint],
    cfg: &ClassifierConfig,
    denoiser: &DenoiserSpec,
) -> Result<Attribution> {
    if fps.is_empty() {
        return Err(Error::EmptyList);
    }
    let residual = extract_residual(img, denoiser)?;
    let scores = fps
        .iter()
        .map(|fp| correlate(&residual, fp))
        .collect::<Result<Vec<_>>>()?;
    let ids: Vec<&str> = fps.iter().map(|f| f.device_id.as_str()).collect();
    Ok(match decide(&scores, &ids, cfg)? {
        Some(i) => Attribution::Device(fps[i].device_id.clone()),
        None => Attribution::Unknown,
    })
}

fn upload(
    img: &ImageBuffer,
    profile: Option<&SNChannelProfile>,
    device: &str,
    index: usize,
) -> Result<ImageBuffer> {
    let Some(profile) = profile else {
        return Ok(img.clone());
    };
    let ctx = UploadContext::new(format!("{device}-profile"), BASE_TIMESTAMP + index as i64);
    let meta = MetadataMap::from_image(img);
    Ok(apply_channel(img, &meta, &format!("IMG_{index:04}.jpg"), profile, &ctx)?.image)
}

/// Fingerprint of each device from its training images, optionally after
/// a channel.
fn fingerprints(
    corpus: &[DeviceImages],
    splits: &[(Vec<usize>, Vec<usize>)],
    profile: Option<&SNChannelProfile>,
    denoiser: &DenoiserSpec,
) -> Result<Vec<CameraFingerprint>> {
    corpus
        .iter()
        .zip(splits)
        .map(|(dev, (train, _))| {
            let residuals = train
                .par_iter()
                .map(|&i| {
                    extract_residual(
                        &upload(&dev.images[i], profile, &dev.device_id, i)?,
                        denoiser,
                    )
                })
                .collect::<Result<Vec<_>>>()?;
            let mut acc = FingerprintAccumulator::new();
            for r in &residuals {
                acc.add(r)?;
            }
            acc.finish(dev.device_id.clone())
        })
        .collect()
}

/// Scores of every test image (after `profile`) against each fingerprint
/// set: `[set][test][device]`. Test images are listed device by device.
/// Per fingerprint set: per test image, its score against each device.
type ScoreSets = Vec<Vec<Vec<f64>>>;

fn score_tests(
    corpus: &[DeviceImages],
    splits: &[(Vec<usize>, Vec<usize>)],
    profile: Option<&SNChannelProfile>,
    sets: &[&[CameraFingerprint]],
    denoiser: &DenoiserSpec,
) -> Result<(Vec<usize>, ScoreSets)> {
    let tests: Vec<(usize, usize)> = splits
        .iter()
        .enumerate()
        .flat_map(|(d, (_, test))| test.iter().map(move |&i| (d, i)))
        .collect();
    let per_test = tests
        .par_iter()
        .map(|&(d, i)| -> Result<Vec<Vec<f64>>> {
            let dev = &corpus[d];
            let residual = extract_residual(
                &upload(&dev.images[i], profile, &dev.device_id, i)?,
                denoiser,
            )?;
            sets.iter()
                .map(|fps| fps.iter().map(|fp| correlate(&residual, fp)).collect())
                .collect()
        })
        .collect::<Result<Vec<_>>>()?;
    let truth = tests.iter().map(|&(d, _)| d).collect();
    let by_set = (0..sets.len())
        .map(|s| per_test.iter().map(|t| t[s].clone()).collect())
        .collect();
    Ok((truth, by_set))
}

/// Scores of one channel (or channel pair) before any decision.
struct ScoredChannel {
    label: String,
    truth: Vec<usize>,
    scores: Vec<Vec<f64>>,
}

fn pairs_of(channels: &[&ScoredChannel], skip: Option<(usize, usize)>) -> (Vec<f64>, Vec<bool>) {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (c, ch) in channels.iter().enumerate() {
        for (t, row) in ch.scores.iter().enumerate() {
            if skip == Some((c, t)) {
                continue;
            }
            for (d, &s) in row.iter().enumerate() {
                xs.push(s);
                ys.push(ch.truth[t] == d);
            }
        }
    }
    (xs, ys)
}

/// Classifier for test image `t` of channel `c` of `pool`: the configured
/// one, or a logistic model fitted on every other test image of the pool.
fn classifier_for(
    cfg: &ClassifierConfig,
    pool: &[&ScoredChannel],
    c: usize,
    t: usize,
) -> Result<ClassifierConfig> {
    if cfg.mode != ClassifierMode::Glm || cfg.glm_weights.is_some() {
        return Ok(*cfg);
    }
    let (xs, ys) = pairs_of(pool, Some((c, t)));
    let weights: GlmWeights = train_glm(&xs, &ys)?;
    Ok(ClassifierConfig {
        glm_weights: Some(weights),
        ..*cfg
    })
}

fn decide_all(
    task: Task,
    candidates: Vec<String>,
    split: &EvalSplit,
    channels: &[ScoredChannel],
    cfg: &EvalConfig,
) -> Result<EvaluationReport> {
    let all: Vec<&ScoredChannel> = channels.iter().collect();
    let outcomes = channels
        .iter()
        .enumerate()
        .map(|(c, ch)| -> Result<ChannelOutcome> {
            let (pool, pc) = match cfg.glm_scope {
                GlmScope::PerChannel => (vec![ch], 0),
                GlmScope::Global => (all.clone(), c),
            };
            let answers = (0..ch.scores.len())
                .into_par_iter()
                .map(|t| {
                    decide(
                        &ch.scores[t],
                        &candidates,
                        &classifier_for(&cfg.classifier, &pool, pc, t)?,
                    )
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(ChannelOutcome {
                channel: ch.label.clone(),
                truth: ch.truth.clone(),
                answers,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EvaluationReport::assemble(
        task,
        candidates,
        split.test_count,
        &outcomes,
    ))
}

fn prepare(
    corpus: &[DeviceImages],
    split: &EvalSplit,
    cfg: &EvalConfig,
) -> Result<Vec<(Vec<usize>, Vec<usize>)>> {
    if corpus.len() < 2 {
        return Err(Error::InsufficientImages(
            "at least two devices are needed".into(),
        ));
    }
    cfg.classifier.validate()?;
    cfg.denoiser.validate()?;
    corpus
        .iter()
        .enumerate()
        .map(|(d, dev)| split.indices(d, dev.images.len()))
        .collect()
}

fn candidates(corpus: &[DeviceImages]) -> Vec<String> {
    corpus.iter().map(|d| d.device_id.clone()).collect()
}

/// Fingerprints from original training images; test images go through each
/// channel and are attributed. One block of rows per channel.
pub fn run_attribution(
    corpus: &[DeviceImages],
    profiles: &[SNChannelProfile],
    split: &EvalSplit,
    cfg: &EvalConfig,
) -> Result<EvaluationReport> {
    let splits = prepare(corpus, split, cfg)?;
    let fps = fingerprints(corpus, &splits, None, &cfg.denoiser)?;
    let channels = profiles
        .iter()
        .map(|p| {
            let (truth, mut scores) =
                score_tests(corpus, &splits, Some(p), &[&fps], &cfg.denoiser)?;
            Ok(ScoredChannel {
                label: p.name.clone(),
                truth,
                scores: scores.remove(0),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    decide_all(Task::Attribution, candidates(corpus), split, &channels, cfg)
}

/// Training and test images both come through the same channel.
pub fn run_intra_layer(
    corpus: &[DeviceImages],
    profiles: &[SNChannelProfile],
    split: &EvalSplit,
    cfg: &EvalConfig,
) -> Result<EvaluationReport> {
    let splits = prepare(corpus, split, cfg)?;
    let channels = profiles
        .iter()
        .map(|p| {
            let fps = fingerprints(corpus, &splits, Some(p), &cfg.denoiser)?;
            let (truth, mut scores) =
                score_tests(corpus, &splits, Some(p), &[&fps], &cfg.denoiser)?;
            Ok(ScoredChannel {
                label: p.name.clone(),
                truth,
                scores: scores.remove(0),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    decide_all(Task::IntraLayer, candidates(corpus), split, &channels, cfg)
}

/// Every ordered pair of distinct profiles.
pub fn ordered_pairs(profiles: &[SNChannelProfile]) -> Vec<(SNChannelProfile, SNChannelProfile)> {
    let mut out = Vec::new();
    for a in profiles {
        for b in profiles {
            if a.sn_id != b.sn_id {
                out.push((a.clone(), b.clone()));
            }
        }
    }
    out
}

/// The default cross-network pairs among `profiles`.
pub fn default_inter_pairs(
    profiles: &[SNChannelProfile],
) -> Result<Vec<(SNChannelProfile, SNChannelProfile)>> {
    let subset = INTER_LAYER_DEFAULT
        .iter()
        .map(|n| find_profile(profiles, n).cloned())
        .collect::<Result<Vec<_>>>()?;
    Ok(ordered_pairs(&subset))
}

/// Fingerprints from the first network of each pair, test images from the
/// second. Rows are labelled `train->test`.
pub fn run_inter_layer(
    corpus: &[DeviceImages],
    profile_pairs: &[(SNChannelProfile, SNChannelProfile)],
    split: &EvalSplit,
    cfg: &EvalConfig,
) -> Result<EvaluationReport> {
    let splits = prepare(corpus, split, cfg)?;
    let mut train_nets: Vec<&SNChannelProfile> = Vec::new();
    let mut test_nets: Vec<&SNChannelProfile> = Vec::new();
    for (a, b) in profile_pairs {
        if !train_nets.iter().any(|p| p.sn_id == a.sn_id) {
            train_nets.push(a);
        }
        if !test_nets.iter().any(|p| p.sn_id == b.sn_id) {
            test_nets.push(b);
        }
    }
    let fps = train_nets
        .iter()
        .map(|p| fingerprints(corpus, &splits, Some(p), &cfg.denoiser))
        .collect::<Result<Vec<_>>>()?;
    let sets: Vec<&[CameraFingerprint]> = fps.iter().map(|f| f.as_slice()).collect();
    let scored = test_nets
        .iter()
        .map(|p| score_tests(corpus, &splits, Some(p), &sets, &cfg.denoiser))
        .collect::<Result<Vec<_>>>()?;
    let channels = profile_pairs
        .iter()
        .map(|(a, b)| {
            let ai = train_nets
                .iter()
                .position(|p| p.sn_id == a.sn_id)
                .unwrap_or_default();
            let bi = test_nets
                .iter()
                .position(|p| p.sn_id == b.sn_id)
                .unwrap_or_default();
            let (truth, by_set) = &scored[bi];
            ScoredChannel {
                label: format!("{}->{}", a.name, b.name),
                truth: truth.clone(),
                scores: by_set[ai].clone(),
            }
        })
        .collect::<Vec<_>>();
    decide_all(Task::InterLayer, candidates(corpus), split, &channels, cfg)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkDecision {
    pub same_user: bool,
    /// Fraction of `set_b` classified as coming from `set_a`'s device.
    pub evidence: f64,
}

/// Whether two profiles' images come from one device: a fingerprint from
/// `set_a`, then a majority vote over `set_b`.
pub fn link_profiles(
    set_a: &[ImageBuffer],
    set_b: &[ImageBuffer],
    cfg: &ClassifierConfig,
) -> Result<LinkDecision> {
    link_profiles_with(set_a, set_b, cfg, &DenoiserSpec::default())
}

pub fn link_profiles_with(
    set_a: &[ImageBuffer],
    set_b: &[ImageBuffer],
    cfg: &ClassifierConfig,
    denoiser: &DenoiserSpec,
) -> Result<LinkDecision> {
    if set_a.len() < 2 || set_b.is_empty() {
        return Err(Error::InsufficientImages(format!(
            "linking needs at least 2 + 1 images, got {} + {}",
            set_a.len(),
            set_b.len()
        )));
    }
    cfg.validate()?;
    let residuals = set_a
        .par_iter()
        .map(|img| extract_residual(img, denoiser))
        .collect::<Result<Vec<_>>>()?;
    let mut acc = FingerprintAccumulator::new();
    for r in &residuals {
        acc.add(r)?;
    }
    let fp = acc.finish("profile-a")?;
    let same = set_b
        .par_iter()
        .map(|img| {
            Ok(
                classify(correlate(&extract_residual(img, denoiser)?, &fp)?, cfg)?
                    == Decision::SameSource,
            )
        })
        .collect::<Result<Vec<bool>>>()?;
    let evidence = same.iter().filter(|&&s| s).count() as f64 / same.len() as f64;
    Ok(LinkDecision {
        same_user: evidence >= 0.5,
        evidence,
    })
}
