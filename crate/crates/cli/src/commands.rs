use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::json;
use snmark::channel::{
    apply_channel, calibrate_all, default_profiles, find_profile, load_profiles, save_profiles,
    SNChannelProfile, UploadContext,
};
use snmark::corpus::{corpus_camera, shoot_many, ShootSpec, BASE_TIMESTAMP, DEFAULT_SHOT_NOISE};
use snmark::diff::{compression_ratio, diff_files, MetadataMap, NameClassifier};
use snmark::image::{decode_image, encode_png, SceneKind, MAX_PATTERN_STRENGTH};
use snmark::linkage::{
    default_inter_pairs, ordered_pairs, run_attribution, run_inter_layer, run_intra_layer,
    EvalConfig, EvalSplit, EvaluationReport, GlmScope,
};
use snmark::prnu::{
    classify, correlate, estimate_fingerprint, extract_residual, extract_residuals,
    load_fingerprint, save_fingerprint, ClassifierConfig, ClassifierMode, Decision, DenoiserKind,
    DenoiserSpec,
};
use snmark::watermark::{
    bits_to_bytes, dct_detect, dwt_detect, embed, keyed_lsb_extract, lsb_extract, psnr,
    run_survival_grid, DwtParams, GridConfig, GridCorpus, Scheme, WatermarkPayload,
};

use crate::manifest::{CorpusManifest, ManifestEntry, Role};
use crate::{
    ClassifierArg, Cli, Command, DenoiserArg, EvalArgs, Failure, FingerprintCommand, GlmScopeArg,
    SceneArg, TaskArg, WmCommand,
};

type Outcome = Result<(), Failure>;

pub fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Synth(a) => synth(a),
        Command::Diff(a) => diff(&a.a, &a.b),
        Command::Simulate(a) => simulate(a),
        Command::Profiles(a) => profiles(a.out.as_deref()),
        Command::Calibrate(a) => calibrate(a),
        Command::Wm(c) => wm(c),
        Command::Fingerprint(c) => fingerprint(c),
        Command::Eval(a) => eval(a),
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn read(path: &Path) -> Result<Vec<u8>, Failure> {
    std::fs::read(path).map_err(|e| Failure::io(path, e))
}

fn write(path: &Path, bytes: &[u8]) -> Outcome {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Failure::io(dir, e))?;
    }
    std::fs::write(path, bytes).map_err(|e| Failure::io(path, e))
}

fn to_json<T: Serialize>(value: &T) -> Result<String, Failure> {
    serde_json::to_string_pretty(value)
        .map(|s| s + "\n")
        .map_err(|e| Failure::Domain(e.to_string()))
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn file_name(path: &Path) -> String {
    path.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default()
}

fn profile_set(path: Option<&Path>) -> Result<Vec<SNChannelProfile>, Failure> {
    match path {
        Some(p) => Ok(load_profiles(p)?),
        None => Ok(default_profiles()),
    }
}

fn denoiser(arg: DenoiserArg) -> DenoiserSpec {
    DenoiserSpec::with_kind(match arg {
        DenoiserArg::WaveletHard => DenoiserKind::WaveletHard,
        DenoiserArg::WaveletSoft => DenoiserKind::WaveletSoft,
        DenoiserArg::Gaussian => DenoiserKind::GaussianBaseline,
    })
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().fold(String::new(), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

fn parse_hex(text: &str) -> Result<Vec<u8>, Failure> {
    let text = text.trim();
    if text.is_empty() || !text.len().is_multiple_of(2) {
        return Err(usage("--message needs an even number of hex digits"));
    }
    (0..text.len())
        .step_by(2)
        .map(|i| {
            u8::from_str_radix(&text[i..i + 2], 16)
                .map_err(|_| usage(format!("bad hex in --message: {text}")))
        })
        .collect()
}

fn parse_dims(text: &str) -> Result<(usize, usize), Failure> {
    let (w, h) = text
        .split_once(['x', 'X'])
        .ok_or_else(|| usage(format!("expected WIDTHxHEIGHT, got {text}")))?;
    match (w.parse(), h.parse()) {
        (Ok(w), Ok(h)) if w > 0 && h > 0 => Ok((w, h)),
        _ => Err(usage(format!("expected WIDTHxHEIGHT, got {text}"))),
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
struct SynthConfig {
    cameras: usize,
    images: usize,
    width: usize,
    height: usize,
    strength: f64,
    scene: SceneKind,
    shot_noise: f64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            cameras: 6,
            images: 50,
            width: 512,
            height: 512,
            strength: 0.03,
            scene: SceneKind::Textured,
            shot_noise: DEFAULT_SHOT_NOISE,
        }
    }
}

fn synth(a: crate::SynthArgs) -> Outcome {
    let mut cfg: SynthConfig = match &a.config {
        Some(p) => read_json(p)?,
        None => SynthConfig::default(),
    };
    cfg.cameras = a.cameras.unwrap_or(cfg.cameras);
    cfg.images = a.images.unwrap_or(cfg.images);
    cfg.width = a.width.unwrap_or(cfg.width);
    cfg.height = a.height.unwrap_or(cfg.height);
    cfg.strength = a.strength.unwrap_or(cfg.strength);
    if let Some(s) = a.scene {
        cfg.scene = match s {
            SceneArg::Flat => SceneKind::Flat,
            SceneArg::Gradient => SceneKind::Gradient,
            SceneArg::Textured => SceneKind::Textured,
        };
    }
    if cfg.cameras == 0 || cfg.images == 0 {
        return Err(usage("--cameras and --images must be at least 1"));
    }
    if cfg.width < 16 || cfg.height < 16 {
        return Err(usage("images must be at least 16x16"));
    }
    if !(0.0..=MAX_PATTERN_STRENGTH).contains(&cfg.strength) || cfg.shot_noise < 0.0 {
        return Err(usage(format!(
            "--strength must lie in [0, {MAX_PATTERN_STRENGTH}]"
        )));
    }

    let spec = ShootSpec {
        scene: cfg.scene,
        shot_noise: cfg.shot_noise,
    };
    let mut entries = Vec::new();
    for c in 0..cfg.cameras {
        let cam = corpus_camera(c, (cfg.width, cfg.height), cfg.strength, a.seed)?;
        for o in shoot_many(&cam, 0, cfg.images, &spec)? {
            let rel = format!("{}/{}", cam.camera_id, o.name);
            write(&a.out.join(&rel), o.bytes())?;
            entries.push(ManifestEntry {
                path: rel,
                camera_id: cam.camera_id.clone(),
                role: Role::Unassigned,
            });
        }
    }
    let manifest = CorpusManifest {
        seed: a.seed,
        entries,
    };
    manifest.save(&a.out.join("manifest.json"))?;
    println!(
        "wrote {} images from {} cameras to {}",
        manifest.entries.len(),
        cfg.cameras,
        a.out.display()
    );
    Ok(())
}

fn diff(a: &Path, b: &Path) -> Outcome {
    let report = diff_files(
        &file_name(a),
        &read(a)?,
        &file_name(b),
        &read(b)?,
        &NameClassifier::default(),
    )?;
    print!("{}", to_json(&report)?);
    Ok(())
}

fn simulate(a: crate::SimulateArgs) -> Outcome {
    let profiles = profile_set(a.profiles.as_deref())?;
    let profile = find_profile(&profiles, &a.sn).map_err(|e| usage(e.to_string()))?;
    let bytes = read(&a.input)?;
    let img = decode_image(&bytes)?;
    let meta = MetadataMap::from_image(&img);
    let ctx = UploadContext::new(a.uploader, a.timestamp.unwrap_or(BASE_TIMESTAMP));
    let out = apply_channel(&img, &meta, &file_name(&a.input), profile, &ctx)?;
    let path = a.out.join(&out.name);
    write(&path, out.bytes())?;
    let summary = json!({
        "sn": profile.sn_id,
        "output": path.display().to_string(),
        "name": out.name,
        "class": out.class.as_str(),
        "width": out.image.width(),
        "height": out.image.height(),
        "size": out.bytes().len(),
        "compression_ratio": compression_ratio(bytes.len() as u64, out.bytes().len() as u64)?,
    });
    print!("{}", to_json(&summary)?);
    Ok(())
}

fn profiles(out: Option<&Path>) -> Outcome {
    let profiles = default_profiles();
    match out {
        Some(p) => Ok(save_profiles(&profiles, p)?),
        None => {
            print!("{}", to_json(&profiles)?);
            Ok(())
        }
    }
}

fn calibrate(a: crate::CalibrateArgs) -> Outcome {
    if a.per_class == 0 {
        return Err(usage("--per-class must be at least 1"));
    }
    let profiles = profile_set(a.profiles.as_deref())?;
    let (updated, report) = calibrate_all(&profiles, a.per_class, a.seed)?;
    std::fs::create_dir_all(&a.out).map_err(|e| Failure::io(&a.out, e))?;
    save_profiles(&updated, a.out.join("profiles.json"))?;
    let mut csv = String::from("sn,class,quality,target,achieved,pinned\n");
    for c in &report {
        let q = c.quality.map(|q| q.to_string()).unwrap_or_default();
        let _ = writeln!(
            csv,
            "{},{},{q},{:.2},{:.2},{}",
            c.sn_id,
            c.class.as_str(),
            c.target,
            c.achieved,
            c.pinned
        );
    }
    write(&a.out.join("calibration.csv"), csv.as_bytes())?;
    print!("{csv}");
    Ok(())
}

fn scheme(arg: crate::SchemeArg) -> Scheme {
    match arg {
        crate::SchemeArg::Lsb => Scheme::Lsb,
        crate::SchemeArg::KeyedLsb => Scheme::KeyedLsb,
        crate::SchemeArg::Dct => Scheme::Dct,
        crate::SchemeArg::Dwt => Scheme::Dwt,
    }
}

fn wm(cmd: WmCommand) -> Outcome {
    match cmd {
        WmCommand::Embed(a) => {
            let key = a.key.unwrap_or(a.seed);
            let payload = match &a.message {
                Some(m) => WatermarkPayload::from_bytes(&parse_hex(m)?, key)?,
                None if a.bits == 0 => return Err(usage("--bits must be at least 1")),
                None => WatermarkPayload::new(
                    WatermarkPayload::random(a.bits, a.seed)?.bits().to_vec(),
                    key,
                )?,
            };
            let img = decode_image(&read(&a.input)?)?;
            let s = scheme(a.scheme);
            let marked = embed(s, &img, &payload, &Default::default())?;
            write(&a.out, &encode_png(&marked)?)?;
            let p = psnr(&img, &marked)?;
            let summary = json!({
                "scheme": s.as_str(),
                "length": payload.len(),
                "bits": hex(&bits_to_bytes(payload.bits())),
                "key": key,
                "psnr": p.is_finite().then_some(p),
            });
            print!("{}", to_json(&summary)?);
        }
        WmCommand::Extract(a) => {
            if a.length == 0 {
                return Err(usage("--length must be at least 1"));
            }
            let img = decode_image(&read(&a.input)?)?;
            let (bits, confidence) = match scheme(a.scheme) {
                Scheme::Lsb => (lsb_extract(&img, a.length)?, None),
                Scheme::KeyedLsb => (keyed_lsb_extract(&img, a.length, a.key)?, None),
                Scheme::Dct => {
                    let d = dct_detect(&img, a.length, a.key)?;
                    (d.bits, Some(d.confidence))
                }
                Scheme::Dwt => return Err(usage("the dwt scheme is detect-only; use `wm detect`")),
            };
            let summary = json!({
                "length": bits.len(),
                "bits": hex(&bits_to_bytes(&bits)),
                "confidence": confidence,
            });
            print!("{}", to_json(&summary)?);
        }
        WmCommand::Detect(a) => {
            let img = decode_image(&read(&a.input)?)?;
            print!(
                "{}",
                to_json(&dwt_detect(&img, a.key, &DwtParams::default())?)?
            );
        }
        WmCommand::Grid(a) => {
            let (standard, large, small) = (
                parse_dims(&a.standard)?,
                parse_dims(&a.large)?,
                parse_dims(&a.small)?,
            );
            if a.per_class == 0 {
                return Err(usage("--per-class must be at least 1"));
            }
            let mut cfg: GridConfig = match &a.config {
                Some(p) => read_json(p)?,
                None => GridConfig::default(),
            };
            cfg.seed = a.seed;
            let profiles = profile_set(a.profiles.as_deref())?;
            let corpus = GridCorpus::synthetic(standard, large, small, a.per_class, a.seed)?;
            let grid = run_survival_grid(&Scheme::ALL, &profiles, &corpus, &cfg)?;
            let csv = grid.to_csv();
            write(&a.out.join("grid.csv"), csv.as_bytes())?;
            write(&a.out.join("grid.json"), to_json(&grid)?.as_bytes())?;
            print!("{csv}");
        }
    }
    Ok(())
}

fn fingerprint(cmd: FingerprintCommand) -> Outcome {
    match cmd {
        FingerprintCommand::Build(a) => {
            let (images, device) = match (&a.corpus, &a.camera) {
                (Some(m), Some(camera)) => {
                    let (manifest, base) = CorpusManifest::load(m)?;
                    if !manifest.cameras().contains(camera) {
                        return Err(usage(format!("camera {camera} is not in {}", m.display())));
                    }
                    let devices = manifest
                        .devices(&base, |e| &e.camera_id == camera && e.role != Role::Test)?;
                    let images = devices.into_iter().flat_map(|d| d.images).collect();
                    (images, camera.clone())
                }
                _ if !a.inputs.is_empty() => {
                    let images = a
                        .inputs
                        .iter()
                        .map(|p| Ok(decode_image(&read(p)?)?))
                        .collect::<Result<Vec<_>, Failure>>()?;
                    (images, a.device.clone())
                }
                _ => return Err(usage("give --corpus with --camera, or --inputs")),
            };
            let residuals = extract_residuals(&images, &denoiser(a.denoiser))?;
            let fp = estimate_fingerprint(&residuals, device)?;
            save_fingerprint(&fp, &a.out)?;
            let summary = json!({
                "device_id": fp.device_id,
                "n_images": fp.n_images,
                "width": fp.width(),
                "height": fp.height(),
            });
            print!("{}", to_json(&summary)?);
        }
        FingerprintCommand::Match(a) => {
            let cfg = ClassifierConfig::threshold(a.threshold);
            cfg.validate().map_err(|e| usage(e.to_string()))?;
            let fp = load_fingerprint(&a.fingerprint)?;
            let img = decode_image(&read(&a.input)?)?;
            let score = correlate(&extract_residual(&img, &denoiser(a.denoiser))?, &fp)?;
            let decision = match classify(score, &cfg)? {
                Decision::SameSource => "same_source",
                Decision::DifferentSource => "different_source",
            };
            println!("score {score:.6}");
            println!("device {}", fp.device_id);
            println!("decision {decision}");
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default)]
struct EvalFile {
    split: Option<EvalSplit>,
    eval: EvalConfig,
}

fn eval(a: EvalArgs) -> Outcome {
    let file: EvalFile = match &a.config {
        Some(p) => read_json(p)?,
        None => EvalFile::default(),
    };
    let mut cfg = file.eval;
    if let Some(c) = a.classifier {
        cfg.classifier.mode = match c {
            ClassifierArg::Threshold => ClassifierMode::FixedThreshold,
            ClassifierArg::Glm => ClassifierMode::Glm,
        };
    }
    if let Some(t) = a.threshold {
        cfg.classifier.threshold = t;
    }
    if let Some(d) = a.denoiser {
        cfg.denoiser = denoiser(d);
    }
    if let Some(s) = a.glm_scope {
        cfg.glm_scope = match s {
            GlmScopeArg::PerChannel => GlmScope::PerChannel,
            GlmScopeArg::Global => GlmScope::Global,
        };
    }
    cfg.classifier
        .validate()
        .map_err(|e| usage(e.to_string()))?;

    let (manifest, base) = CorpusManifest::load(&a.corpus)?;
    let mut split = file.split.unwrap_or(EvalSplit {
        seed: manifest.seed,
        ..Default::default()
    });
    split.seed = a.seed.unwrap_or(split.seed);
    split.train_count = a.train.unwrap_or(split.train_count);
    split.test_count = a.test.unwrap_or(split.test_count);
    if split.train_count == 0 || split.test_count == 0 {
        return Err(usage("--train and --test must be at least 1"));
    }

    let all = profile_set(a.profiles.as_deref())?;
    let selected = if a.sn.is_empty() {
        None
    } else {
        Some(
            a.sn.iter()
                .map(|s| {
                    find_profile(&all, s)
                        .cloned()
                        .map_err(|e| usage(e.to_string()))
                })
                .collect::<Result<Vec<_>, Failure>>()?,
        )
    };
    let corpus = manifest.devices(&base, |_| true)?;
    let report: EvaluationReport = match a.task {
        TaskArg::Attribution => {
            run_attribution(&corpus, selected.as_deref().unwrap_or(&all), &split, &cfg)?
        }
        TaskArg::Intra => {
            run_intra_layer(&corpus, selected.as_deref().unwrap_or(&all), &split, &cfg)?
        }
        TaskArg::Inter => {
            let pairs = match &selected {
                Some(subset) => ordered_pairs(subset),
                None => default_inter_pairs(&all)?,
            };
            run_inter_layer(&corpus, &pairs, &split, &cfg)?
        }
    };
    write_report(&a.out, &report)?;
    println!("{} accuracy {:.4}", report.task.as_str(), report.accuracy());
    for f in &report.flags {
        println!("flag: {f}");
    }
    Ok(())
}

fn write_report(out: &Path, report: &EvaluationReport) -> Outcome {
    let stem = report.task.as_str();
    let path = |suffix: &str| -> PathBuf { out.join(format!("{stem}{suffix}")) };
    write(&path(".csv"), report.to_csv().as_bytes())?;
    write(&path("_metrics.csv"), report.metrics_csv().as_bytes())?;
    write(&path(".png"), &report.heatmap_png()?)?;
    write(&path(".json"), to_json(report)?.as_bytes())
}
