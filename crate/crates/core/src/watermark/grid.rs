use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::dct::{dct_detect, dct_embed, DctParams};
use super::dwt::{dwt_detect, dwt_embed, DwtParams};
use super::lsb::{keyed_lsb_embed, keyed_lsb_extract, lsb_embed, lsb_extract};
use super::payload::WatermarkPayload;
use crate::channel::{apply_channel, ResolutionClass, SNChannelProfile, UploadContext};
use crate::corpus::{shoot_many, ShootSpec, BASE_TIMESTAMP};
use crate::diff::MetadataMap;
use crate::error::{Error, Result};
use crate::image::{
    decode_image, encode_png, fit_within, generate_camera, orient_like, resize, ImageBuffer,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    Lsb,
    KeyedLsb,
    Dct,
    Dwt,
}

impl Scheme {
    pub const ALL: [Scheme; 4] = [Scheme::Lsb, Scheme::KeyedLsb, Scheme::Dct, Scheme::Dwt];

    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::Lsb => "lsb",
            Scheme::KeyedLsb => "keyed-lsb",
            Scheme::Dct => "dct",
            Scheme::Dwt => "dwt",
        }
    }

    /// Readable schemes return the payload; the others only answer whether
    /// the keyed mark is present.
    pub fn is_readable(self) -> bool {
        !matches!(self, Scheme::Dwt)
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "lsb" => Ok(Scheme::Lsb),
            "keyed-lsb" | "keyed" | "hideseek" => Ok(Scheme::KeyedLsb),
            "dct" => Ok(Scheme::Dct),
            "dwt" | "dugad" => Ok(Scheme::Dwt),
            other => Err(Error::InvalidParameter(format!(
                "unknown watermark scheme '{other}'"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct SchemeParams {
    #[serde(default)]
    pub dct: DctParams,
    #[serde(default)]
    pub dwt: DwtParams,
}

pub fn embed(
    scheme: Scheme,
    img: &ImageBuffer,
    payload: &WatermarkPayload,
    params: &SchemeParams,
) -> Result<ImageBuffer> {
    match scheme {
        Scheme::Lsb => lsb_embed(img, payload),
        Scheme::KeyedLsb => keyed_lsb_embed(img, payload),
        Scheme::Dct => dct_embed(img, payload, &params.dct),
        Scheme::Dwt => dwt_embed(img, payload.key, &params.dwt),
    }
}

/// Exact payload recovery for readable schemes, a positive detection for
/// the others.
pub fn survives(
    scheme: Scheme,
    img: &ImageBuffer,
    payload: &WatermarkPayload,
    params: &SchemeParams,
) -> Result<bool> {
    let n = payload.len();
    Ok(match scheme {
        Scheme::Lsb => lsb_extract(img, n)? == payload.bits(),
        Scheme::KeyedLsb => keyed_lsb_extract(img, n, payload.key)? == payload.bits(),
        Scheme::Dct => dct_detect(img, n, payload.key)?.bits == payload.bits(),
        Scheme::Dwt => dwt_detect(img, payload.key, &params.dwt)?.detected,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Cell {
    Survived,
    Destroyed,
    EmbedFailed,
}

impl Cell {
    pub fn symbol(self) -> char {
        match self {
            Cell::Survived => 'S',
            Cell::Destroyed => 'D',
            Cell::EmbedFailed => 'F',
        }
    }
}

/// Test images per resolution class.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct GridCorpus {
    /// Fitted into each network's default size before marking.
    pub standard: Vec<ImageBuffer>,
    /// Should exceed every network's default size.
    pub large: Vec<ImageBuffer>,
    pub small: Vec<ImageBuffer>,
}

impl GridCorpus {
    pub fn get(&self, class: ResolutionClass) -> &[ImageBuffer] {
        match class {
            ResolutionClass::Standard => &self.standard,
            ResolutionClass::Large => &self.large,
            ResolutionClass::Small => &self.small,
        }
    }

    /// Camera originals of the three sizes from one synthetic camera.
    pub fn synthetic(
        standard: (usize, usize),
        large: (usize, usize),
        small: (usize, usize),
        per_class: usize,
        seed: u64,
    ) -> Result<Self> {
        let shoot = |dims: (usize, usize), salt: u64| -> Result<Vec<ImageBuffer>> {
            let cam = generate_camera(seed.wrapping_add(salt), dims.0, dims.1, 0.02)?;
            Ok(shoot_many(&cam, 0, per_class, &ShootSpec::default())?
                .into_iter()
                .map(|o| o.image)
                .collect())
        };
        Ok(GridCorpus {
            standard: shoot(standard, 0)?,
            large: shoot(large, 1)?,
            small: shoot(small, 2)?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridConfig {
    pub payload_bits: usize,
    /// Seeds the payload and the key.
    pub seed: u64,
    #[serde(default)]
    pub params: SchemeParams,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            payload_bits: 64,
            seed: 0,
            params: SchemeParams::default(),
        }
    }
}

/// Outcome of every (network, scheme, class) combination.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurvivalGrid {
    pub sn_ids: Vec<String>,
    pub sn_names: Vec<String>,
    pub schemes: Vec<Scheme>,
    pub classes: Vec<ResolutionClass>,
    /// Row-major over networks, then schemes, then classes.
    cells: Vec<Cell>,
}

impl SurvivalGrid {
    fn index(&self, sn: usize, scheme: usize, class: usize) -> usize {
        (sn * self.schemes.len() + scheme) * self.classes.len() + class
    }

    pub fn cell(&self, sn: usize, scheme: usize, class: usize) -> Cell {
        self.cells[self.index(sn, scheme, class)]
    }

    /// Looks a cell up by network id or name.
    pub fn get(&self, sn: &str, scheme: Scheme, class: ResolutionClass) -> Option<Cell> {
        let r = self
            .sn_ids
            .iter()
            .zip(&self.sn_names)
            .position(|(i, n)| i == sn || n == sn)?;
        let s = self.schemes.iter().position(|&x| x == scheme)?;
        let c = self.classes.iter().position(|&x| x == class)?;
        Some(self.cell(r, s, c))
    }

    /// `sn,name,<scheme>:<class>,...` then one row of S/D/F per network.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("sn,name");
        for s in &self.schemes {
            for c in &self.classes {
                let _ = write!(out, ",{}:{}", s.as_str(), c.as_str());
            }
        }
        out.push('\n');
        for (r, (id, name)) in self.sn_ids.iter().zip(&self.sn_names).enumerate() {
            let _ = write!(out, "{id},{name}");
            for s in 0..self.schemes.len() {
                for c in 0..self.classes.len() {
                    let _ = write!(out, ",{}", self.cell(r, s, c).symbol());
                }
            }
            out.push('\n');
        }
        out
    }
}

/// Size a class image is marked at before being uploaded to `profile`.
fn input_dims(
    profile: &SNChannelProfile,
    class: ResolutionClass,
    dims: (usize, usize),
) -> (usize, usize) {
    match class {
        ResolutionClass::Standard if !profile.passthrough => {
            fit_within(dims, orient_like(profile.default_resolution, dims))
        }
        _ => dims,
    }
}

fn mark(
    img: &ImageBuffer,
    dims: (usize, usize),
    scheme: Scheme,
    payload: &WatermarkPayload,
    params: &SchemeParams,
) -> Option<ImageBuffer> {
    let input = if img.dimensions() == dims {
        img.clone()
    } else {
        resize(img, dims.0, dims.1).ok()?
    };
    let marked = embed(scheme, &input, payload, params).ok()?;
    // a lossless file so that pass-through networks serve the marked pixels
    decode_image(&encode_png(&marked).ok()?).ok()
}

/// Marks every class image, uploads it through every profile and tries to
/// recover the mark.
///
/// Received images are resampled back to the marked size before
/// extraction. A cell is `Survived` only when every image of the class
/// survives, and `EmbedFailed` when any image could not be marked.
pub fn run_survival_grid(
    schemes: &[Scheme],
    profiles: &[SNChannelProfile],
    corpus: &GridCorpus,
    cfg: &GridConfig,
) -> Result<SurvivalGrid> {
    if schemes.is_empty() || profiles.is_empty() {
        return Err(Error::EmptyList);
    }
    if ResolutionClass::ALL
        .iter()
        .any(|&c| corpus.get(c).is_empty())
    {
        return Err(Error::EmptyCorpus);
    }
    let payload = WatermarkPayload::random(cfg.payload_bits, cfg.seed)?;
    let classes = ResolutionClass::ALL.to_vec();

    type MarkKey = (Scheme, ResolutionClass, usize, (usize, usize));
    let mut keys: BTreeMap<MarkKey, ()> = BTreeMap::new();
    for p in profiles {
        for &s in schemes {
            for &c in &classes {
                for (i, img) in corpus.get(c).iter().enumerate() {
                    keys.insert((s, c, i, input_dims(p, c, img.dimensions())), ());
                }
            }
        }
    }
    let keys: Vec<MarkKey> = keys.into_keys().collect();
    let marked: BTreeMap<MarkKey, Option<ImageBuffer>> = keys
        .par_iter()
        .map(|&k| {
            (
                k,
                mark(&corpus.get(k.1)[k.2], k.3, k.0, &payload, &cfg.params),
            )
        })
        .collect::<Vec<_>>()
        .into_iter()
        .collect();

    let mut jobs = Vec::new();
    for (r, p) in profiles.iter().enumerate() {
        for &s in schemes {
            for &c in &classes {
                for (i, img) in corpus.get(c).iter().enumerate() {
                    jobs.push((r, (s, c, i, input_dims(p, c, img.dimensions()))));
                }
            }
        }
    }
    let outcomes = jobs
        .par_iter()
        .map(|&(r, key)| -> Result<Cell> {
            let Some(img) = &marked[&key] else {
                return Ok(Cell::EmbedFailed);
            };
            let profile = &profiles[r];
            let meta = MetadataMap::from_image(&corpus.get(key.1)[key.2]);
            let ctx = UploadContext::new("grid", BASE_TIMESTAMP);
            let out = apply_channel(img, &meta, "marked.png", profile, &ctx)?;
            let received = if out.image.dimensions() == img.dimensions() {
                out.image
            } else {
                resize(&out.image, img.width(), img.height())?
            };
            Ok(match survives(key.0, &received, &payload, &cfg.params) {
                Ok(true) => Cell::Survived,
                _ => Cell::Destroyed,
            })
        })
        .collect::<Result<Vec<Cell>>>()?;

    let mut cells = Vec::with_capacity(profiles.len() * schemes.len() * classes.len());
    let mut groups = outcomes.as_slice();
    for _ in 0..profiles.len() * schemes.len() {
        for &c in &classes {
            let (group, rest) = groups.split_at(corpus.get(c).len());
            groups = rest;
            cells.push(if group.contains(&Cell::EmbedFailed) {
                Cell::EmbedFailed
            } else if group.iter().all(|&g| g == Cell::Survived) {
                Cell::Survived
            } else {
                Cell::Destroyed
            });
        }
    }
    Ok(SurvivalGrid {
        sn_ids: profiles.iter().map(|p| p.sn_id.clone()).collect(),
        sn_names: profiles.iter().map(|p| p.name.clone()).collect(),
        schemes: schemes.to_vec(),
        classes,
        cells,
    })
}
