use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::{fit_within, orient_like};

/// Images with at most this many pixels fall in the small class.
pub const SMALL_CLASS_PIXELS: usize = 640 * 480;
/// Quality the simulated camera writes originals with.
pub const ORIGINAL_QUALITY: u8 = 96;
/// Used when a profile has neither a calibrated nor a pinned quality.
pub const FALLBACK_QUALITY: u8 = 85;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ResolutionClass {
    Standard,
    Large,
    Small,
}

impl ResolutionClass {
    pub const ALL: [ResolutionClass; 3] = [
        ResolutionClass::Standard,
        ResolutionClass::Large,
        ResolutionClass::Small,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ResolutionClass::Standard => "standard",
            ResolutionClass::Large => "large",
            ResolutionClass::Small => "small",
        }
    }
}

/// One value per resolution class.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PerClass<T> {
    pub standard: T,
    pub large: T,
    pub small: T,
}

impl<T: Copy> PerClass<T> {
    pub fn new(standard: T, large: T, small: T) -> Self {
        PerClass {
            standard,
            large,
            small,
        }
    }

    pub fn get(&self, class: ResolutionClass) -> T {
        match class {
            ResolutionClass::Standard => self.standard,
            ResolutionClass::Large => self.large,
            ResolutionClass::Small => self.small,
        }
    }

    pub fn set(&mut self, class: ResolutionClass, value: T) {
        match class {
            ResolutionClass::Standard => self.standard = value,
            ResolutionClass::Large => self.large = value,
            ResolutionClass::Small => self.small = value,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetadataPolicy {
    PreserveAll,
    EraseAll,
    RemoveThumbnails,
    KeepSubset,
    #[serde(rename = "facebook_iptc")]
    FacebookIptc,
}

/// How the random parts of a name template are seeded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RenamePolicy {
    /// The uploaded name is kept.
    Unchanged,
    /// Seeded from content, profile and time.
    RandomToken,
    /// Date and time from the upload time, counters from content, profile
    /// and time.
    DateTime,
    /// Seeded from content only: every upload of an image gets one name.
    ContentDigest,
    /// Seeded from content and profile: stable per profile.
    PatternTable,
}

/// Measured behaviour of one social network.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SNChannelProfile {
    pub sn_id: String,
    pub name: String,
    pub default_resolution: (usize, usize),
    /// Bound for the large class when it differs from the default.
    #[serde(default)]
    pub large_resolution: Option<(usize, usize)>,
    /// Mean percentage size reduction, per resolution class.
    pub target_compression: PerClass<f64>,
    /// Calibrated encoder quality per class.
    #[serde(default)]
    pub jpeg_quality: PerClass<Option<u8>>,
    /// Qualities fixed by observation rather than calibration.
    #[serde(default)]
    pub pinned_quality: PerClass<Option<u8>>,
    /// Bytes pass through untouched.
    #[serde(default)]
    pub passthrough: bool,
    pub metadata_policy: MetadataPolicy,
    /// Exif keys kept by [`MetadataPolicy::KeepSubset`]; `None` keeps the
    /// camera-setting, description and layout categories.
    #[serde(default)]
    pub kept_keys: Option<Vec<String>>,
    pub rename_policy: RenamePolicy,
    /// Name pattern; see [`super::render_name`].
    #[serde(default)]
    pub name_template: String,
}

impl SNChannelProfile {
    pub fn resolution_class(&self, dims: (usize, usize)) -> ResolutionClass {
        let cap = orient_like(self.default_resolution, dims);
        if dims.0 > cap.0 || dims.1 > cap.1 {
            ResolutionClass::Large
        } else if dims.0 * dims.1 <= SMALL_CLASS_PIXELS {
            ResolutionClass::Small
        } else {
            ResolutionClass::Standard
        }
    }

    /// Output size for an input of `dims`.
    pub fn output_dimensions(&self, dims: (usize, usize)) -> (usize, usize) {
        if self.passthrough {
            return dims;
        }
        let cap = match self.resolution_class(dims) {
            ResolutionClass::Large => self.large_resolution.unwrap_or(self.default_resolution),
            _ => self.default_resolution,
        };
        fit_within(dims, cap)
    }

    /// Quality used for a class: pinned, then calibrated, then the fallback.
    pub fn quality(&self, class: ResolutionClass) -> u8 {
        self.pinned_quality
            .get(class)
            .or(self.jpeg_quality.get(class))
            .unwrap_or(FALLBACK_QUALITY)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| {
            Err(Error::InvalidParameter(format!(
                "profile {}: {m}",
                self.sn_id
            )))
        };
        if self.default_resolution.0 == 0 || self.default_resolution.1 == 0 {
            return bad("default resolution must be positive".into());
        }
        for class in ResolutionClass::ALL {
            for q in [self.jpeg_quality.get(class), self.pinned_quality.get(class)]
                .into_iter()
                .flatten()
            {
                if !(1..=100).contains(&q) {
                    return bad(format!("quality {q} outside 1..=100"));
                }
            }
        }
        if self.rename_policy != RenamePolicy::Unchanged && self.name_template.is_empty() {
            return bad("rename policy needs a name template".into());
        }
        Ok(())
    }
}

struct Row {
    id: &'static str,
    name: &'static str,
    res: (usize, usize),
    large: Option<(usize, usize)>,
    target: [f64; 3],
    quality: [u8; 3],
    policy: MetadataPolicy,
    rename: RenamePolicy,
    template: &'static str,
}

// Qualities come from `snmark calibrate --per-class 3 --seed 7` on the
// built-in synthetic calibration corpus.
const TABLE: &[Row] = &[
    Row {
        id: "SN01",
        name: "Facebook",
        res: (2048, 1152),
        large: None,
        target: [66.54, 91.30, 76.25],
        quality: [89, 92, 81],
        policy: MetadataPolicy::FacebookIptc,
        rename: RenamePolicy::RandomToken,
        template: "{d:8}_{d:14}_{d:16}_o",
    },
    Row {
        id: "SN02",
        name: "Flickr",
        res: (2048, 1152),
        large: None,
        target: [0.0, 0.0, 0.0],
        quality: [0, 0, 0],
        policy: MetadataPolicy::PreserveAll,
        rename: RenamePolicy::RandomToken,
        template: "{d:11}_{h:10}_o",
    },
    Row {
        id: "SN03",
        name: "Google+",
        res: (2048, 1152),
        large: None,
        target: [0.0, 0.0, 0.0],
        quality: [0, 0, 0],
        policy: MetadataPolicy::PreserveAll,
        rename: RenamePolicy::Unchanged,
        template: "",
    },
    Row {
        id: "SN04",
        name: "Instagram",
        res: (1080, 1080),
        large: Some((1350, 1080)),
        target: [31.94, 94.14, 64.32],
        quality: [92, 94, 88],
        policy: MetadataPolicy::KeepSubset,
        rename: RenamePolicy::RandomToken,
        template: "{d:8}_{d:13}_{d:16}_n",
    },
    Row {
        id: "SN05",
        name: "LinkedIn",
        res: (2048, 1152),
        large: None,
        target: [68.12, 67.39, 74.94],
        quality: [88, 98, 82],
        policy: MetadataPolicy::KeepSubset,
        rename: RenamePolicy::RandomToken,
        template: "{uuid}-original",
    },
    Row {
        id: "SN06",
        name: "Pinterest",
        res: (2048, 1152),
        large: Some((2064, 1161)),
        target: [46.04, 83.82, 52.96],
        quality: [91, 97, 91],
        policy: MetadataPolicy::KeepSubset,
        rename: RenamePolicy::ContentDigest,
        template: "{h:32}",
    },
    Row {
        id: "SN07",
        name: "Telegram",
        res: (1280, 720),
        large: None,
        target: [62.91, 95.55, 70.32],
        quality: [90, 93, 85],
        policy: MetadataPolicy::KeepSubset,
        rename: RenamePolicy::DateTime,
        template: "IMG_{date}_{time}",
    },
    Row {
        id: "SN08",
        name: "Tumblr",
        res: (1280, 720),
        large: Some((1920, 1080)),
        target: [30.42, 82.83, 35.37],
        quality: [93, 97, 92],
        policy: MetadataPolicy::RemoveThumbnails,
        rename: RenamePolicy::RandomToken,
        template: "tumblr_{a:19}_1280",
    },
    Row {
        id: "SN09",
        name: "Twitter",
        res: (2048, 1152),
        large: None,
        target: [53.27, 88.41, 57.12],
        quality: [91, 94, 90],
        policy: MetadataPolicy::EraseAll,
        rename: RenamePolicy::RandomToken,
        template: "{a:15}.jpg-large",
    },
    Row {
        id: "SN10",
        name: "Viber",
        res: (1280, 720),
        large: None,
        target: [59.72, 94.50, -46.50],
        quality: [90, 94, 100],
        policy: MetadataPolicy::KeepSubset,
        rename: RenamePolicy::RandomToken,
        template: "image-0-02-05-{l:65}-V",
    },
    Row {
        id: "SN11",
        name: "VK",
        res: (2560, 1440),
        large: None,
        target: [2.33, 79.17, 62.43],
        quality: [96, 95, 89],
        policy: MetadataPolicy::KeepSubset,
        rename: RenamePolicy::RandomToken,
        template: "{a:11}",
    },
    Row {
        id: "SN12",
        name: "WeChat",
        res: (1280, 720),
        large: None,
        target: [65.97, 96.07, 55.97],
        quality: [89, 91, 90],
        policy: MetadataPolicy::KeepSubset,
        rename: RenamePolicy::DateTime,
        template: "mmexport{ms}",
    },
    Row {
        id: "SN13",
        name: "WhatsApp",
        res: (1600, 1200),
        large: Some((1600, 900)),
        target: [58.49, 93.60, 70.59],
        quality: [90, 93, 84],
        policy: MetadataPolicy::KeepSubset,
        rename: RenamePolicy::DateTime,
        template: "IMG-{date}-WA{d:4}",
    },
];

/// The thirteen built-in profiles, `SN01` to `SN13`.
pub fn default_profiles() -> Vec<SNChannelProfile> {
    TABLE
        .iter()
        .map(|r| {
            let passthrough = r.target == [0.0; 3];
            let quality = |i: usize| (!passthrough).then_some(r.quality[i]);
            SNChannelProfile {
                sn_id: r.id.into(),
                name: r.name.into(),
                default_resolution: r.res,
                large_resolution: r.large,
                target_compression: PerClass::new(r.target[0], r.target[1], r.target[2]),
                jpeg_quality: PerClass::new(quality(0), quality(1), quality(2)),
                // observed switch to maximum quality on small images
                pinned_quality: PerClass::new(None, None, (r.name == "Viber").then_some(100)),
                passthrough,
                metadata_policy: r.policy,
                kept_keys: None,
                rename_policy: r.rename,
                name_template: r.template.into(),
            }
        })
        .collect()
}

/// Finds a profile by id (`SN04`) or name (case-insensitive).
pub fn find_profile<'a>(
    profiles: &'a [SNChannelProfile],
    key: &str,
) -> Result<&'a SNChannelProfile> {
    profiles
        .iter()
        .find(|p| p.sn_id.eq_ignore_ascii_case(key) || p.name.eq_ignore_ascii_case(key))
        .ok_or_else(|| Error::UnknownProfile(key.to_string()))
}

pub fn load_profiles(path: impl AsRef<Path>) -> Result<Vec<SNChannelProfile>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let profiles: Vec<SNChannelProfile> = serde_json::from_str(&text)?;
    for p in &profiles {
        p.validate()?;
    }
    Ok(profiles)
}

pub fn save_profiles(profiles: &[SNChannelProfile], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut text = serde_json::to_string_pretty(profiles)?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}
