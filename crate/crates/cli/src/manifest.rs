use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use snmark::image::decode_image;
use snmark::linkage::DeviceImages;

use crate::Failure;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Train,
    Test,
    Unassigned,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    /// Relative to the manifest's directory.
    pub path: String,
    pub camera_id: String,
    pub role: Role,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusManifest {
    pub seed: u64,
    pub entries: Vec<ManifestEntry>,
}

impl CorpusManifest {
    pub fn validate(&self) -> Result<(), Failure> {
        let mut seen = BTreeSet::new();
        for e in &self.entries {
            if !seen.insert(e.path.as_str()) {
                return Err(Failure::Domain(format!("manifest lists {} twice", e.path)));
            }
        }
        if self.entries.is_empty() {
            return Err(Failure::Domain("manifest has no entries".into()));
        }
        Ok(())
    }

    /// Camera ids in order of first appearance.
    pub fn cameras(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for e in &self.entries {
            if !out.contains(&e.camera_id) {
                out.push(e.camera_id.clone());
            }
        }
        out
    }

    pub fn load(path: &Path) -> Result<(Self, PathBuf), Failure> {
        let text = std::fs::read_to_string(path).map_err(|e| Failure::io(path, e))?;
        let manifest: CorpusManifest = serde_json::from_str(&text)
            .map_err(|e| Failure::Domain(format!("{}: {e}", path.display())))?;
        manifest.validate()?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok((manifest, base))
    }

    pub fn save(&self, path: &Path) -> Result<(), Failure> {
        let text =
            serde_json::to_string_pretty(self).map_err(|e| Failure::Domain(e.to_string()))?;
        std::fs::write(path, text + "\n").map_err(|e| Failure::io(path, e))
    }

    /// Decodes the images of every camera, keeping entries accepted by
    /// `keep`.
    pub fn devices(
        &self,
        base: &Path,
        keep: impl Fn(&ManifestEntry) -> bool,
    ) -> Result<Vec<DeviceImages>, Failure> {
        self.cameras()
            .into_iter()
            .map(|camera| {
                let images = self
                    .entries
                    .iter()
                    .filter(|e| e.camera_id == camera && keep(e))
                    .map(|e| {
                        let p = base.join(&e.path);
                        let bytes = std::fs::read(&p).map_err(|err| Failure::io(&p, err))?;
                        decode_image(&bytes).map_err(Failure::from)
                    })
                    .collect::<Result<Vec<_>, Failure>>()?;
                Ok(DeviceImages {
                    device_id: camera,
                    images,
                })
            })
            .collect()
    }
}
