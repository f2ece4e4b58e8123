use chrono::DateTime;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha1::{Digest, Sha1};

use super::profile::{
    MetadataPolicy, RenamePolicy, ResolutionClass, SNChannelProfile, ORIGINAL_QUALITY,
};
use crate::diff::{exif_category, ExifCategory, MetadataMap, Namespace};
use crate::error::Result;
use crate::image::{decode_image, encode_jpeg_with_segments, resize, ImageBuffer};

pub const SPECIAL_INSTRUCTIONS: &str = "SpecialInstructions";
pub const CURRENT_IPTC_DIGEST: &str = "CurrentIPTCDigest";
pub const ORIGINAL_TRANSMISSION_REFERENCE: &str = "OriginalTransmissionReference";

const IPTC_KEY: &[u8] = b"snmark/iptc/v1";

/// Who uploads and when.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UploadContext {
    pub profile_id: String,
    /// Seconds since the Unix epoch.
    pub timestamp: i64,
}

impl UploadContext {
    pub fn new(profile_id: impl Into<String>, timestamp: i64) -> Self {
        UploadContext {
            profile_id: profile_id.into(),
            timestamp,
        }
    }
}

/// A downloaded image as the network serves it.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelOutput {
    /// Decoded pixels; the encoded file is in `image.source_bytes()`.
    pub image: ImageBuffer,
    pub metadata: MetadataMap,
    pub name: String,
    pub class: ResolutionClass,
}

impl ChannelOutput {
    pub fn bytes(&self) -> &[u8] {
        self.image.source_bytes().unwrap_or_default()
    }
}

/// SHA-1 over dimensions, layout and samples.
pub fn content_digest(img: &ImageBuffer) -> [u8; 20] {
    let mut h = Sha1::new();
    h.update((img.width() as u64).to_le_bytes());
    h.update((img.height() as u64).to_le_bytes());
    h.update([img.channels() as u8]);
    h.update(img.pixels());
    h.finalize().into()
}

fn keyed(parts: &[&[u8]]) -> [u8; 20] {
    let mut h = Sha1::new();
    h.update(IPTC_KEY);
    for p in parts {
        h.update((p.len() as u64).to_le_bytes());
        h.update(p);
    }
    h.finalize().into()
}

/// Adds the three IPTC fields Facebook writes.
///
/// `SpecialInstructions` depends on the content only; the digest and the
/// transmission reference also depend on the uploading profile and time.
pub fn facebook_iptc(meta: &MetadataMap, content: &[u8; 20], ctx: &UploadContext) -> MetadataMap {
    let mut out = meta.clone();
    let ts = ctx.timestamp.to_le_bytes();
    let profile = ctx.profile_id.as_bytes();
    let si = keyed(&[b"si", content]);
    out.insert(
        Namespace::Iptc,
        SPECIAL_INSTRUCTIONS,
        format!("FBMD01000{}", &hex::encode(si)[..31]).into_bytes(),
    );
    let otr = keyed(&[b"otr", content, profile, &ts]);
    out.insert(
        Namespace::Iptc,
        ORIGINAL_TRANSMISSION_REFERENCE,
        hex::encode(otr).as_bytes()[..20].to_vec(),
    );
    let digest = keyed(&[b"digest", content, profile, &ts]);
    out.insert(Namespace::Iptc, CURRENT_IPTC_DIGEST, digest[..16].to_vec());
    out
}

fn keep_subset(meta: &MetadataMap, kept: Option<&[String]>) -> MetadataMap {
    let mut out = meta.clone();
    out.retain(|e| {
        e.namespace == Namespace::Exif
            && match kept {
                Some(keys) => keys.contains(&e.key),
                None => matches!(
                    exif_category(&e.key),
                    ExifCategory::CameraSettings
                        | ExifCategory::Description
                        | ExifCategory::Structure
                ),
            }
    });
    out
}

/// Applies a profile's metadata policy.
pub fn transform_metadata(
    meta: &MetadataMap,
    profile: &SNChannelProfile,
    content: &[u8; 20],
    ctx: &UploadContext,
) -> MetadataMap {
    match profile.metadata_policy {
        MetadataPolicy::PreserveAll => meta.clone(),
        MetadataPolicy::EraseAll => MetadataMap::new(),
        MetadataPolicy::RemoveThumbnails => {
            let mut out = meta.clone();
            out.retain(|e| {
                !(e.namespace == Namespace::Exif
                    && exif_category(&e.key) == ExifCategory::Thumbnail)
            });
            out
        }
        MetadataPolicy::KeepSubset => keep_subset(meta, profile.kept_keys.as_deref()),
        MetadataPolicy::FacebookIptc => facebook_iptc(
            &keep_subset(meta, profile.kept_keys.as_deref()),
            content,
            ctx,
        ),
    }
}

const ALNUM: &[u8] = b"ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789";
const LOWER_ALNUM: &[u8] = b"abcdefghijklmnopqrstuvwxyz0123456789";
const HEX: &[u8] = b"0123456789abcdef";

fn draw(rng: &mut ChaCha8Rng, alphabet: &[u8], n: usize) -> String {
    (0..n)
        .map(|_| alphabet[rng.random_range(0..alphabet.len())] as char)
        .collect()
}

/// Expands a name template.
///
/// Placeholders: `{d:N}` digits (no leading zero), `{h:N}` lowercase hex,
/// `{a:N}` letters and digits, `{l:N}` lowercase letters and digits, `{b:N}`
/// uppercase letters, `{uuid}`, and from the timestamp `{date}` (YYYYMMDD),
/// `{time}` (HHMMSS) and `{ms}` (epoch milliseconds). Anything else is copied
/// literally.
pub fn render_name(template: &str, seed: u64, timestamp: i64) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let when = DateTime::from_timestamp(timestamp, 0).unwrap_or_default();
    let mut out = String::new();
    let mut rest = template;
    while let Some(open) = rest.find('{') {
        out.push_str(&rest[..open]);
        let Some(close) = rest[open..].find('}') else {
            out.push_str(&rest[open..]);
            return out;
        };
        let token = &rest[open + 1..open + close];
        let expanded = match token.split_once(':') {
            Some((kind, n)) => match (kind, n.parse::<usize>()) {
                ("d", Ok(n)) if n > 0 => {
                    let first = (b'1' + rng.random_range(0..9u8)) as char;
                    format!("{first}{}", draw(&mut rng, b"0123456789", n - 1))
                }
                ("h", Ok(n)) => draw(&mut rng, HEX, n),
                ("a", Ok(n)) => draw(&mut rng, ALNUM, n),
                ("l", Ok(n)) => draw(&mut rng, LOWER_ALNUM, n),
                ("b", Ok(n)) => draw(&mut rng, &ALNUM[..26], n),
                _ => format!("{{{token}}}"),
            },
            None => match token {
                "date" => when.format("%Y%m%d").to_string(),
                "time" => when.format("%H%M%S").to_string(),
                "ms" => format!("{}", timestamp.saturating_mul(1000)),
                "uuid" => {
                    let h = draw(&mut rng, HEX, 32);
                    format!(
                        "{}-{}-4{}-{}-{}",
                        &h[..8],
                        &h[8..12],
                        &h[13..16],
                        &h[16..20],
                        &h[20..]
                    )
                }
                _ => format!("{{{token}}}"),
            },
        };
        out.push_str(&expanded);
        rest = &rest[open + close + 1..];
    }
    out.push_str(rest);
    out
}

fn seed_of(parts: &[&[u8]]) -> u64 {
    let mut h = Sha1::new();
    for p in parts {
        h.update((p.len() as u64).to_le_bytes());
        h.update(p);
    }
    u64::from_le_bytes(h.finalize()[..8].try_into().unwrap())
}

/// Name the network gives to an upload.
pub fn rename(
    name: &str,
    profile: &SNChannelProfile,
    content: &[u8; 20],
    ctx: &UploadContext,
) -> String {
    let ts = ctx.timestamp.to_le_bytes();
    let profile_id = ctx.profile_id.as_bytes();
    let seed = match profile.rename_policy {
        RenamePolicy::Unchanged => return name.to_string(),
        RenamePolicy::RandomToken | RenamePolicy::DateTime => seed_of(&[content, profile_id, &ts]),
        RenamePolicy::ContentDigest => seed_of(&[content]),
        RenamePolicy::PatternTable => seed_of(&[content, profile_id]),
    };
    let stem = render_name(&profile.name_template, seed, ctx.timestamp);
    if stem.contains('.') {
        stem
    } else {
        format!("{stem}.jpg")
    }
}

/// Simulates uploading `img` (with metadata `meta`, file name `name`) and
/// downloading it again.
///
/// Pass-through profiles return the encoded source untouched; an image with
/// no source is first written as an original would be.
pub fn apply_channel(
    img: &ImageBuffer,
    meta: &MetadataMap,
    name: &str,
    profile: &SNChannelProfile,
    ctx: &UploadContext,
) -> Result<ChannelOutput> {
    let content = content_digest(img);
    let class = profile.resolution_class(img.dimensions());
    let new_name = rename(name, profile, &content, ctx);
    let new_meta = transform_metadata(meta, profile, &content, ctx);
    if profile.passthrough {
        let image = match img.source() {
            Some(_) => img.clone(),
            None => decode_image(&encode_jpeg_with_segments(
                img,
                ORIGINAL_QUALITY,
                &meta.to_jpeg_segments(),
            )?)?,
        };
        return Ok(ChannelOutput {
            image,
            metadata: new_meta,
            name: new_name,
            class,
        });
    }
    let (w, h) = profile.output_dimensions(img.dimensions());
    let resized = resize(img, w, h)?;
    let bytes = encode_jpeg_with_segments(
        &resized,
        profile.quality(class),
        &new_meta.to_jpeg_segments(),
    )?;
    Ok(ChannelOutput {
        image: decode_image(&bytes)?,
        metadata: new_meta,
        name: new_name,
        class,
    })
}

/// Re-shares an already uploaded image from another profile. The network
/// serves the stored file, so bytes, metadata and name are preserved.
pub fn share(output: &ChannelOutput, _ctx: &UploadContext) -> ChannelOutput {
    output.clone()
}
