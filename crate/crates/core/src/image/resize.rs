use super::buffer::ImageBuffer;
use super::luma::LumaPlane;
use crate::error::{Error, Result};

/// Source coordinate and blend weight for each output index along one axis.
///
/// Pixel centres are aligned: output `i` samples input `(i + 0.5) * scale - 0.5`.
fn axis_taps(src: usize, dst: usize) -> Vec<(usize, usize, f64)> {
    let scale = src as f64 / dst as f64;
    (0..dst)
        .map(|i| {
            let pos = ((i as f64 + 0.5) * scale - 0.5).clamp(0.0, (src - 1) as f64);
            let lo = pos.floor() as usize;
            let hi = (lo + 1).min(src - 1);
            (lo, hi, pos - lo as f64)
        })
        .collect()
}

fn check_dims(w: usize, h: usize) -> Result<()> {
    if w == 0 || h == 0 {
        return Err(Error::InvalidParameter(format!(
            "resize target {w}x{h} must be positive"
        )));
    }
    Ok(())
}

/// Bilinear resampling to `new_width` x `new_height`.
pub fn resize(img: &ImageBuffer, new_width: usize, new_height: usize) -> Result<ImageBuffer> {
    check_dims(new_width, new_height)?;
    if img.dimensions() == (new_width, new_height) {
        return Ok(img.clone().into_raw());
    }
    let ch = img.channels();
    let src = img.pixels();
    let stride = img.width() * ch;
    let xs = axis_taps(img.width(), new_width);
    let ys = axis_taps(img.height(), new_height);
    let mut out = Vec::with_capacity(new_width * new_height * ch);
    for &(y0, y1, fy) in &ys {
        for &(x0, x1, fx) in &xs {
            for c in 0..ch {
                let p = |x: usize, y: usize| src[y * stride + x * ch + c] as f64;
                let top = p(x0, y0) * (1.0 - fx) + p(x1, y0) * fx;
                let bottom = p(x0, y1) * (1.0 - fx) + p(x1, y1) * fx;
                let v = top * (1.0 - fy) + bottom * fy;
                out.push((v + 0.5).floor().clamp(0.0, 255.0) as u8);
            }
        }
    }
    ImageBuffer::new(new_width, new_height, img.layout(), out)
}

/// Bilinear resampling of a real-valued plane (no rounding).
pub fn resize_plane(plane: &LumaPlane, new_width: usize, new_height: usize) -> Result<LumaPlane> {
    check_dims(new_width, new_height)?;
    if plane.dimensions() == (new_width, new_height) {
        return Ok(plane.clone());
    }
    let xs = axis_taps(plane.width(), new_width);
    let ys = axis_taps(plane.height(), new_height);
    let mut out = Vec::with_capacity(new_width * new_height);
    for &(y0, y1, fy) in &ys {
        for &(x0, x1, fx) in &xs {
            let top = plane.get(x0, y0) * (1.0 - fx) + plane.get(x1, y0) * fx;
            let bottom = plane.get(x0, y1) * (1.0 - fx) + plane.get(x1, y1) * fx;
            out.push(top * (1.0 - fy) + bottom * fy);
        }
    }
    LumaPlane::new(new_width, new_height, out)
}

/// Largest size with the same aspect ratio that fits inside `cap`.
///
/// The cap is matched to the image orientation, so a portrait image is
/// compared against the transposed cap.
pub fn fit_within(dims: (usize, usize), cap: (usize, usize)) -> (usize, usize) {
    let (w, h) = dims;
    let (cw, ch) = orient_like(cap, dims);
    if w <= cw && h <= ch {
        return dims;
    }
    let scale = (cw as f64 / w as f64).min(ch as f64 / h as f64);
    (
        ((w as f64 * scale).round() as usize).clamp(1, cw),
        ((h as f64 * scale).round() as usize).clamp(1, ch),
    )
}

/// Swaps `size` so its long side lies along the same axis as in `like`.
pub fn orient_like(size: (usize, usize), like: (usize, usize)) -> (usize, usize) {
    let (a, b) = (size.0.max(size.1), size.0.min(size.1));
    if like.0 >= like.1 {
        (a, b)
    } else {
        (b, a)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::image::ChannelLayout;

    #[test]
    fn identity_size_is_pixel_identical() {
        let img = ImageBuffer::new(3, 2, ChannelLayout::Gray8, vec![1, 2, 3, 4, 5, 6]).unwrap();
        assert_eq!(resize(&img, 3, 2).unwrap().pixels(), img.pixels());
    }

    #[test]
    fn checkerboard_averages_to_128() {
        let img = ImageBuffer::new(2, 2, ChannelLayout::Gray8, vec![0, 255, 255, 0]).unwrap();
        assert_eq!(resize(&img, 1, 1).unwrap().pixels(), &[128]);
    }

    #[test]
    fn solid_colour_is_preserved() {
        let img = ImageBuffer::new(5, 7, ChannelLayout::Rgb8, [12u8, 200, 77].repeat(35)).unwrap();
        for (w, h) in [(1, 1), (3, 11), (10, 14)] {
            let out = resize(&img, w, h).unwrap();
            assert!(out.pixels().chunks(3).all(|p| p == [12, 200, 77]));
        }
    }

    #[test]
    fn fit_keeps_aspect() {
        assert_eq!(fit_within((4128, 2322), (2048, 1152)), (2048, 1152));
        assert_eq!(fit_within((2322, 4128), (2048, 1152)), (1152, 2048));
        assert_eq!(fit_within((640, 480), (2048, 1152)), (640, 480));
        assert_eq!(fit_within((4000, 4000), (1280, 720)), (720, 720));
    }
}
