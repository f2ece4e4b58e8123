//! Orthogonal 2-D discrete wavelet transform with periodic extension.
//!
//! Coefficients are stored in place in the usual Mallat layout: after one
//! level on a `w x h` plane the top-left `w/2 x h/2` quadrant holds the
//! approximation, the top-right the horizontal detail, the bottom-left the
//! vertical detail and the bottom-right the diagonal detail.

/// Filter bank choice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Wavelet {
    Haar,
    /// Daubechies with four vanishing moments (8 taps).
    Db4,
}

const HAAR: [f64; 2] = [
    std::f64::consts::FRAC_1_SQRT_2,
    std::f64::consts::FRAC_1_SQRT_2,
];

const DB4: [f64; 8] = [
    0.230_377_813_308_896_4,
    0.714_846_570_552_915_4,
    0.630_880_767_929_858_7,
    -0.027_983_769_416_859_9,
    -0.187_034_811_719_093_1,
    0.030_841_381_835_560_7,
    0.032_883_011_666_885_2,
    -0.010_597_401_785_069_0,
];

impl Wavelet {
    pub fn lowpass(self) -> &'static [f64] {
        match self {
            Wavelet::Haar => &HAAR,
            Wavelet::Db4 => &DB4,
        }
    }

    /// Quadrature mirror of the low-pass filter: `g[n] = (-1)^n h[L-1-n]`.
    pub fn highpass(self) -> Vec<f64> {
        let h = self.lowpass();
        let l = h.len();
        (0..l)
            .map(|n| {
                if n % 2 == 0 {
                    h[l - 1 - n]
                } else {
                    -h[l - 1 - n]
                }
            })
            .collect()
    }
}

/// One analysis step on a strided 1-D signal of even length `n`.
fn analyze(signal: &[f64], low: &[f64], high: &[f64], out: &mut [f64]) {
    let n = signal.len();
    let half = n / 2;
    for k in 0..half {
        let (mut a, mut d) = (0.0, 0.0);
        for (t, (&hl, &hh)) in low.iter().zip(high).enumerate() {
            let x = signal[(2 * k + t) % n];
            a += hl * x;
            d += hh * x;
        }
        out[k] = a;
        out[half + k] = d;
    }
}

fn synthesize(coeffs: &[f64], low: &[f64], high: &[f64], out: &mut [f64]) {
    let n = coeffs.len();
    let half = n / 2;
    out.iter_mut().for_each(|v| *v = 0.0);
    for k in 0..half {
        let (a, d) = (coeffs[k], coeffs[half + k]);
        for (t, (&hl, &hh)) in low.iter().zip(high).enumerate() {
            out[(2 * k + t) % n] += hl * a + hh * d;
        }
    }
}

/// In-place multi-level forward transform of a `width x height` plane.
///
/// Both dimensions must be divisible by `2^levels`.
pub fn forward_2d(data: &mut [f64], width: usize, height: usize, levels: usize, wavelet: Wavelet) {
    assert_eq!(data.len(), width * height);
    assert!(width.is_multiple_of(1 << levels) && height.is_multiple_of(1 << levels));
    let low = wavelet.lowpass();
    let high = wavelet.highpass();
    let (mut w, mut h) = (width, height);
    let mut line = vec![0.0; width.max(height)];
    let mut out = vec![0.0; width.max(height)];
    for _ in 0..levels {
        for y in 0..h {
            let row = &mut data[y * width..y * width + w];
            line[..w].copy_from_slice(row);
            analyze(&line[..w], low, &high, &mut out[..w]);
            row.copy_from_slice(&out[..w]);
        }
        for x in 0..w {
            for y in 0..h {
                line[y] = data[y * width + x];
            }
            analyze(&line[..h], low, &high, &mut out[..h]);
            for y in 0..h {
                data[y * width + x] = out[y];
            }
        }
        w /= 2;
        h /= 2;
    }
}

/// Inverse of [`forward_2d`].
pub fn inverse_2d(data: &mut [f64], width: usize, height: usize, levels: usize, wavelet: Wavelet) {
    assert_eq!(data.len(), width * height);
    let low = wavelet.lowpass();
    let high = wavelet.highpass();
    let mut line = vec![0.0; width.max(height)];
    let mut out = vec![0.0; width.max(height)];
    for level in (0..levels).rev() {
        let (w, h) = (width >> level, height >> level);
        for x in 0..w {
            for y in 0..h {
                line[y] = data[y * width + x];
            }
            synthesize(&line[..h], low, &high, &mut out[..h]);
            for y in 0..h {
                data[y * width + x] = out[y];
            }
        }
        for y in 0..h {
            let row = &mut data[y * width..y * width + w];
            line[..w].copy_from_slice(row);
            synthesize(&line[..w], low, &high, &mut out[..w]);
            row.copy_from_slice(&out[..w]);
        }
    }
}

/// True for positions that hold detail (not approximation) coefficients
/// after `levels` forward steps.
pub fn is_detail(x: usize, y: usize, width: usize, height: usize, levels: usize) -> bool {
    !(x < width >> levels && y < height >> levels)
}

/// Mirror-pads a plane so both sides are multiples of `multiple`.
pub fn pad_symmetric(
    data: &[f64],
    width: usize,
    height: usize,
    multiple: usize,
) -> (Vec<f64>, usize, usize) {
    let pw = width.div_ceil(multiple) * multiple;
    let ph = height.div_ceil(multiple) * multiple;
    if (pw, ph) == (width, height) {
        return (data.to_vec(), width, height);
    }
    let reflect = |i: usize, n: usize| -> usize {
        // period 2n reflection: n, n+1, ... map to n-1, n-2, ...
        let m = i % (2 * n);
        if m < n {
            m
        } else {
            2 * n - 1 - m
        }
    };
    let mut out = Vec::with_capacity(pw * ph);
    for y in 0..ph {
        let sy = reflect(y, height);
        for x in 0..pw {
            out.push(data[sy * width + reflect(x, width)]);
        }
    }
    (out, pw, ph)
}

/// Top-left `width x height` window of a padded plane.
pub fn crop(data: &[f64], padded_width: usize, width: usize, height: usize) -> Vec<f64> {
    (0..height)
        .flat_map(|y| {
            data[y * padded_width..y * padded_width + width]
                .iter()
                .copied()
        })
        .collect()
}
