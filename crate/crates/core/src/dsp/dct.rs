//! Orthonormal 8x8 DCT-II, the same scaling JPEG uses for its blocks.

use std::sync::OnceLock;

pub const BLOCK: usize = 8;

fn basis() -> &'static [[f64; BLOCK]; BLOCK] {
    static TABLE: OnceLock<[[f64; BLOCK]; BLOCK]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = [[0.0; BLOCK]; BLOCK];
        for (u, row) in t.iter_mut().enumerate() {
            let cu = if u == 0 {
                (1.0 / BLOCK as f64).sqrt()
            } else {
                (2.0 / BLOCK as f64).sqrt()
            };
            for (x, v) in row.iter_mut().enumerate() {
                *v = cu
                    * (((2 * x + 1) * u) as f64 * std::f64::consts::PI / (2 * BLOCK) as f64).cos();
            }
        }
        t
    })
}

/// Forward transform; `block[y][x]` in, `coeffs[v][u]` out.
pub fn forward_8x8(block: &[[f64; BLOCK]; BLOCK]) -> [[f64; BLOCK]; BLOCK] {
    let b = basis();
    let mut tmp = [[0.0; BLOCK]; BLOCK];
    for y in 0..BLOCK {
        for u in 0..BLOCK {
            tmp[y][u] = (0..BLOCK).map(|x| b[u][x] * block[y][x]).sum();
        }
    }
    let mut out = [[0.0; BLOCK]; BLOCK];
    for v in 0..BLOCK {
        for u in 0..BLOCK {
            out[v][u] = (0..BLOCK).map(|y| b[v][y] * tmp[y][u]).sum();
        }
    }
    out
}

pub fn inverse_8x8(coeffs: &[[f64; BLOCK]; BLOCK]) -> [[f64; BLOCK]; BLOCK] {
    let b = basis();
    let mut tmp = [[0.0; BLOCK]; BLOCK];
    for v in 0..BLOCK {
        for x in 0..BLOCK {
            tmp[v][x] = (0..BLOCK).map(|u| b[u][x] * coeffs[v][u]).sum();
        }
    }
    let mut out = [[0.0; BLOCK]; BLOCK];
    for y in 0..BLOCK {
        for x in 0..BLOCK {
            out[y][x] = (0..BLOCK).map(|v| b[v][y] * tmp[v][x]).sum();
        }
    }
    out
}
