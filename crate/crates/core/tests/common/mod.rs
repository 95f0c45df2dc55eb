//! Oracles shared by the integration tests.
#![allow(dead_code)]

use causal_diffusion::forward::Grid2D;
use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Fractional bits of the fixed-point oracle.
const FRACTION_BITS: i64 = 320;

fn to_fixed(t: f64) -> BigInt {
    // t = mantissa · 2^exponent exactly
    let bits = t.to_bits();
    let exp_field = ((bits >> 52) & 0x7ff) as i64;
    let frac = bits & ((1u64 << 52) - 1);
    let (mantissa, exponent) = if exp_field == 0 {
        (frac, -1074)
    } else {
        (frac | (1u64 << 52), exp_field - 1075)
    };
    let m = BigInt::from(mantissa);
    let shift = FRACTION_BITS + exponent;
    if shift >= 0 {
        m << shift as usize
    } else {
        m >> (-shift) as usize
    }
}

fn from_fixed(x: &BigInt) -> f64 {
    let scaled: BigInt = x >> (FRACTION_BITS - 64) as usize;
    let v = i128::try_from(&scaled).expect("oracle value in range");
    v as f64 / 2f64.powi(64)
}

/// `Σ (-1)^j a_{2j} t^{2j}` summed in 320-bit fixed point.
pub fn series_oracle(n: u32, t: f64) -> f64 {
    let one = BigInt::from(1) << FRACTION_BITS as usize;
    let tf = to_fixed(t);
    let t2: BigInt = (&tf * &tf) >> FRACTION_BITS as usize;
    let negligible = BigInt::from(1) << (FRACTION_BITS - 200) as usize;
    let mut term = one.clone();
    let mut sum = one;
    let mut j: u64 = 1;
    loop {
        term = (&term * &t2) >> FRACTION_BITS as usize;
        term /= BigInt::from((2 * j) * (n as u64 + 2 * j - 2));
        if j % 2 == 1 {
            sum -= &term;
        } else {
            sum += &term;
        }
        if (j as f64) > t && term < negligible {
            break;
        }
        j += 1;
    }
    from_fixed(&sum)
}

/// Uniform `[0, 1)` values from a seeded ChaCha8 stream.
pub fn random_grid(rows: usize, cols: usize, dx: f64, seed: u64) -> Grid2D {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Grid2D::from_fn(rows, cols, dx, |_, _| rng.gen::<f64>()).unwrap()
}

/// Composite Simpson rule on `[a, b]` with step close to `h`, summed in
/// fixed-size panels blocks so memory stays flat.
pub fn simpson<F: Fn(f64) -> f64 + Sync + Send>(f: F, a: f64, b: f64, h: f64) -> f64 {
    const BLOCK: usize = 4096;
    let panels = (((b - a) / h) / 2.0).ceil().max(1.0) as usize;
    let h = (b - a) / (2 * panels) as f64;
    let blocks = panels.div_ceil(BLOCK);
    let partial = causal_diffusion::exec::map_indices(blocks, |blk| {
        let mut acc = 0.0;
        for p in blk * BLOCK..((blk + 1) * BLOCK).min(panels) {
            let x0 = a + (2 * p) as f64 * h;
            acc += f(x0) + 4.0 * f(x0 + h) + f(x0 + 2.0 * h);
        }
        acc
    });
    partial.iter().sum::<f64>() * h / 3.0
}

/// Low-frequency cosine modes `(jx, jy, amplitude)` plus an offset.
pub fn band_limited(n: usize, dx: f64, offset: f64, modes: &[(i32, i32, f64)]) -> Grid2D {
    use std::f64::consts::PI;
    Grid2D::from_fn(n, n, dx, |r, c| {
        offset
            + modes
                .iter()
                .map(|&(jx, jy, a)| {
                    a * (2.0 * PI * (jx as f64 * c as f64 + jy as f64 * r as f64) / n as f64).cos()
                })
                .sum::<f64>()
    })
    .unwrap()
}

pub fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    v[v.len() / 2]
}
