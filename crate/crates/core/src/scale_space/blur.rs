use log::warn;
use rayon::prelude::*;

use super::{GridField, ScaleSpaceError};

/// Kernel support in standard deviations.
const TRUNCATION: f64 = 4.0;

/// Symmetric discrete Gaussian taps `w[0..=r]` for standard deviation `sigma` on spacing `h`.
///
/// The support is `r = ceil(4σ/h)` cells. The taps are normalized to unit
/// mass and their width parameter is tuned so the discrete second moment is
/// exactly `σ²`; truncation then leaves polynomials up to degree three exact.
pub fn gaussian_kernel(sigma: f64, h: f64) -> Vec<f64> {
    let r = (TRUNCATION * sigma / h).ceil() as usize;
    let taps = |tau: f64| -> Vec<f64> {
        (0..=r)
            .map(|k| {
                let d = k as f64 * h / tau;
                (-0.5 * d * d).exp()
            })
            .collect()
    };
    let moments = |w: &[f64]| -> (f64, f64) {
        let mut mass = w[0];
        let mut second = 0.0;
        for (k, &wk) in w.iter().enumerate().skip(1) {
            let d = k as f64 * h;
            mass += 2.0 * wk;
            second += 2.0 * wk * d * d;
        }
        (mass, second / mass)
    };
    let target = sigma * sigma;
    let (mut lo, mut hi) = (sigma * 0.25, sigma * 4.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if moments(&taps(mid)).1 < target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-16 * hi {
            break;
        }
    }
    let w = taps(0.5 * (lo + hi));
    let (mass, _) = moments(&w);
    w.into_iter().map(|v| v / mass).collect()
}

/// Advances `field` by `ds` in scale: separable convolution with a Gaussian of
/// per-axis standard deviation `√(2·ds)`.
///
/// Near the border the missing taps are dropped and the rest renormalized;
/// the affected band of `ceil(4σ/h)` cells is added to the field margin. A
/// kernel narrower than half a cell leaves the values untouched and sets
/// [`GridField::under_resolved`].
pub fn blur(field: &GridField, ds: f64) -> Result<GridField, ScaleSpaceError> {
    if !(ds >= 0.0) || !ds.is_finite() {
        return Err(ScaleSpaceError::NegativeScale(ds));
    }
    let s = field.s() + ds;
    if ds == 0.0 {
        return Ok(field
            .clone()
            .with_meta(s, field.margin(), field.under_resolved()));
    }
    let sigma = (2.0 * ds).sqrt();
    let h = field.h();
    if sigma < 0.5 * h {
        warn!("blur kernel under-resolved: sigma {sigma:.3e} below half of h {h:.3e}");
        return Ok(field.clone().with_meta(s, field.margin(), true));
    }
    let w = gaussian_kernel(sigma, h);
    let r = w.len() - 1;
    let (nx, ny) = field.dims();
    let src = field.values();

    let mut tmp = vec![0.0; nx * ny];
    tmp.par_chunks_mut(nx).enumerate().for_each(|(j, out)| {
        let row = &src[j * nx..(j + 1) * nx];
        for (i, o) in out.iter_mut().enumerate() {
            *o = convolve_at(i, nx, r, &w, |k| row[k]);
        }
    });

    let mut values = vec![0.0; nx * ny];
    values.par_chunks_mut(nx).enumerate().for_each(|(j, out)| {
        for (i, o) in out.iter_mut().enumerate() {
            *o = convolve_at(j, ny, r, &w, |k| tmp[k * nx + i]);
        }
    });

    let out = GridField::new(field.origin(), h, nx, ny, values, s)?;
    Ok(out.with_meta(s, field.margin() + r, field.under_resolved()))
}

#[inline]
fn convolve_at(c: usize, n: usize, r: usize, w: &[f64], at: impl Fn(usize) -> f64) -> f64 {
    let lo = c.saturating_sub(r);
    let hi = (c + r).min(n - 1);
    let mut acc = 0.0;
    let mut mass = 0.0;
    for k in lo..=hi {
        let wk = w[k.abs_diff(c)];
        acc += wk * at(k);
        mass += wk;
    }
    acc / mass
}
