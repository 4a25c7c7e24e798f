use rayon::prelude::*;

use super::{GridField, Window, MIN_DETECT_DIM};
use crate::morse::{CriticalPoint, MorseType};

/// Tunables for [`detect_with`].
#[derive(Debug, Clone, PartialEq)]
pub struct DetectConfig {
    /// Eigenvalue tolerance; `None` means `h²`.
    pub eps_lambda: Option<f64>,
    pub max_iter: usize,
    /// Local Hessians with a larger condition number are treated as singular.
    pub max_condition: f64,
    /// Only report points inside this window.
    pub region: Option<Window>,
}

impl Default for DetectConfig {
    fn default() -> Self {
        DetectConfig {
            eps_lambda: None,
            max_iter: 20,
            max_condition: 1e12,
            region: None,
        }
    }
}

/// Critical points of `field` with default settings.
pub fn detect(field: &GridField) -> Vec<CriticalPoint> {
    detect_with(field, &DetectConfig::default())
}

struct Candidate {
    point: CriticalPoint,
    grad_norm: f64,
    fallback: bool,
}

/// Locates critical points by sign changes of the central-difference gradient,
/// then polishes each candidate with Newton steps on the local biquadratic fit.
///
/// Points closer than `h` are merged, and anything inside the boundary margin
/// is dropped. The result is sorted by position.
pub fn detect_with(field: &GridField, cfg: &DetectConfig) -> Vec<CriticalPoint> {
    let (nx, ny) = field.dims();
    if nx < MIN_DETECT_DIM || ny < MIN_DETECT_DIM {
        return Vec::new();
    }
    let Some(((i0, i1), (j0, j1))) = field.valid_nodes() else {
        return Vec::new();
    };
    // gradient nodes must have unaffected neighbours
    let (gi0, gi1, gj0, gj1) = (i0 + 1, i1.saturating_sub(1), j0 + 1, j1.saturating_sub(1));
    if gi1 < gi0 + 1 || gj1 < gj0 + 1 {
        return Vec::new();
    }
    let h = field.h();
    let eps = cfg.eps_lambda.unwrap_or(h * h);
    let valid = Window::new(field.x(gi0), field.y(gj0), field.x(gi1), field.y(gj1));
    let gw = gi1 - gi0 + 1;
    let grads: Vec<[f64; 2]> = (gj0..=gj1)
        .into_par_iter()
        .flat_map_iter(|j| (gi0..=gi1).map(move |i| field.central_gradient(i, j)))
        .collect();
    let g = |i: usize, j: usize| grads[(j - gj0) * gw + (i - gi0)];

    let cells: Vec<(usize, usize)> = (gj0..gj1)
        .flat_map(|j| (gi0..gi1).map(move |i| (i, j)))
        .filter(|&(i, j)| {
            let c = [g(i, j), g(i + 1, j), g(i, j + 1), g(i + 1, j + 1)];
            (0..2).all(|k| {
                let lo = c.iter().map(|v| v[k]).fold(f64::INFINITY, f64::min);
                let hi = c.iter().map(|v| v[k]).fold(f64::NEG_INFINITY, f64::max);
                lo <= 0.0 && hi >= 0.0 && hi > lo
            })
        })
        .collect();

    let stencil = (gi0, gi1, gj0, gj1);
    let found: Vec<Candidate> = cells
        .par_iter()
        .filter_map(|&(i, j)| refine_cell(field, i, j, stencil, &valid, eps, cfg))
        .collect();

    let mut kept: Vec<Candidate> = Vec::new();
    for c in found {
        match kept
            .iter_mut()
            .find(|k| k.point.distance_to(c.point.position) <= h)
        {
            Some(k) => {
                if (k.fallback, k.grad_norm) > (c.fallback, c.grad_norm) {
                    *k = c;
                }
            }
            None => kept.push(c),
        }
    }
    let mut out: Vec<CriticalPoint> = kept
        .into_iter()
        .map(|c| c.point)
        .filter(|p| cfg.region.is_none_or(|r| r.contains(p.position)))
        .collect();
    out.sort_by(|a, b| {
        a.position[0]
            .total_cmp(&b.position[0])
            .then(a.position[1].total_cmp(&b.position[1]))
    });
    out
}

fn refine_cell(
    field: &GridField,
    i: usize,
    j: usize,
    (gi0, gi1, gj0, gj1): (usize, usize, usize, usize),
    valid: &Window,
    eps: f64,
    cfg: &DetectConfig,
) -> Option<Candidate> {
    let h = field.h();
    let centre = [field.x(i) + 0.5 * h, field.y(j) + 0.5 * h];
    let fit_at = |p: [f64; 2]| {
        let ci = ((p[0] - field.origin()[0]) / h)
            .round()
            .clamp(gi0 as f64, gi1 as f64) as usize;
        let cj = ((p[1] - field.origin()[1]) / h)
            .round()
            .clamp(gj0 as f64, gj1 as f64) as usize;
        field.fit_at_node(ci, cj, p[0], p[1])
    };
    let mut p = centre;
    let mut converged = false;
    let mut fallback = false;
    for iter in 0..cfg.max_iter {
        let fit = fit_at(p);
        let step = if fit.hessian.condition_number() > cfg.max_condition {
            None
        } else {
            fit.hessian.solve(fit.gradient)
        };
        let Some(d) = step else {
            // a singular start is hopeless; later iterates are already close
            fallback = true;
            if iter == 0 {
                p = centre;
            }
            break;
        };
        let mut d = [-d[0], -d[1]];
        let big = d[0].abs().max(d[1].abs());
        if big > h {
            d = [d[0] * h / big, d[1] * h / big];
        }
        p = [p[0] + d[0], p[1] + d[1]];
        if d[0].hypot(d[1]) <= 1e-10 * h {
            converged = true;
            break;
        }
    }
    if !valid.contains(p) {
        return None;
    }
    let near_cell = (p[0] - centre[0]).abs() <= h && (p[1] - centre[1]).abs() <= h;
    if !(converged || fallback || near_cell) {
        return None;
    }
    let fit = fit_at(p);
    let mut point = CriticalPoint::from_hessian(p, field.s(), fit.value, fit.hessian, eps);
    if fallback {
        point.morse = MorseType::Degenerate;
    }
    Some(Candidate {
        point,
        grad_norm: fit.gradient[0].hypot(fit.gradient[1]),
        fallback,
    })
}
