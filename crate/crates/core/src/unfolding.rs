//! The elliptic umbilic unfolding `g(x, y) = x³ − 6xy² + wx² + ux + vy + c`.
//!
//! Critical points come from eliminating `y = v / (12x)`, which leaves the
//! quartic `3x⁴ + 2wx³ + ux² − v²/24 = 0`; the case `v = 0` is solved on its two
//! exact branches instead. The degeneracy locus (the discriminant) is the
//! three-cusped curve traced by `∇g = 0, det H = 0`. The worked example sits in
//! this picture along the line `w = 1/2, u = 1/12 − 6s, c = s + 1/216`.

use nalgebra::Matrix4;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

use crate::morse::{classify_eigenvalues, MorseType, SymMat2, EPS_LAMBDA};
use crate::poly::{damon_family, int, rat, Polynomial, Rational, Var};

/// Unfolding coordinates `(w, u, v)` and additive constant `c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UnfoldingParams {
    pub w: f64,
    pub u: f64,
    pub v: f64,
    pub c: f64,
}

impl UnfoldingParams {
    pub fn new(w: f64, u: f64, v: f64) -> Self {
        UnfoldingParams { w, u, v, c: 0.0 }
    }

    pub fn with_constant(mut self, c: f64) -> Self {
        self.c = c;
        self
    }

    pub fn value(&self, x: f64, y: f64) -> f64 {
        x * x * x - 6.0 * x * y * y + self.w * x * x + self.u * x + self.v * y + self.c
    }

    pub fn gradient(&self, x: f64, y: f64) -> [f64; 2] {
        [
            3.0 * x * x - 6.0 * y * y + 2.0 * self.w * x + self.u,
            -12.0 * x * y + self.v,
        ]
    }

    pub fn hessian(&self, x: f64, y: f64) -> SymMat2 {
        SymMat2::new(6.0 * x + 2.0 * self.w, -12.0 * y, -12.0 * x)
    }

    /// Exact polynomial for rational parameters.
    pub fn polynomial(w: &Rational, u: &Rational, v: &Rational, c: &Rational) -> Polynomial {
        let base = Polynomial::parse("x^3 - 6*x*y^2", 2).expect("static polynomial");
        let x = Polynomial::var(2, Var::X).expect("x exists");
        let y = Polynomial::var(2, Var::Y).expect("y exists");
        let terms = [
            (&x * &x).scale_by(w),
            x.scale_by(u),
            y.scale_by(v),
            Polynomial::constant(2, c.clone()),
        ];
        terms.iter().fold(base, |acc, t| &acc + t)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UnfoldingPoint {
    pub position: [f64; 2],
    pub z: f64,
    pub hessian: SymMat2,
    pub morse: MorseType,
}

impl UnfoldingPoint {
    fn at(params: &UnfoldingParams, x: f64, y: f64) -> Self {
        let hessian = params.hessian(x, y);
        let [a, b] = hessian.eigen();
        UnfoldingPoint {
            position: [x, y],
            z: params.value(x, y),
            hessian,
            morse: classify_eigenvalues(a.value, b.value, EPS_LAMBDA),
        }
    }
}

const IMAG_TOL: f64 = 1e-9;
const DEDUP_TOL: f64 = 1e-8;

/// Real roots of `c[0] + c[1]x + … + c[4]x⁴` with `c[4] ≠ 0`, from the companion matrix.
pub fn quartic_real_roots(c: [f64; 5]) -> Vec<f64> {
    let a: Vec<f64> = (0..4).map(|k| c[k] / c[4]).collect();
    let companion = Matrix4::new(
        0.0, 0.0, 0.0, -a[0], //
        1.0, 0.0, 0.0, -a[1], //
        0.0, 1.0, 0.0, -a[2], //
        0.0, 0.0, 1.0, -a[3],
    );
    let p = |x: f64| (((c[4] * x + c[3]) * x + c[2]) * x + c[1]) * x + c[0];
    let dp = |x: f64| ((4.0 * c[4] * x + 3.0 * c[3]) * x + 2.0 * c[2]) * x + c[1];
    let mut roots: Vec<f64> = companion
        .complex_eigenvalues()
        .iter()
        .filter(|z| z.im.abs() <= IMAG_TOL * z.re.abs().max(1.0))
        .map(|z| {
            let mut x = z.re;
            for _ in 0..5 {
                let d = dp(x);
                if d == 0.0 {
                    break;
                }
                let next = x - p(x) / d;
                if !next.is_finite() || p(next).abs() > p(x).abs() {
                    break;
                }
                x = next;
            }
            x
        })
        .collect();
    roots.sort_by(f64::total_cmp);
    roots.dedup_by(|a, b| (*a - *b).abs() <= DEDUP_TOL * b.abs().max(1.0));
    roots
}

/// All real critical points of `g`, sorted by position.
pub fn critical_points_g(params: &UnfoldingParams) -> Vec<UnfoldingPoint> {
    let UnfoldingParams { w, u, v, .. } = *params;
    let mut pts: Vec<[f64; 2]> = Vec::new();
    if v != 0.0 {
        for x in quartic_real_roots([-v * v / 24.0, 0.0, u, 2.0 * w, 3.0]) {
            if x != 0.0 {
                pts.push([x, v / (12.0 * x)]);
            }
        }
    } else {
        // y = 0: 3x² + 2wx + u = 0
        let disc = w * w - 3.0 * u;
        if disc >= 0.0 {
            let r = disc.sqrt();
            let sign = if w >= 0.0 { 1.0 } else { -1.0 };
            let q = -(w + sign * r);
            if q != 0.0 {
                pts.push([q / 3.0, 0.0]);
                pts.push([u / q, 0.0]);
            } else {
                pts.push([0.0, 0.0]);
            }
        }
        // x = 0: u − 6y² = 0
        if u >= 0.0 {
            let y = (u / 6.0).sqrt();
            pts.push([0.0, y]);
            pts.push([0.0, -y]);
        }
    }
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup_by(|a, b| (a[0] - b[0]).abs() <= DEDUP_TOL && (a[1] - b[1]).abs() <= DEDUP_TOL);
    pts.into_iter()
        .map(|[x, y]| UnfoldingPoint::at(params, x, y))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiscriminantSample {
    pub u: f64,
    pub v: f64,
    /// The degenerate critical point generating this parameter value.
    pub x: f64,
    pub y: f64,
    pub is_cusp: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscriminantCurve {
    pub w: f64,
    pub samples: Vec<DiscriminantSample>,
    pub cusps: Vec<[f64; 2]>,
    pub fold_axis_crossings: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum UnfoldingError {
    #[error("the discriminant section is empty for w = {0}; w must be positive")]
    EmptyLocus(f64),
    #[error("at least {min} samples are required, got {got}")]
    TooFewSamples { min: usize, got: usize },
    #[error("resolution must be at least 8 per axis, got {0}")]
    Resolution(usize),
}

pub const MIN_DISCRIMINANT_SAMPLES: usize = 16;

/// Degenerate critical point of the section at angle `phi`.
///
/// The locus `y² = −x(3x + w)/6`, `x ∈ [−w/3, 0]`, is an ellipse in the
/// `(x, y)` plane; it is traced as `x = −(w/6)(1 − cos φ)`, `y = w sin φ / (6√2)`.
fn locus_point(w: f64, phi: f64) -> [f64; 2] {
    [
        -(w / 6.0) * (1.0 - phi.cos()),
        w * phi.sin() / (6.0 * 2f64.sqrt()),
    ]
}

fn locus_params(w: f64, x: f64, y: f64) -> [f64; 2] {
    [-6.0 * x * x - 3.0 * w * x, 12.0 * x * y]
}

/// `(du/dφ, dv/dφ)` along the traced locus.
fn locus_velocity(w: f64, phi: f64) -> [f64; 2] {
    let [x, y] = locus_point(w, phi);
    let dx = -(w / 6.0) * phi.sin();
    let dy = w * phi.cos() / (6.0 * 2f64.sqrt());
    [(-12.0 * x - 3.0 * w) * dx, 12.0 * (dx * y + x * dy)]
}

/// Samples the discriminant in the plane of fixed `w`.
///
/// Samples are uniform in the angle of the elliptic parameterization above,
/// which clusters them near the cusps. Cusps are the local minima of the
/// velocity norm refined by golden-section search; axis crossings are the
/// sign changes of `v` refined by bisection.
pub fn discriminant_section(w: f64, n_samples: usize) -> Result<DiscriminantCurve, UnfoldingError> {
    if !(w > 0.0) {
        return Err(UnfoldingError::EmptyLocus(w));
    }
    if n_samples < MIN_DISCRIMINANT_SAMPLES {
        return Err(UnfoldingError::TooFewSamples {
            min: MIN_DISCRIMINANT_SAMPLES,
            got: n_samples,
        });
    }
    let n = n_samples;
    let phis: Vec<f64> = (0..n).map(|k| 2.0 * PI * k as f64 / n as f64).collect();
    let speed = |phi: f64| {
        let [a, b] = locus_velocity(w, phi);
        a.hypot(b)
    };
    let scale = w * w;

    // cusps: local minima of the speed among the samples, then refined
    let mut cusp_phis: Vec<f64> = Vec::new();
    for k in 0..n {
        let (prev, here, next) = (
            phis[(k + n - 1) % n],
            phis[k],
            phis[k] + 2.0 * PI / n as f64,
        );
        let (sp, sh, sn) = (speed(prev), speed(here), speed(next));
        if sh <= sp && sh < sn {
            let lo = if k == 0 { prev - 2.0 * PI } else { prev };
            let phi = golden_min(&speed, lo, next);
            if speed(phi) <= 1e-7 * scale {
                cusp_phis.push(phi.rem_euclid(2.0 * PI));
            }
        }
    }
    let cusp_points: Vec<[f64; 2]> = cusp_phis
        .iter()
        .map(|&phi| {
            let [x, y] = locus_point(w, phi);
            locus_params(w, x, y)
        })
        .collect();

    let samples: Vec<DiscriminantSample> = phis
        .iter()
        .map(|&phi| {
            let [x, y] = locus_point(w, phi);
            let [u, v] = locus_params(w, x, y);
            let is_cusp = cusp_phis.iter().any(|&c| angle_gap(c, phi) <= 1e-9);
            DiscriminantSample {
                u,
                v,
                x,
                y,
                is_cusp,
            }
        })
        .collect();

    let v_at = |phi: f64| {
        let [x, y] = locus_point(w, phi);
        locus_params(w, x, y)[1]
    };
    let mut crossings: Vec<[f64; 2]> = Vec::new();
    for &a in &phis {
        let b = a + 2.0 * PI / n as f64;
        let (va, vb) = (v_at(a), v_at(b));
        let phi = if va == 0.0 {
            Some(a)
        } else if va.signum() != vb.signum() && vb != 0.0 {
            Some(bisect(&v_at, a, b))
        } else {
            None
        };
        if let Some(phi) = phi {
            let [x, y] = locus_point(w, phi);
            let [u, _] = locus_params(w, x, y);
            if !crossings.iter().any(|c| (c[0] - u).abs() <= 1e-12) {
                crossings.push([u, 0.0]);
            }
        }
    }
    crossings.sort_by(|a, b| a[0].total_cmp(&b[0]));

    Ok(DiscriminantCurve {
        w,
        samples,
        cusps: cusp_points,
        fold_axis_crossings: crossings,
    })
}

fn angle_gap(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(2.0 * PI);
    d.min(2.0 * PI - d)
}

fn golden_min(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    for _ in 0..200 {
        if (b - a).abs() <= 1e-15 * (1.0 + a.abs().max(b.abs())) {
            break;
        }
        if f(c) < f(d) {
            b = d;
        } else {
            a = c;
        }
        c = b - g * (b - a);
        d = a + g * (b - a);
    }
    0.5 * (a + b)
}

fn bisect(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let fa = f(a);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m == a || m == b {
            break;
        }
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if fm.signum() == fa.signum() {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// The quartic `(−1 + u)u³ + (486 − 648u + 144u²)v² + 5184v⁴`, evaluated as printed.
pub fn implicit_residual(u: f64, v: f64) -> f64 {
    (-1.0 + u) * u * u * u + (486.0 - 648.0 * u + 144.0 * u * u) * v * v + 5184.0 * v.powi(4)
}

/// Exact form of [`implicit_residual`].
pub fn implicit_residual_exact(u: &Rational, v: &Rational) -> Rational {
    let u2 = u * u;
    let v2 = v * v;
    (u - int(1)) * &u2 * u
        + (int(486) - int(648) * u + int(144) * &u2) * &v2
        + int(5184) * &v2 * &v2
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CriticalValue {
    pub u: f64,
    pub v: f64,
    pub z: f64,
    pub morse: MorseType,
}

/// Critical values of `g` over a `resolution × resolution` grid of `(u, v)`.
///
/// Each node contributes one record per real critical point, in row-major
/// order with `u` varying fastest.
pub fn critical_value_graph(
    w: f64,
    u_range: (f64, f64),
    v_range: (f64, f64),
    resolution: usize,
) -> Result<Vec<CriticalValue>, UnfoldingError> {
    if resolution < 8 {
        return Err(UnfoldingError::Resolution(resolution));
    }
    let at = |k: usize, (a, b): (f64, f64)| a + (b - a) * k as f64 / (resolution - 1) as f64;
    Ok((0..resolution)
        .into_par_iter()
        .flat_map_iter(|j| {
            let v = at(j, v_range);
            (0..resolution).flat_map(move |i| {
                let u = at(i, u_range);
                critical_points_g(&UnfoldingParams::new(w, u, v))
                    .into_iter()
                    .map(move |p| CriticalValue {
                        u,
                        v,
                        z: p.z,
                        morse: p.morse,
                    })
            })
        })
        .collect())
}

/// Section parameter of the worked example.
pub const EMBEDDING_W: f64 = 0.5;

/// `(u, c) = (1/12 − 6s, s + 1/216)`.
pub fn embedding_line(s: f64) -> (f64, f64) {
    (1.0 / 12.0 - 6.0 * s, s + 1.0 / 216.0)
}

pub fn embedding_line_exact(s: &Rational) -> (Rational, Rational) {
    (rat(1, 12) - int(6) * s, s + rat(1, 216))
}

/// Unfolding parameters of the worked example at scale `s`.
pub fn embedded_params(s: f64) -> UnfoldingParams {
    let (u, c) = embedding_line(s);
    UnfoldingParams::new(EMBEDDING_W, u, 0.0).with_constant(c)
}

/// Whether the embedding line is inside the discriminant at `s` (four real critical points).
pub fn inside(s: f64) -> bool {
    critical_points_g(&embedded_params(s)).len() == 4
}

/// Bisects `[a, b]` for a change of [`inside`] down to width `tol`.
pub fn inside_transition(mut a: f64, mut b: f64, tol: f64) -> Option<(f64, f64)> {
    let ia = inside(a);
    if ia == inside(b) {
        return None;
    }
    while b - a > tol {
        let m = 0.5 * (a + b);
        if inside(m) == ia {
            a = m;
        } else {
            b = m;
        }
    }
    Some((a, b))
}

/// `f(1/6 + x, y, 1/72) = x³ − 6xy² + x²/2 + 1/54`.
pub fn organizing_center() -> Polynomial {
    Polynomial::parse("x^3 - 6*x*y^2 + 1/2*x^2 + 1/54", 2).expect("static polynomial")
}

/// The same germ obtained by recentring the worked example at the triple merge.
pub fn organizing_center_from_family() -> Polynomial {
    damon_family()
        .recenter(&[rat(1, 6), int(0), int(0)])
        .and_then(|p| p.substitute(Var::S, &rat(1, 72)))
        .expect("two spatial variables and a scale")
}
