use rayon::prelude::*;
use serde::Serialize;

use super::ScaleSpaceError;
use crate::morse::SymMat2;
use crate::poly::{HornerPoly, PolyError, Polynomial};

/// Anything that can be evaluated on the plane.
pub trait ScalarField: Sync {
    fn value_at(&self, x: f64, y: f64) -> f64;
}

impl<F> ScalarField for F
where
    F: Fn(f64, f64) -> f64 + Sync,
{
    fn value_at(&self, x: f64, y: f64) -> f64 {
        self(x, y)
    }
}

/// A two-dimensional polynomial family frozen at scale `s`.
#[derive(Debug, Clone)]
pub struct PolySlice {
    horner: HornerPoly,
    s: f64,
}

impl PolySlice {
    pub fn new(poly: &Polynomial, s: f64) -> Result<Self, PolyError> {
        if poly.n_spatial() != 2 {
            return Err(PolyError::DimensionMismatch {
                expected: 2,
                got: poly.n_spatial(),
            });
        }
        Ok(PolySlice {
            horner: poly.horner(),
            s,
        })
    }

    pub fn from_horner(horner: HornerPoly, s: f64) -> Self {
        PolySlice { horner, s }
    }
}

impl ScalarField for PolySlice {
    fn value_at(&self, x: f64, y: f64) -> f64 {
        self.horner.eval(&[x, y, self.s])
    }
}

/// Axis-aligned sampling window `(x0, y0, x1, y1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Window {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl Window {
    pub fn new(x0: f64, y0: f64, x1: f64, y1: f64) -> Self {
        Window { x0, y0, x1, y1 }
    }

    pub fn square(half: f64) -> Self {
        Window::new(-half, -half, half, half)
    }

    pub fn contains(&self, p: [f64; 2]) -> bool {
        p[0] >= self.x0 && p[0] <= self.x1 && p[1] >= self.y0 && p[1] <= self.y1
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.x0, self.y0, self.x1, self.y1]
    }
}

/// Smallest grid accepted by [`sample`]. Detection needs at least [`MIN_DETECT_DIM`].
pub const MIN_SAMPLE_DIM: usize = 2;
pub const MIN_DETECT_DIM: usize = 8;

/// Scalar samples on a uniform grid, `values[j * nx + i] = I(x0 + i·h, y0 + j·h)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    origin: [f64; 2],
    h: f64,
    nx: usize,
    ny: usize,
    values: Vec<f64>,
    s: f64,
    margin: usize,
    under_resolved: bool,
}

/// Value, gradient and Hessian of the local biquadratic interpolant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalFit {
    pub value: f64,
    pub gradient: [f64; 2],
    pub hessian: SymMat2,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GradientSample {
    pub x: f64,
    pub y: f64,
    pub gx: f64,
    pub gy: f64,
}

impl GridField {
    pub fn new(
        origin: [f64; 2],
        h: f64,
        nx: usize,
        ny: usize,
        values: Vec<f64>,
        s: f64,
    ) -> Result<Self, ScaleSpaceError> {
        if !(h > 0.0) || !h.is_finite() {
            return Err(ScaleSpaceError::Spacing(h));
        }
        if nx < MIN_SAMPLE_DIM || ny < MIN_SAMPLE_DIM {
            return Err(ScaleSpaceError::TooSmall { nx, ny });
        }
        if values.len() != nx * ny {
            return Err(ScaleSpaceError::Shape {
                expected: nx * ny,
                got: values.len(),
            });
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(ScaleSpaceError::NonFinite {
                i: k % nx,
                j: k / nx,
            });
        }
        Ok(GridField {
            origin,
            h,
            nx,
            ny,
            values,
            s,
            margin: 0,
            under_resolved: false,
        })
    }

    pub(crate) fn with_meta(mut self, s: f64, margin: usize, under_resolved: bool) -> Self {
        self.s = s;
        self.margin = margin;
        self.under_resolved = under_resolved;
        self
    }

    pub fn origin(&self) -> [f64; 2] {
        self.origin
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.nx, self.ny)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    /// Number of cells along each border affected by blurring.
    pub fn margin(&self) -> usize {
        self.margin
    }

    /// Set when a blur was skipped because its kernel was narrower than half a cell.
    pub fn under_resolved(&self) -> bool {
        self.under_resolved
    }

    pub fn window(&self) -> Window {
        Window::new(
            self.origin[0],
            self.origin[1],
            self.x(self.nx - 1),
            self.y(self.ny - 1),
        )
    }

    #[inline]
    pub fn x(&self, i: usize) -> f64 {
        self.origin[0] + i as f64 * self.h
    }

    #[inline]
    pub fn y(&self, j: usize) -> f64 {
        self.origin[1] + j as f64 * self.h
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.nx + i]
    }

    /// Inclusive node index ranges not touched by the boundary margin.
    pub fn valid_nodes(&self) -> Option<((usize, usize), (usize, usize))> {
        let m = self.margin;
        if 2 * m + 1 > self.nx || 2 * m + 1 > self.ny {
            return None;
        }
        Some(((m, self.nx - 1 - m), (m, self.ny - 1 - m)))
    }

    /// Region where central differences only use unaffected nodes.
    pub fn valid_window(&self) -> Option<Window> {
        let ((i0, i1), (j0, j1)) = self.valid_nodes()?;
        if i1 < i0 + 2 || j1 < j0 + 2 {
            return None;
        }
        Some(Window::new(
            self.x(i0 + 1),
            self.y(j0 + 1),
            self.x(i1 - 1),
            self.y(j1 - 1),
        ))
    }

    /// Interior nodes `(i, j)` outside the margin.
    pub fn interior_nodes(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let ranges = self.valid_nodes();
        ranges.into_iter().flat_map(|((i0, i1), (j0, j1))| {
            (j0..=j1).flat_map(move |j| (i0..=i1).map(move |i| (i, j)))
        })
    }

    /// Central-difference gradient at an interior node.
    pub fn central_gradient(&self, i: usize, j: usize) -> [f64; 2] {
        let inv = 0.5 / self.h;
        [
            (self.get(i + 1, j) - self.get(i - 1, j)) * inv,
            (self.get(i, j + 1) - self.get(i, j - 1)) * inv,
        ]
    }

    /// One gradient vector per interior node (central differences).
    pub fn gradient_vectors(&self) -> Vec<GradientSample> {
        let mut out = Vec::with_capacity(self.nx.saturating_sub(2) * self.ny.saturating_sub(2));
        for j in 1..self.ny - 1 {
            for i in 1..self.nx - 1 {
                let [gx, gy] = self.central_gradient(i, j);
                out.push(GradientSample {
                    x: self.x(i),
                    y: self.y(j),
                    gx,
                    gy,
                });
            }
        }
        out
    }

    /// Biquadratic interpolant on the 3×3 stencil around the node nearest to `(x, y)`.
    ///
    /// The stencil centre is clamped to `[lo, hi]` index bounds so it never
    /// leaves the grid.
    pub fn local_fit(&self, x: f64, y: f64) -> LocalFit {
        let ci = ((x - self.origin[0]) / self.h)
            .round()
            .clamp(1.0, (self.nx - 2) as f64) as usize;
        let cj = ((y - self.origin[1]) / self.h)
            .round()
            .clamp(1.0, (self.ny - 2) as f64) as usize;
        self.fit_at_node(ci, cj, x, y)
    }

    pub(crate) fn fit_at_node(&self, ci: usize, cj: usize, x: f64, y: f64) -> LocalFit {
        let u = (x - self.x(ci)) / self.h;
        let v = (y - self.y(cj)) / self.h;
        let basis = |t: f64| -> ([f64; 3], [f64; 3], [f64; 3]) {
            (
                [0.5 * t * (t - 1.0), 1.0 - t * t, 0.5 * t * (t + 1.0)],
                [t - 0.5, -2.0 * t, t + 0.5],
                [1.0, -2.0, 1.0],
            )
        };
        let (lu, du, ddu) = basis(u);
        let (lv, dv, ddv) = basis(v);
        let mut value = 0.0;
        let (mut gx, mut gy) = (0.0, 0.0);
        let (mut hxx, mut hxy, mut hyy) = (0.0, 0.0, 0.0);
        for b in 0..3 {
            for a in 0..3 {
                let f = self.get(ci + a - 1, cj + b - 1);
                value += f * lu[a] * lv[b];
                gx += f * du[a] * lv[b];
                gy += f * lu[a] * dv[b];
                hxx += f * ddu[a] * lv[b];
                hxy += f * du[a] * dv[b];
                hyy += f * lu[a] * ddv[b];
            }
        }
        let h = self.h;
        LocalFit {
            value,
            gradient: [gx / h, gy / h],
            hessian: SymMat2::new(hxx / (h * h), hxy / (h * h), hyy / (h * h)),
        }
    }

    /// Gradient of the local interpolant at an arbitrary point.
    pub fn gradient_at(&self, x: f64, y: f64) -> [f64; 2] {
        self.local_fit(x, y).gradient
    }

    /// Sub-grid `[i0, i0 + nx) × [j0, j0 + ny)`, keeping metadata.
    pub fn crop(
        &self,
        i0: usize,
        j0: usize,
        nx: usize,
        ny: usize,
    ) -> Result<GridField, ScaleSpaceError> {
        if i0 + nx > self.nx || j0 + ny > self.ny {
            return Err(ScaleSpaceError::Shape {
                expected: self.nx * self.ny,
                got: (i0 + nx) * (j0 + ny),
            });
        }
        let mut values = Vec::with_capacity(nx * ny);
        for j in j0..j0 + ny {
            let row = j * self.nx;
            values.extend_from_slice(&self.values[row + i0..row + i0 + nx]);
        }
        Ok(
            GridField::new([self.x(i0), self.y(j0)], self.h, nx, ny, values, self.s)?.with_meta(
                self.s,
                self.margin,
                self.under_resolved,
            ),
        )
    }

    /// Index range of nodes within `radius` of `center`, padded by `pad` nodes and clamped.
    pub(crate) fn index_box(
        &self,
        center: [f64; 2],
        radius: f64,
        pad: usize,
    ) -> (usize, usize, usize, usize) {
        let to_idx = |v: f64, o: f64, n: usize| -> (usize, usize) {
            let lo = ((v - radius - o) / self.h).floor() as i64 - pad as i64;
            let hi = ((v + radius - o) / self.h).ceil() as i64 + pad as i64;
            (
                lo.clamp(0, n as i64 - 1) as usize,
                hi.clamp(0, n as i64 - 1) as usize,
            )
        };
        let (i0, i1) = to_idx(center[0], self.origin[0], self.nx);
        let (j0, j1) = to_idx(center[1], self.origin[1], self.ny);
        (i0, j0, i1 - i0 + 1, j1 - j0 + 1)
    }
}

fn axis_count(lo: f64, hi: f64, h: f64) -> usize {
    ((hi - lo) / h + 1e-9).floor() as usize + 1
}

/// Samples `field` at `x0 + i·h, y0 + j·h` covering `window`; `s` is recorded as metadata.
pub fn sample<F: ScalarField + ?Sized>(
    field: &F,
    window: Window,
    h: f64,
    s: f64,
) -> Result<GridField, ScaleSpaceError> {
    if !(h > 0.0) || !h.is_finite() {
        return Err(ScaleSpaceError::Spacing(h));
    }
    if !(window.x1 > window.x0) || !(window.y1 > window.y0) {
        return Err(ScaleSpaceError::Window(window.as_array()));
    }
    let nx = axis_count(window.x0, window.x1, h);
    let ny = axis_count(window.y0, window.y1, h);
    if nx < MIN_SAMPLE_DIM || ny < MIN_SAMPLE_DIM {
        return Err(ScaleSpaceError::TooSmall { nx, ny });
    }
    sample_nodes(field, [window.x0, window.y0], h, nx, ny, s)
}

pub(crate) fn sample_nodes<F: ScalarField + ?Sized>(
    field: &F,
    origin: [f64; 2],
    h: f64,
    nx: usize,
    ny: usize,
    s: f64,
) -> Result<GridField, ScaleSpaceError> {
    let mut values = vec![0.0; nx * ny];
    values.par_chunks_mut(nx).enumerate().for_each(|(j, row)| {
        let y = origin[1] + j as f64 * h;
        for (i, v) in row.iter_mut().enumerate() {
            *v = field.value_at(origin[0] + i as f64 * h, y);
        }
    });
    GridField::new(origin, h, nx, ny, values, s)
}
