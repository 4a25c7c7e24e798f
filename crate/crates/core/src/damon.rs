//! Closed-form analysis of the heat solution `f(x,y,s) = x³ − 6xy² + y² − 6sx + 2s`.
//!
//! The gradient vanishes on two parabolic branches:
//!
//! * `pc1±(s) = (1/6, ±√(1 − 72s) / (6√2))`, real for `s ≤ 1/72`;
//! * `pc2±(s) = (±√(2s), 0)`, real for `s ≥ 0`.
//!
//! `pc2±` is born at the origin at `s = 0` (an extremum and a saddle), and at
//! `s = 1/72` the pair `pc1±` collides with `pc2+` at `(1/6, 0)`, leaving `pc2+`
//! as a saddle. Everything here is exact or closed form and serves as the
//! oracle for the numerical scale-space engine.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::morse::{
    classify_eigenvalues, Branch, CriticalPoint, EigenPair, MorseType, SymMat2, EPS_LAMBDA,
};
use crate::poly::{int, rat, to_f64, Rational};

/// Scale of the triple merge, `1/72`.
pub const S_MERGE: f64 = 1.0 / 72.0;

pub fn merge_scale() -> Rational {
    rat(1, 72)
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DamonError {
    #[error("branch {branch} is not real at s = {s}")]
    NotReal { branch: Branch, s: f64 },
    #[error("critical point carries no branch label of the worked example")]
    NotFromFamily,
    #[error("{0} has no rational square root")]
    Irrational(Rational),
    #[error("equation a - b*sqrt(c + d*s) = 0 has no solution")]
    NoSolution,
}

pub fn value(x: f64, y: f64, s: f64) -> f64 {
    x * x * x - 6.0 * x * y * y + y * y - 6.0 * s * x + 2.0 * s
}

/// Spatial gradient `(3x² − 6y² − 6s, −12xy + 2y)`.
pub fn gradient(x: f64, y: f64, s: f64) -> [f64; 2] {
    [3.0 * x * x - 6.0 * y * y - 6.0 * s, -12.0 * x * y + 2.0 * y]
}

/// Spatial Hessian `[[6x, −12y], [−12y, 2 − 12x]]`; independent of `s`.
pub fn hessian_at(x: f64, y: f64) -> SymMat2 {
    SymMat2::new(6.0 * x, -12.0 * y, 2.0 - 12.0 * x)
}

/// Position of `s` relative to the two bifurcation scales.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Regime {
    /// `s < 0`: only `pc1±`.
    Negative,
    /// `s = 0`: `pc2±` coincide at the origin.
    Creation,
    /// `0 < s < 1/72`: four points.
    Between,
    /// `s = 1/72`: `pc1±` and `pc2+` coincide at `(1/6, 0)`.
    Merge,
    /// `s > 1/72`: only `pc2±`.
    Beyond,
}

impl Regime {
    pub fn of(s: f64) -> Self {
        if s < 0.0 {
            Regime::Negative
        } else if s == 0.0 {
            Regime::Creation
        } else if s < S_MERGE {
            Regime::Between
        } else if s == S_MERGE {
            Regime::Merge
        } else {
            Regime::Beyond
        }
    }

    pub fn of_exact(s: &Rational) -> Self {
        let m = merge_scale();
        if s.is_negative() {
            Regime::Negative
        } else if s.is_zero() {
            Regime::Creation
        } else if *s < m {
            Regime::Between
        } else if *s == m {
            Regime::Merge
        } else {
            Regime::Beyond
        }
    }

    fn has(self, branch: Branch) -> bool {
        match branch {
            Branch::Pc1Plus | Branch::Pc1Minus => {
                matches!(
                    self,
                    Regime::Negative | Regime::Creation | Regime::Between | Regime::Merge
                )
            }
            Branch::Pc2Plus | Branch::Pc2Minus => !matches!(self, Regime::Negative),
        }
    }
}

/// Reality domain and parameterization of one branch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BranchDescriptor {
    pub branch: Branch,
    /// `(lower, upper)` bounds on `s`; `None` is unbounded.
    pub reality: (Option<f64>, Option<f64>),
}

impl BranchDescriptor {
    pub fn of(branch: Branch) -> Self {
        let reality = match branch {
            Branch::Pc1Plus | Branch::Pc1Minus => (None, Some(S_MERGE)),
            Branch::Pc2Plus | Branch::Pc2Minus => (Some(0.0), None),
        };
        BranchDescriptor { branch, reality }
    }

    pub fn is_real(&self, s: f64) -> bool {
        Regime::of(s).has(self.branch)
    }

    /// Closed-form position, `None` outside the reality domain.
    pub fn position(&self, s: f64) -> Option<[f64; 2]> {
        if !self.is_real(s) {
            return None;
        }
        Some(match self.branch {
            Branch::Pc1Plus => [1.0 / 6.0, pc1_y(s)],
            Branch::Pc1Minus => [1.0 / 6.0, -pc1_y(s)],
            Branch::Pc2Plus => [(2.0 * s).sqrt(), 0.0],
            Branch::Pc2Minus => [-(2.0 * s).sqrt(), 0.0],
        })
    }
}

fn pc1_y(s: f64) -> f64 {
    (1.0 - 72.0 * s).max(0.0).sqrt() / (6.0 * 2f64.sqrt())
}

pub fn branch_position(branch: Branch, s: f64) -> Option<[f64; 2]> {
    BranchDescriptor::of(branch).position(s)
}

/// Closed-form eigenvalues in the listing order `pc1+: {(1−3r)/2, (1+3r)/2}`,
/// `pc1−: {(1+3r)/2, (1−3r)/2}`, `pc2+: {2−12√(2s), 6√(2s)}`,
/// `pc2−: {2+12√(2s), −6√(2s)}` with `r = √(1 − 64s)`.
pub fn closed_form_eigenvalues(branch: Branch, s: f64) -> Option<[f64; 2]> {
    if !Regime::of(s).has(branch) {
        return None;
    }
    Some(match branch {
        Branch::Pc1Plus | Branch::Pc1Minus => {
            let r = (1.0 - 64.0 * s).sqrt();
            let (lo, hi) = ((1.0 - 3.0 * r) / 2.0, (1.0 + 3.0 * r) / 2.0);
            if branch == Branch::Pc1Plus {
                [lo, hi]
            } else {
                [hi, lo]
            }
        }
        Branch::Pc2Plus => {
            let t = (2.0 * s).sqrt();
            [2.0 - 12.0 * t, 6.0 * t]
        }
        Branch::Pc2Minus => {
            let t = (2.0 * s).sqrt();
            [2.0 + 12.0 * t, -6.0 * t]
        }
    })
}

/// Closed-form (unnormalized) eigenvectors paired with
/// [`closed_form_eigenvalues`]. For `pc1±` they have the form
/// `((±1 ± 3r) / (2√(2(1 − 72s))), 1)` and are undefined at `s = 1/72`.
pub fn closed_form_eigenvectors(branch: Branch, s: f64) -> Option<[[f64; 2]; 2]> {
    if !Regime::of(s).has(branch) {
        return None;
    }
    match branch {
        Branch::Pc1Plus | Branch::Pc1Minus => {
            let q = (2.0 * (1.0 - 72.0 * s)).sqrt();
            if !(q > 0.0) {
                return None;
            }
            let r = (1.0 - 64.0 * s).sqrt();
            Some(if branch == Branch::Pc1Plus {
                [
                    [(-1.0 + 3.0 * r) / (2.0 * q), 1.0],
                    [(-1.0 - 3.0 * r) / (2.0 * q), 1.0],
                ]
            } else {
                [
                    [(1.0 + 3.0 * r) / (2.0 * q), 1.0],
                    [(1.0 - 3.0 * r) / (2.0 * q), 1.0],
                ]
            })
        }
        Branch::Pc2Plus | Branch::Pc2Minus => Some([[0.0, 1.0], [1.0, 0.0]]),
    }
}

/// Reorders ascending eigenpairs so they follow the branch's listing order.
fn order_like(pairs: [EigenPair; 2], listed: [f64; 2]) -> [EigenPair; 2] {
    let direct = (pairs[0].value - listed[0]).abs() + (pairs[1].value - listed[1]).abs();
    let swapped = (pairs[1].value - listed[0]).abs() + (pairs[0].value - listed[1]).abs();
    if swapped < direct {
        [pairs[1], pairs[0]]
    } else {
        pairs
    }
}

fn build_point(branch: Branch, pos: [f64; 2], s: f64) -> CriticalPoint {
    let hessian = hessian_at(pos[0], pos[1]);
    let mut cp = CriticalPoint::from_hessian(pos, s, value(pos[0], pos[1], s), hessian, EPS_LAMBDA);
    if let Some(listed) = closed_form_eigenvalues(branch, s) {
        cp.eigen = order_like(cp.eigen, listed);
    }
    cp.branch = Some(branch);
    cp
}

/// All real critical points at scale `s`.
///
/// At `s = 0` the coincident `pc2±` are reported once (labelled `pc2+`); at
/// `s = 1/72` the coincident `pc1±`, `pc2+` are reported once (labelled `pc2+`).
pub fn critical_points(s: f64) -> Vec<CriticalPoint> {
    points_for(Regime::of(s), s)
}

/// Same as [`critical_points`] with the regime decided by exact rational comparison.
pub fn critical_points_exact(s: &Rational) -> Vec<CriticalPoint> {
    points_for(Regime::of_exact(s), to_f64(s))
}

fn points_for(regime: Regime, s: f64) -> Vec<CriticalPoint> {
    let pos = |b: Branch| -> [f64; 2] {
        match b {
            Branch::Pc1Plus => [1.0 / 6.0, pc1_y(s)],
            Branch::Pc1Minus => [1.0 / 6.0, -pc1_y(s)],
            Branch::Pc2Plus => [(2.0 * s).max(0.0).sqrt(), 0.0],
            Branch::Pc2Minus => [-(2.0 * s).max(0.0).sqrt(), 0.0],
        }
    };
    let branches: &[Branch] = match regime {
        Regime::Negative => &[Branch::Pc1Plus, Branch::Pc1Minus],
        Regime::Creation => &[Branch::Pc1Plus, Branch::Pc1Minus, Branch::Pc2Plus],
        Regime::Between => &Branch::ALL,
        Regime::Merge => &[Branch::Pc2Plus, Branch::Pc2Minus],
        Regime::Beyond => &[Branch::Pc2Plus, Branch::Pc2Minus],
    };
    branches
        .iter()
        .map(|&b| {
            let p = match (regime, b) {
                (Regime::Creation, Branch::Pc2Plus) => [0.0, 0.0],
                (Regime::Merge, Branch::Pc2Plus) => [1.0 / 6.0, 0.0],
                _ => pos(b),
            };
            build_point(b, p, s)
        })
        .collect()
}

/// Numeric eigen-decomposition of a family point, checked against the closed forms.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenAnalysis {
    /// Numeric pairs in the branch's listing order.
    pub pairs: [EigenPair; 2],
    pub closed_values: Option<[f64; 2]>,
    /// Normalized closed-form eigenvectors; `None` where the formula is undefined.
    pub closed_vectors: Option<[[f64; 2]; 2]>,
    pub value_error: Option<f64>,
    /// Max distance between unit vectors, up to sign.
    pub vector_error: Option<f64>,
}

pub fn eigen_analysis(cp: &CriticalPoint) -> Result<EigenAnalysis, DamonError> {
    let branch = cp.branch.ok_or(DamonError::NotFromFamily)?;
    let pairs = cp.hessian.eigen();
    let closed_values = closed_form_eigenvalues(branch, cp.s);
    let pairs = match closed_values {
        Some(listed) => order_like(pairs, listed),
        None => pairs,
    };
    let value_error = closed_values.map(|v| {
        (pairs[0].value - v[0])
            .abs()
            .max((pairs[1].value - v[1]).abs())
    });
    let closed_vectors = closed_form_eigenvectors(branch, cp.s).map(|vs| vs.map(unit));
    let vector_error = closed_vectors.map(|vs| {
        vs.iter()
            .zip(&pairs)
            .map(|(w, p)| {
                let v = p.vector;
                let plus = (v[0] - w[0]).hypot(v[1] - w[1]);
                let minus = (v[0] + w[0]).hypot(v[1] + w[1]);
                plus.min(minus)
            })
            .fold(0.0, f64::max)
    });
    Ok(EigenAnalysis {
        pairs,
        closed_values,
        closed_vectors,
        value_error,
        vector_error,
    })
}

fn unit(v: [f64; 2]) -> [f64; 2] {
    let n = v[0].hypot(v[1]);
    [v[0] / n, v[1] / n]
}

/// Morse type and index (number of negative eigenvalues).
pub fn classify(cp: &CriticalPoint) -> (MorseType, Option<u8>) {
    let morse = classify_eigenvalues(cp.eigen[0].value, cp.eigen[1].value, EPS_LAMBDA);
    (morse, morse.index())
}

/// `z1± = s + 1/216`, `z2± = 2s(1 ∓ 2√(2s))`.
pub fn critical_value(branch: Branch, s: f64) -> Result<f64, DamonError> {
    if !Regime::of(s).has(branch) {
        return Err(DamonError::NotReal { branch, s });
    }
    Ok(match branch {
        Branch::Pc1Plus | Branch::Pc1Minus => s + 1.0 / 216.0,
        Branch::Pc2Plus => 2.0 * s * (1.0 - 2.0 * (2.0 * s).sqrt()),
        Branch::Pc2Minus => 2.0 * s * (1.0 + 2.0 * (2.0 * s).sqrt()),
    })
}

/// Critical values of all branches real at `s`.
pub fn critical_values(s: f64) -> BTreeMap<Branch, f64> {
    Branch::ALL
        .iter()
        .filter_map(|&b| critical_value(b, s).ok().map(|z| (b, z)))
        .collect()
}

/// Exact critical values at a rational scale; requires `2s` to be a rational square
/// whenever `pc2±` is real.
pub fn critical_values_exact(s: &Rational) -> Result<BTreeMap<Branch, Rational>, DamonError> {
    let regime = Regime::of_exact(s);
    let mut out = BTreeMap::new();
    for b in Branch::ALL {
        if !regime.has(b) {
            continue;
        }
        let z = match b {
            Branch::Pc1Plus | Branch::Pc1Minus => s + rat(1, 216),
            Branch::Pc2Plus | Branch::Pc2Minus => {
                let two_s = s * int(2);
                let root = rational_sqrt(&two_s).ok_or(DamonError::Irrational(two_s))?;
                let sign = if b == Branch::Pc2Plus {
                    int(-2)
                } else {
                    int(2)
                };
                s * int(2) * (int(1) + sign * root)
            }
        };
        out.insert(b, z);
    }
    Ok(out)
}

/// Square root of a non-negative rational when it is itself rational.
pub fn rational_sqrt(q: &Rational) -> Option<Rational> {
    if q.is_negative() {
        return None;
    }
    let root = |n: &BigInt| -> Option<BigInt> {
        let r = n.sqrt();
        (&r * &r == *n).then_some(r)
    };
    Some(Rational::new(root(q.numer())?, root(q.denom())?))
}

/// Samples of the median section `f(x, 0, s) = x³ − 6sx + 2s`.
pub fn median_section(s: f64, xs: &[f64]) -> Vec<(f64, f64)> {
    xs.iter().map(|&x| (x, value(x, 0.0, s))).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ExampleEventKind {
    Creation,
    TripleMerge,
}

/// A bifurcation of the worked example, located exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct ExampleEvent {
    pub kind: ExampleEventKind,
    pub s: Rational,
    pub location: [Rational; 2],
    pub participants: Vec<Branch>,
    /// Branch that continues past the event and its Morse type afterwards.
    pub survivor: Option<(Branch, MorseType)>,
}

impl ExampleEvent {
    pub fn s_f64(&self) -> f64 {
        to_f64(&self.s)
    }

    pub fn location_f64(&self) -> [f64; 2] {
        [to_f64(&self.location[0]), to_f64(&self.location[1])]
    }
}

/// Birth of `pc2±` at the origin for `s = 0`, and the triple merge at `(1/6, 0)` for `s = 1/72`.
pub fn bifurcation_events() -> Vec<ExampleEvent> {
    vec![
        ExampleEvent {
            kind: ExampleEventKind::Creation,
            s: int(0),
            location: [int(0), int(0)],
            participants: vec![Branch::Pc2Plus, Branch::Pc2Minus],
            survivor: None,
        },
        ExampleEvent {
            kind: ExampleEventKind::TripleMerge,
            s: merge_scale(),
            location: [rat(1, 6), int(0)],
            participants: vec![Branch::Pc1Plus, Branch::Pc1Minus, Branch::Pc2Plus],
            survivor: Some((Branch::Pc2Plus, MorseType::Saddle)),
        },
    ]
}

/// Solves `a − b·√(c + d·s) = 0` for `s`, exactly.
pub fn solve_sqrt_linear(
    a: &Rational,
    b: &Rational,
    c: &Rational,
    d: &Rational,
) -> Result<Rational, DamonError> {
    if b.is_zero() || d.is_zero() {
        return Err(DamonError::NoSolution);
    }
    let root = a / b;
    if root.is_negative() {
        return Err(DamonError::NoSolution);
    }
    Ok((&root * &root - c) / d)
}

/// Scales where an eigenvalue of a real critical point changes sign:
/// roots of `1 − 3√(1 − 64s)` and of `1 − 6√(2s)`.
pub fn eigen_signchange_scales() -> [Rational; 2] {
    let first = solve_sqrt_linear(&int(1), &int(3), &int(1), &int(-64)).expect("solvable");
    let second = solve_sqrt_linear(&int(1), &int(6), &int(0), &int(2)).expect("solvable");
    [first, second]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{damon_family, Point};

    fn close(a: [f64; 2], b: [f64; 2], tol: f64) -> bool {
        (a[0] - b[0]).abs() <= tol && (a[1] - b[1]).abs() <= tol
    }

    #[test]
    fn gradient_examples() {
        assert_eq!(gradient(0.0, 0.0, 0.0), [0.0, 0.0]);
        assert!(close(
            gradient(1.0 / 6.0, 1.0 / 12.0, 1.0 / 144.0),
            [0.0, 0.0],
            1e-15
        ));
        assert_eq!(gradient(1.0, 1.0, 0.0), [-3.0, -10.0]);
    }

    #[test]
    fn gradient_matches_symbolic_derivative() {
        let f = damon_family();
        let fx = f.differentiate(crate::poly::Var::X).unwrap();
        let fy = f.differentiate(crate::poly::Var::Y).unwrap();
        for &(x, y, s) in &[(0.3, -0.2, 0.01), (-1.0, 0.5, 0.2)] {
            let g = gradient(x, y, s);
            let p = Point::xy(x, y, s);
            assert!((g[0] - fx.evaluate(&p).unwrap()).abs() < 1e-14);
            assert!((g[1] - fy.evaluate(&p).unwrap()).abs() < 1e-14);
        }
    }

    /// Newton multistart on the gradient, independent of the branch formulas.
    fn newton_oracle(s: f64) -> Vec<[f64; 2]> {
        let mut found: Vec<[f64; 2]> = Vec::new();
        for i in 0..21 {
            for j in 0..21 {
                let mut p = [-0.5 + i as f64 * 0.05, -0.5 + j as f64 * 0.05];
                for _ in 0..60 {
                    let g = gradient(p[0], p[1], s);
                    let Some(d) = hessian_at(p[0], p[1]).solve(g) else {
                        break;
                    };
                    p = [p[0] - d[0], p[1] - d[1]];
                }
                let g = gradient(p[0], p[1], s);
                if g[0].hypot(g[1]) < 1e-13 && !found.iter().any(|q| close(*q, p, 1e-8)) {
                    found.push(p);
                }
            }
        }
        found
    }

    #[test]
    fn four_points_between_bifurcations() {
        let s = 1.0 / 144.0;
        let pts = critical_points(s);
        assert_eq!(pts.len(), 4);
        let r = 1.0 / (6.0 * 2f64.sqrt());
        let expect = [
            (Branch::Pc1Plus, [1.0 / 6.0, 1.0 / 12.0]),
            (Branch::Pc1Minus, [1.0 / 6.0, -1.0 / 12.0]),
            (Branch::Pc2Plus, [r, 0.0]),
            (Branch::Pc2Minus, [-r, 0.0]),
        ];
        for (b, p) in expect {
            let cp = pts.iter().find(|c| c.branch == Some(b)).unwrap();
            assert!(close(cp.position, p, 1e-15), "{b}");
        }
        let oracle = newton_oracle(s);
        assert_eq!(oracle.len(), 4);
        for q in oracle {
            assert!(pts.iter().any(|c| close(c.position, q, 1e-12)));
        }
    }

    #[test]
    fn two_points_beyond_merge() {
        let pts = critical_points(1.0 / 36.0);
        assert_eq!(pts.len(), 2);
        let x = 1.0 / 18f64.sqrt();
        assert!(close(pts[0].position, [x, 0.0], 1e-15));
        assert!(close(pts[1].position, [-x, 0.0], 1e-15));
        let oracle = newton_oracle(1.0 / 36.0);
        assert_eq!(oracle.len(), 2);
    }

    #[test]
    fn negative_scale_only_pc1() {
        let pts = critical_points(-1.0 / 72.0);
        assert_eq!(pts.len(), 2);
        assert!(close(pts[0].position, [1.0 / 6.0, 1.0 / 6.0], 1e-15));
        assert!(close(pts[1].position, [1.0 / 6.0, -1.0 / 6.0], 1e-15));
        assert!(pts.iter().all(|c| c.morse == MorseType::Saddle));
    }

    #[test]
    fn coincident_points_are_deduplicated() {
        let at_merge = critical_points_exact(&merge_scale());
        assert_eq!(at_merge.len(), 2);
        assert_eq!(at_merge[0].morse, MorseType::Degenerate);
        assert_eq!(at_merge[0].position, [1.0 / 6.0, 0.0]);
        assert_eq!(at_merge[1].branch, Some(Branch::Pc2Minus));
        assert_eq!(critical_points(S_MERGE).len(), 2);

        let at_zero = critical_points(0.0);
        assert_eq!(at_zero.len(), 3);
        let origin = at_zero.iter().find(|c| c.position == [0.0, 0.0]).unwrap();
        assert_eq!(origin.morse, MorseType::Degenerate);
    }

    #[test]
    fn hessian_examples() {
        assert_eq!(hessian_at(1.0 / 6.0, 0.0), SymMat2::new(1.0, 0.0, 0.0));
        assert_eq!(hessian_at(0.0, 0.0), SymMat2::new(0.0, 0.0, 2.0));
        let s: f64 = 0.005;
        let t = (2.0 * s).sqrt();
        let h = hessian_at(t, 0.0);
        assert!((h.xx - 6.0 * t).abs() < 1e-15);
        assert!((h.yy - 2.0 * (1.0 - 6.0 * t)).abs() < 1e-15);
        assert_eq!(h.xy, 0.0);
    }

    #[test]
    fn eigenvalue_examples() {
        let pick = |s: f64, b: Branch| {
            critical_points(s)
                .into_iter()
                .find(|c| c.branch == Some(b))
                .unwrap()
        };
        let e = eigen_analysis(&pick(S_MERGE, Branch::Pc2Minus)).unwrap();
        assert!((e.pairs[0].value - 4.0).abs() < 1e-14 && (e.pairs[1].value + 1.0).abs() < 1e-14);
        let e = eigen_analysis(&pick(0.0, Branch::Pc1Plus)).unwrap();
        assert!((e.pairs[0].value + 1.0).abs() < 1e-14 && (e.pairs[1].value - 2.0).abs() < 1e-14);
        let merged = pick(S_MERGE, Branch::Pc2Plus);
        let e = eigen_analysis(&merged).unwrap();
        assert!(e.pairs[0].value.abs() < 1e-14 && (e.pairs[1].value - 1.0).abs() < 1e-14);
    }

    #[test]
    fn eigenvector_formula_undefined_at_merge() {
        assert!(closed_form_eigenvectors(Branch::Pc1Plus, S_MERGE).is_none());
        let cp = build_point(Branch::Pc1Plus, [1.0 / 6.0, 0.0], S_MERGE);
        let e = eigen_analysis(&cp).unwrap();
        assert!(e.vector_error.is_none());
        assert!(e.value_error.unwrap() < 1e-14);
    }

    #[test]
    fn closed_forms_match_numeric() {
        for k in 0..200 {
            let s = -1.0 / 72.0 + k as f64 * (2.0 / 72.0) / 200.0 + 1e-7;
            for cp in critical_points(s) {
                let e = eigen_analysis(&cp).unwrap();
                assert!(e.value_error.unwrap() < 1e-12, "{:?} {s}", cp.branch);
                if let Some(err) = e.vector_error {
                    assert!(err < 1e-10, "{:?} {s} {err}", cp.branch);
                }
            }
        }
    }

    #[test]
    fn classification_table() {
        let s = 1.0 / 144.0;
        let pts = critical_points(s);
        let morse = |b| pts.iter().find(|c| c.branch == Some(b)).unwrap().morse;
        assert_eq!(morse(Branch::Pc1Plus), MorseType::Saddle);
        assert_eq!(morse(Branch::Pc1Minus), MorseType::Saddle);
        assert_eq!(morse(Branch::Pc2Plus), MorseType::Min);
        assert_eq!(morse(Branch::Pc2Minus), MorseType::Saddle);
        let cp = pts
            .iter()
            .find(|c| c.branch == Some(Branch::Pc2Plus))
            .unwrap();
        assert_eq!(classify(cp), (MorseType::Min, Some(0)));
        assert_eq!(MorseType::Min.report_alias(), "summit/extremum");

        let beyond = critical_points(1.0 / 36.0);
        assert!(beyond.iter().all(|c| c.morse == MorseType::Saddle));
    }

    #[test]
    fn listed_sign_pattern_below_merge() {
        // λ, μ signs of the table for 0 < s < 1/72
        let s = 0.004;
        let expected = [
            (Branch::Pc1Plus, [-1.0, 1.0]),
            (Branch::Pc1Minus, [1.0, -1.0]),
            (Branch::Pc2Plus, [1.0, 1.0]),
            (Branch::Pc2Minus, [1.0, -1.0]),
        ];
        for (b, signs) in expected {
            let cp = critical_points(s)
                .into_iter()
                .find(|c| c.branch == Some(b))
                .unwrap();
            assert_eq!(cp.eigen[0].value.signum(), signs[0], "{b}");
            assert_eq!(cp.eigen[1].value.signum(), signs[1], "{b}");
        }
    }

    #[test]
    fn critical_value_examples() {
        let z = critical_values_exact(&merge_scale()).unwrap();
        assert_eq!(z[&Branch::Pc1Plus], rat(1, 54));
        assert_eq!(z[&Branch::Pc2Plus], rat(1, 54));
        assert_eq!(z[&Branch::Pc2Minus], rat(1, 27));
        let z0 = critical_values_exact(&int(0)).unwrap();
        assert_eq!(z0[&Branch::Pc2Plus], int(0));
        assert_eq!(z0[&Branch::Pc2Minus], int(0));
        assert_eq!(z0[&Branch::Pc1Minus], rat(1, 216));
        assert!(matches!(
            critical_value(Branch::Pc1Plus, 0.02),
            Err(DamonError::NotReal { .. })
        ));
        assert!(matches!(
            critical_values_exact(&rat(1, 3)),
            Err(DamonError::Irrational(_))
        ));
    }

    #[test]
    fn median_section_examples() {
        assert_eq!(median_section(0.0, &[0.0]), vec![(0.0, 0.0)]);
        let v = median_section(S_MERGE, &[1.0 / 6.0])[0].1;
        assert!((v - 1.0 / 54.0).abs() < 1e-16);
        let s = 1.0 / 144.0;
        let x = -1.0 / (6.0 * 2f64.sqrt());
        let v = median_section(s, &[x])[0].1;
        assert!((v - critical_value(Branch::Pc2Minus, s).unwrap()).abs() < 1e-16);
    }

    #[test]
    fn events_and_sign_changes() {
        let ev = bifurcation_events();
        assert_eq!(ev.len(), 2);
        assert_eq!(ev[0].kind, ExampleEventKind::Creation);
        assert_eq!(ev[0].s, int(0));
        assert_eq!(ev[1].s, rat(1, 72));
        assert_eq!(ev[1].location, [rat(1, 6), int(0)]);
        assert_eq!(ev[1].survivor, Some((Branch::Pc2Plus, MorseType::Saddle)));
        // the survivor is a saddle right after the merge
        let after = critical_points(S_MERGE * 1.01);
        assert_eq!(after[0].branch, Some(Branch::Pc2Plus));
        assert_eq!(after[0].morse, MorseType::Saddle);

        assert_eq!(eigen_signchange_scales(), [rat(1, 72), rat(1, 72)]);
        // 1 − 64/72 = 1/9, √ = 1/3
        assert_eq!(rational_sqrt(&(int(1) - rat(64, 72))), Some(rat(1, 3)));
        assert!(solve_sqrt_linear(&int(-1), &int(1), &int(0), &int(1)).is_err());
    }
}
