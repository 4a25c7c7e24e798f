//! Hessian eigen-analysis and Morse classification of planar critical points.

use serde::{Deserialize, Serialize};
use std::fmt;

/// Absolute eigenvalue tolerance below which a critical point counts as degenerate.
pub const EPS_LAMBDA: f64 = 1e-9;

/// Symmetric 2×2 matrix `[[xx, xy], [xy, yy]]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymMat2 {
    pub xx: f64,
    pub xy: f64,
    pub yy: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenPair {
    pub value: f64,
    /// Unit eigenvector.
    pub vector: [f64; 2],
}

impl SymMat2 {
    pub fn new(xx: f64, xy: f64, yy: f64) -> Self {
        SymMat2 { xx, xy, yy }
    }

    pub fn det(&self) -> f64 {
        self.xx * self.yy - self.xy * self.xy
    }

    pub fn trace(&self) -> f64 {
        self.xx + self.yy
    }

    pub fn apply(&self, v: [f64; 2]) -> [f64; 2] {
        [
            self.xx * v[0] + self.xy * v[1],
            self.xy * v[0] + self.yy * v[1],
        ]
    }

    /// Eigenpairs in ascending eigenvalue order.
    pub fn eigen(&self) -> [EigenPair; 2] {
        let mean = 0.5 * (self.xx + self.yy);
        let half_diff = 0.5 * (self.xx - self.yy);
        let radius = half_diff.hypot(self.xy);
        let lo = mean - radius;
        let hi = mean + radius;
        // eigenvector of `hi`, then rotate by 90° for `lo`
        let v_hi = if radius == 0.0 {
            [1.0, 0.0]
        } else if half_diff >= 0.0 {
            normalize([half_diff + radius, self.xy])
        } else {
            normalize([self.xy, radius - half_diff])
        };
        let v_lo = [-v_hi[1], v_hi[0]];
        [
            EigenPair {
                value: lo,
                vector: v_lo,
            },
            EigenPair {
                value: hi,
                vector: v_hi,
            },
        ]
    }

    /// Ratio of the largest to the smallest absolute eigenvalue.
    pub fn condition_number(&self) -> f64 {
        let [a, b] = self.eigen();
        let (lo, hi) = (
            a.value.abs().min(b.value.abs()),
            a.value.abs().max(b.value.abs()),
        );
        if lo == 0.0 {
            f64::INFINITY
        } else {
            hi / lo
        }
    }

    /// Solves `self · d = rhs`; `None` when singular.
    pub fn solve(&self, rhs: [f64; 2]) -> Option<[f64; 2]> {
        let det = self.det();
        if det == 0.0 || !det.is_finite() {
            return None;
        }
        Some([
            (self.yy * rhs[0] - self.xy * rhs[1]) / det,
            (self.xx * rhs[1] - self.xy * rhs[0]) / det,
        ])
    }
}

fn normalize(v: [f64; 2]) -> [f64; 2] {
    let n = v[0].hypot(v[1]);
    [v[0] / n, v[1] / n]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MorseType {
    Min,
    Max,
    Saddle,
    Degenerate,
}

impl MorseType {
    /// Number of negative Hessian eigenvalues; `None` when degenerate.
    pub fn index(self) -> Option<u8> {
        match self {
            MorseType::Min => Some(0),
            MorseType::Saddle => Some(1),
            MorseType::Max => Some(2),
            MorseType::Degenerate => None,
        }
    }

    pub fn is_extremum(self) -> bool {
        matches!(self, MorseType::Min | MorseType::Max)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            MorseType::Min => "min",
            MorseType::Max => "max",
            MorseType::Saddle => "saddle",
            MorseType::Degenerate => "degenerate",
        }
    }

    /// Wording used in reports: extrema are reported as "summit/extremum", saddles as "col".
    pub fn report_alias(self) -> &'static str {
        match self {
            MorseType::Min | MorseType::Max => "summit/extremum",
            MorseType::Saddle => "col",
            MorseType::Degenerate => "degenerate",
        }
    }
}

impl fmt::Display for MorseType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for MorseType {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "min" => Ok(MorseType::Min),
            "max" => Ok(MorseType::Max),
            "saddle" => Ok(MorseType::Saddle),
            "degenerate" => Ok(MorseType::Degenerate),
            other => Err(format!("unknown Morse type `{other}`")),
        }
    }
}

/// Classifies from two eigenvalues with absolute tolerance `eps`.
pub fn classify_eigenvalues(l1: f64, l2: f64, eps: f64) -> MorseType {
    if l1.abs().min(l2.abs()) <= eps {
        MorseType::Degenerate
    } else if l1 > 0.0 && l2 > 0.0 {
        MorseType::Min
    } else if l1 < 0.0 && l2 < 0.0 {
        MorseType::Max
    } else {
        MorseType::Saddle
    }
}

/// The four critical branches of the worked example.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Branch {
    Pc1Plus,
    Pc1Minus,
    Pc2Plus,
    Pc2Minus,
}

impl Branch {
    pub const ALL: [Branch; 4] = [
        Branch::Pc1Plus,
        Branch::Pc1Minus,
        Branch::Pc2Plus,
        Branch::Pc2Minus,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Branch::Pc1Plus => "pc1+",
            Branch::Pc1Minus => "pc1-",
            Branch::Pc2Plus => "pc2+",
            Branch::Pc2Minus => "pc2-",
        }
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A located critical point of a planar scalar field at scale `s`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalPoint {
    pub position: [f64; 2],
    pub s: f64,
    pub z: f64,
    pub hessian: SymMat2,
    pub eigen: [EigenPair; 2],
    pub morse: MorseType,
    /// Closed-form branch label when known.
    pub branch: Option<Branch>,
}

impl CriticalPoint {
    /// Builds a point from its Hessian, classifying with tolerance `eps`.
    /// Eigenpairs are stored in ascending order.
    pub fn from_hessian(position: [f64; 2], s: f64, z: f64, hessian: SymMat2, eps: f64) -> Self {
        let eigen = hessian.eigen();
        let morse = classify_eigenvalues(eigen[0].value, eigen[1].value, eps);
        CriticalPoint {
            position,
            s,
            z,
            hessian,
            eigen,
            morse,
            branch: None,
        }
    }

    pub fn eigenvalues(&self) -> [f64; 2] {
        [self.eigen[0].value, self.eigen[1].value]
    }

    pub fn distance_to(&self, p: [f64; 2]) -> f64 {
        (self.position[0] - p[0]).hypot(self.position[1] - p[1])
    }
}
