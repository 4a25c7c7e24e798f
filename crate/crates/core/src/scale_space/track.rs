use log::debug;
use serde::Serialize;

use super::events::{classify_events, EventKind};
use super::grid::sample_nodes;
use super::{
    blur, detect_with, sample, DetectConfig, GridField, PolySlice, ScaleSpaceError, Window,
};
use crate::morse::{CriticalPoint, MorseType};
use crate::poly::{HornerPoly, PolyError, Polynomial};

/// How fields at later scales are produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BlurMode {
    /// Discrete Gaussian convolution of the initial samples.
    Numeric,
    /// Fresh samples of the analytic family at each scale.
    Oracle,
}

impl std::str::FromStr for BlurMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "numeric" => Ok(BlurMode::Numeric),
            "oracle" => Ok(BlurMode::Oracle),
            other => Err(format!("unknown blur mode `{other}`")),
        }
    }
}

/// A scale-space generator: initial samples plus, optionally, the analytic family behind them.
#[derive(Debug, Clone)]
pub struct ScaleSpace {
    initial: GridField,
    family: Option<HornerPoly>,
    mode: BlurMode,
}

impl ScaleSpace {
    /// Numeric scale space of an arbitrary grid.
    pub fn numeric(initial: GridField) -> Self {
        ScaleSpace {
            initial,
            family: None,
            mode: BlurMode::Numeric,
        }
    }

    /// Samples the family `p(x, y, s)` at `s0` on `window`.
    pub fn from_family(
        family: &Polynomial,
        window: Window,
        h: f64,
        s0: f64,
        mode: BlurMode,
    ) -> Result<Self, ScaleSpaceError> {
        if family.n_spatial() != 2 {
            return Err(PolyError::DimensionMismatch {
                expected: 2,
                got: family.n_spatial(),
            }
            .into());
        }
        let horner = family.horner();
        let initial = sample(&PolySlice::from_horner(horner.clone(), s0), window, h, s0)?;
        Ok(ScaleSpace {
            initial,
            family: Some(horner),
            mode,
        })
    }

    pub fn initial(&self) -> &GridField {
        &self.initial
    }

    pub fn mode(&self) -> BlurMode {
        self.mode
    }

    pub fn s0(&self) -> f64 {
        self.initial.s()
    }

    /// The full field at scale `s ≥ s0`.
    pub fn field_at(&self, s: f64) -> Result<GridField, ScaleSpaceError> {
        match (&self.family, self.mode) {
            (Some(f), BlurMode::Oracle) => {
                let g = &self.initial;
                let (nx, ny) = g.dims();
                sample_nodes(
                    &PolySlice::from_horner(f.clone(), s),
                    g.origin(),
                    g.h(),
                    nx,
                    ny,
                    s,
                )
            }
            _ => blur(&self.initial, s - self.s0()),
        }
    }

    /// A field at scale `s` valid at least within `radius` of `centre`, computed on as small a grid as possible.
    pub fn local_field(
        &self,
        s: f64,
        centre: [f64; 2],
        radius: f64,
    ) -> Result<GridField, ScaleSpaceError> {
        let g = &self.initial;
        let h = g.h();
        match (&self.family, self.mode) {
            (Some(f), BlurMode::Oracle) => {
                let (i0, j0, nx, ny) = g.index_box(centre, radius, 4);
                let slice = PolySlice::from_horner(f.clone(), s);
                sample_nodes(&slice, [g.x(i0), g.y(j0)], h, nx, ny, s)
            }
            _ => {
                let ds = s - self.s0();
                if !(ds >= 0.0) {
                    return Err(ScaleSpaceError::NegativeScale(ds));
                }
                let reach = (4.0 * (2.0 * ds).sqrt() / h).ceil() as usize + g.margin() + 4;
                let (i0, j0, nx, ny) = g.index_box(centre, radius, reach);
                blur(&g.crop(i0, j0, nx, ny)?, ds)
            }
        }
    }
}

/// Linking and event parameters. Distances are in cells of the grid spacing.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrackConfig {
    /// Minimum linking gate radius.
    pub gate_cells: f64,
    /// Gate radius as a multiple of the predicted displacement.
    pub gate_factor: f64,
    /// Relative distance gap under which two link candidates count as tied.
    pub tie_tolerance: f64,
    /// Event proximity threshold.
    pub event_radius_cells: f64,
    /// Relative bracket width at which event bisection stops.
    pub refine_rel: f64,
    pub refine_max_iter: usize,
    #[serde(skip)]
    pub detect: DetectConfig,
}

impl Default for TrackConfig {
    fn default() -> Self {
        TrackConfig {
            gate_cells: 3.0,
            gate_factor: 2.0,
            tie_tolerance: 0.1,
            event_radius_cells: 5.0,
            refine_rel: 0.01,
            refine_max_iter: 60,
            detect: DetectConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EndStatus {
    AtBoundary,
    Vanished,
    Merged,
    Created,
}

impl EndStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            EndStatus::AtBoundary => "at_boundary",
            EndStatus::Vanished => "vanished",
            EndStatus::Merged => "merged",
            EndStatus::Created => "created",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrackPoint {
    pub rung: usize,
    pub s: f64,
    pub point: CriticalPoint,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub id: usize,
    pub points: Vec<TrackPoint>,
    pub start: EndStatus,
    pub end: EndStatus,
}

impl Trajectory {
    pub fn first_rung(&self) -> usize {
        self.points[0].rung
    }

    pub fn last_rung(&self) -> usize {
        self.points[self.points.len() - 1].rung
    }

    pub fn first(&self) -> &TrackPoint {
        &self.points[0]
    }

    pub fn last(&self) -> &TrackPoint {
        &self.points[self.points.len() - 1]
    }

    pub fn at_rung(&self, rung: usize) -> Option<&TrackPoint> {
        let first = self.first_rung();
        if rung < first {
            return None;
        }
        self.points.get(rung - first).filter(|p| p.rung == rung)
    }

    /// Morse types along the trajectory with consecutive repeats removed.
    pub fn morse_sequence(&self) -> Vec<MorseType> {
        let mut out: Vec<MorseType> = Vec::new();
        for p in &self.points {
            if out.last() != Some(&p.point.morse) {
                out.push(p.point.morse);
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Census {
    pub min: usize,
    pub max: usize,
    pub saddle: usize,
    pub degenerate: usize,
}

impl Census {
    pub fn of(points: &[CriticalPoint]) -> Self {
        let mut c = Census::default();
        for p in points {
            match p.morse {
                MorseType::Min => c.min += 1,
                MorseType::Max => c.max += 1,
                MorseType::Saddle => c.saddle += 1,
                MorseType::Degenerate => c.degenerate += 1,
            }
        }
        c
    }

    pub fn total(&self) -> usize {
        self.min + self.max + self.saddle + self.degenerate
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Rung {
    pub s: f64,
    pub detections: Vec<CriticalPoint>,
    pub census: Census,
    /// Region in which detections are trusted.
    pub valid: Option<Window>,
    pub under_resolved: bool,
}

/// Everything produced by [`track`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrackRun {
    pub h: f64,
    pub window: Window,
    pub mode: BlurMode,
    pub config: TrackConfig,
    pub rungs: Vec<Rung>,
    pub trajectories: Vec<Trajectory>,
}

impl TrackRun {
    pub fn ladder(&self) -> Vec<f64> {
        self.rungs.iter().map(|r| r.s).collect()
    }
}

fn check_ladder(s0: f64, ladder: &[f64]) -> Result<(), ScaleSpaceError> {
    if ladder.is_empty() {
        return Err(ScaleSpaceError::EmptyLadder);
    }
    if (ladder[0] - s0).abs() > 1e-12 * s0.abs().max(1.0) {
        return Err(ScaleSpaceError::Ladder {
            start: s0,
            index: 0,
        });
    }
    for (k, w) in ladder.windows(2).enumerate() {
        if !(w[1] > w[0]) || !w[1].is_finite() {
            return Err(ScaleSpaceError::Ladder {
                start: s0,
                index: k + 1,
            });
        }
    }
    Ok(())
}

/// Detects critical points at every rung of `ladder` and links them into trajectories.
///
/// The ladder must start at the initial scale of `space` and increase strictly.
pub fn track(
    space: &ScaleSpace,
    ladder: &[f64],
    cfg: &TrackConfig,
) -> Result<TrackRun, ScaleSpaceError> {
    check_ladder(space.s0(), ladder)?;
    let h = space.initial().h();
    let mut rungs: Vec<Rung> = Vec::with_capacity(ladder.len());
    let mut trajectories: Vec<Trajectory> = Vec::new();
    for (k, &s) in ladder.iter().enumerate() {
        let field = if k == 0 {
            space.initial().clone()
        } else {
            space.field_at(s)?
        };
        let detections = detect_with(&field, &cfg.detect);
        debug!("rung {k}: s = {s:.6e}, {} detections", detections.len());
        rungs.push(Rung {
            s,
            census: Census::of(&detections),
            detections,
            valid: field.valid_window(),
            under_resolved: field.under_resolved(),
        });
        let rung = &rungs[k];
        let mut taken = vec![false; rung.detections.len()];
        if k > 0 {
            link_rung(&mut trajectories, k, rung, &field, cfg, &mut taken);
        }
        for (d, cp) in rung.detections.iter().enumerate() {
            if !taken[d] {
                let id = trajectories.len();
                trajectories.push(Trajectory {
                    id,
                    points: vec![TrackPoint {
                        rung: k,
                        s: rung.s,
                        point: cp.clone(),
                    }],
                    start: if k == 0 {
                        EndStatus::AtBoundary
                    } else {
                        EndStatus::Created
                    },
                    end: EndStatus::Vanished,
                });
            }
        }
    }

    let last = rungs.len() - 1;
    for t in &mut trajectories {
        let k = t.last_rung();
        t.end = if k == last {
            EndStatus::AtBoundary
        } else {
            let near_border = rungs[k + 1].valid.is_none_or(|w| {
                let p = t.last().point.position;
                let gap = cfg.gate_cells * h;
                p[0] - w.x0 < gap || w.x1 - p[0] < gap || p[1] - w.y0 < gap || w.y1 - p[1] < gap
            });
            if near_border {
                EndStatus::AtBoundary
            } else {
                EndStatus::Vanished
            }
        };
    }

    let mut run = TrackRun {
        h,
        window: space.initial().window(),
        mode: space.mode(),
        config: cfg.clone(),
        rungs,
        trajectories,
    };
    for ev in classify_events(&run) {
        if ev.kind == EventKind::Merge {
            for &id in &ev.participants {
                let t = &mut run.trajectories[id];
                if t.last_rung() == ev.rung {
                    t.end = EndStatus::Merged;
                }
            }
        }
    }
    Ok(run)
}

/// Position of a trajectory at the new rung: linear extrapolation of its last two
/// positions, or one Newton step on the new field when it has a single point.
fn predict(t: &Trajectory, s: f64, field: &GridField) -> [f64; 2] {
    let last = t.last();
    let p = last.point.position;
    let n = t.points.len();
    if n >= 2 && t.points[n - 2].rung + 1 == last.rung {
        let prev = &t.points[n - 2];
        let r = (s - last.s) / (last.s - prev.s);
        let q = prev.point.position;
        return [p[0] + r * (p[0] - q[0]), p[1] + r * (p[1] - q[1])];
    }
    if field.valid_window().is_some_and(|w| w.contains(p)) {
        let fit = field.local_fit(p[0], p[1]);
        if let Some(d) = fit.hessian.solve(fit.gradient) {
            let step = d[0].hypot(d[1]);
            if step.is_finite() && step <= 16.0 * field.h() {
                return [p[0] - d[0], p[1] - d[1]];
            }
        }
    }
    p
}

fn link_rung(
    trajectories: &mut [Trajectory],
    k: usize,
    rung: &Rung,
    field: &GridField,
    cfg: &TrackConfig,
    taken: &mut [bool],
) {
    let h = field.h();
    let detections = &rung.detections;
    let s = rung.s;
    let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
    for (ti, t) in trajectories.iter().enumerate() {
        if t.last_rung() != k - 1 || t.last().point.morse == MorseType::Degenerate {
            continue;
        }
        let p = t.last().point.position;
        let pred = predict(t, s, field);
        let disp = (pred[0] - p[0]).hypot(pred[1] - p[1]);
        let gate = (cfg.gate_cells * h).max(cfg.gate_factor * disp);
        let mut local: Vec<(f64, usize)> = detections
            .iter()
            .enumerate()
            .map(|(d, cp)| (cp.distance_to(pred), d))
            .filter(|(dist, _)| *dist <= gate)
            .collect();
        local.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        if let [a, b, ..] = local[..] {
            if b.0 <= a.0 * (1.0 + cfg.tie_tolerance) {
                debug!(
                    "rung {k}: trajectory {} has near-tied candidates {} ({:.3e}) and {} ({:.3e}); preferring the first",
                    t.id, a.1, a.0, b.1, b.0
                );
            }
        }
        pairs.extend(local.into_iter().map(|(dist, d)| (dist, ti, d)));
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut linked = vec![false; trajectories.len()];
    for (_, ti, d) in pairs {
        if linked[ti] || taken[d] {
            continue;
        }
        linked[ti] = true;
        taken[d] = true;
        trajectories[ti].points.push(TrackPoint {
            rung: k,
            s,
            point: detections[d].clone(),
        });
    }
}
