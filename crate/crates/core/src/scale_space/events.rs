use log::debug;
use serde::Serialize;

use super::track::{EndStatus, TrackRun, Trajectory};
use super::{detect_with, DetectConfig, ScaleSpace, ScaleSpaceError};
use crate::morse::MorseType;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EventKind {
    Creation,
    Annihilation,
    Merge,
}

impl EventKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EventKind::Creation => "creation",
            EventKind::Annihilation => "annihilation",
            EventKind::Merge => "merge",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScaleEvent {
    pub kind: EventKind,
    pub s_estimate: f64,
    /// Scales known to lie on either side of the event.
    pub bracket: [f64; 2],
    pub location: [f64; 2],
    /// Trajectory ids; for a merge the survivor is listed last.
    pub participants: Vec<usize>,
    pub survivor: Option<usize>,
    /// Rung on the many-points side of the event.
    pub rung: usize,
    pub refined: bool,
}

fn dist2(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)
}

/// Scale at which the squared separation of `a` and `b`, linear in `s` through
/// their positions at rungs `k0` and `k1`, reaches zero.
fn fold_scale(a: &Trajectory, b: &Trajectory, k0: usize, k1: usize) -> Option<f64> {
    let (a0, a1) = (a.at_rung(k0)?, a.at_rung(k1)?);
    let (b0, b1) = (b.at_rung(k0)?, b.at_rung(k1)?);
    let d0 = dist2(a0.point.position, b0.point.position);
    let d1 = dist2(a1.point.position, b1.point.position);
    let slope = (d1 - d0) / (a1.s - a0.s);
    if slope == 0.0 {
        return None;
    }
    let s = a1.s - d1 / slope;
    s.is_finite().then_some(s)
}

struct Groups(Vec<usize>);

impl Groups {
    fn find(&mut self, mut i: usize) -> usize {
        while self.0[i] != i {
            self.0[i] = self.0[self.0[i]];
            i = self.0[i];
        }
        i
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Events read off the trajectories alone, without refinement.
pub(crate) fn classify_events(run: &TrackRun) -> Vec<ScaleEvent> {
    let mut events = endings(run);
    events.extend(creations(run));
    events.sort_by(|a, b| {
        a.s_estimate
            .total_cmp(&b.s_estimate)
            .then(a.rung.cmp(&b.rung))
    });
    events
}

fn endings(run: &TrackRun) -> Vec<ScaleEvent> {
    let radius = run.config.event_radius_cells * run.h;
    let last = run.rungs.len() - 1;
    let mut events = Vec::new();
    for k in 0..last {
        let (sk, sn) = (run.rungs[k].s, run.rungs[k + 1].s);
        let enders: Vec<&Trajectory> = run
            .trajectories
            .iter()
            .filter(|t| t.last_rung() == k && t.end != EndStatus::AtBoundary)
            .collect();
        if enders.len() < 2 {
            continue;
        }
        let mut groups = Groups((0..enders.len()).collect());
        let mut folds: Vec<Vec<f64>> = vec![Vec::new(); enders.len()];
        for a in 0..enders.len() {
            for b in a + 1..enders.len() {
                let pa = enders[a].last().point.position;
                let pb = enders[b].last().point.position;
                let fold = (k > 0)
                    .then(|| fold_scale(enders[a], enders[b], k - 1, k))
                    .flatten()
                    .filter(|&s| s >= sk && s <= sn + 0.25 * (sn - sk));
                if dist2(pa, pb).sqrt() <= radius || fold.is_some() {
                    groups.union(a, b);
                    if let Some(s) = fold {
                        folds[a].push(s);
                    }
                }
            }
        }
        let mut roots: Vec<usize> = (0..enders.len()).map(|i| groups.find(i)).collect();
        roots.sort_unstable();
        roots.dedup();
        for root in roots {
            let members: Vec<usize> = (0..enders.len())
                .filter(|&i| groups.find(i) == root)
                .collect();
            if members.len() < 2 {
                continue;
            }
            let mut participants: Vec<usize> = members.iter().map(|&i| enders[i].id).collect();
            let ends: Vec<[f64; 2]> = members
                .iter()
                .map(|&i| enders[i].last().point.position)
                .collect();
            let centroid = mean(&ends);
            let spread = ends
                .iter()
                .map(|&p| dist2(p, centroid).sqrt())
                .fold(0.0, f64::max);
            let survivor = run
                .trajectories
                .iter()
                .filter_map(|t| {
                    t.at_rung(k)?;
                    let d = dist2(t.at_rung(k + 1)?.point.position, centroid).sqrt();
                    (d <= radius + spread).then_some((d, t))
                })
                .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.id.cmp(&b.1.id)))
                .map(|(_, t)| t);
            let mut at_k = ends.clone();
            if let Some(t) = survivor {
                participants.push(t.id);
                at_k.push(t.at_rung(k).map(|p| p.point.position).unwrap_or(centroid));
            }
            let fold_est: Vec<f64> = members
                .iter()
                .flat_map(|&i| folds[i].iter().copied())
                .collect();
            let s_estimate = if fold_est.is_empty() {
                0.5 * (sk + sn)
            } else {
                (fold_est.iter().sum::<f64>() / fold_est.len() as f64).clamp(sk, sn)
            };
            events.push(ScaleEvent {
                kind: if survivor.is_some() {
                    EventKind::Merge
                } else {
                    EventKind::Annihilation
                },
                s_estimate,
                bracket: [sk, sn],
                location: mean(&at_k),
                participants,
                survivor: survivor.map(|t| t.id),
                rung: k,
                refined: false,
            });
        }
    }
    events
}

fn creations(run: &TrackRun) -> Vec<ScaleEvent> {
    let radius = run.config.event_radius_cells * run.h;
    let last = run.rungs.len() - 1;
    let mut events = Vec::new();
    for k in 1..=last {
        let (sp, sk) = (run.rungs[k - 1].s, run.rungs[k].s);
        let starters: Vec<&Trajectory> = run
            .trajectories
            .iter()
            .filter(|t| t.first_rung() == k && t.start == EndStatus::Created)
            .collect();
        let mut pairs: Vec<(f64, usize, usize, Option<f64>)> = Vec::new();
        for a in 0..starters.len() {
            for b in a + 1..starters.len() {
                let (ma, mb) = (
                    starters[a].first().point.morse,
                    starters[b].first().point.morse,
                );
                let complementary = match (ma.index(), mb.index()) {
                    (Some(ia), Some(ib)) => ia.abs_diff(ib) == 1,
                    _ => false,
                };
                if !complementary {
                    continue;
                }
                let d = dist2(
                    starters[a].first().point.position,
                    starters[b].first().point.position,
                )
                .sqrt();
                let fold = (k < last)
                    .then(|| fold_scale(starters[a], starters[b], k, k + 1))
                    .flatten()
                    .filter(|&s| s <= sk && s >= sp - 0.25 * (sk - sp));
                if d <= radius || fold.is_some() {
                    pairs.push((d, a, b, fold));
                }
            }
        }
        pairs.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2)));
        let mut used = vec![false; starters.len()];
        for (_, a, b, fold) in pairs {
            if used[a] || used[b] {
                continue;
            }
            used[a] = true;
            used[b] = true;
            let (ta, tb) = (starters[a], starters[b]);
            events.push(ScaleEvent {
                kind: EventKind::Creation,
                s_estimate: fold.map_or(0.5 * (sp + sk), |s| s.clamp(sp, sk)),
                bracket: [sp, sk],
                location: mean(&[ta.first().point.position, tb.first().point.position]),
                participants: vec![ta.id, tb.id],
                survivor: None,
                rung: k,
                refined: false,
            });
        }
    }
    events
}

fn mean(points: &[[f64; 2]]) -> [f64; 2] {
    let n = points.len() as f64;
    let (sx, sy) = points
        .iter()
        .fold((0.0, 0.0), |(a, b), p| (a + p[0], b + p[1]));
    [sx / n, sy / n]
}

/// Creation, annihilation and merge events of a tracked run.
///
/// With `refine`, each event scale is bisected inside its bracket by recomputing
/// the field near the event and counting critical points there, until the
/// bracket is narrower than the configured relative width.
pub fn find_events(
    space: &ScaleSpace,
    run: &TrackRun,
    refine: bool,
) -> Result<Vec<ScaleEvent>, ScaleSpaceError> {
    let mut events = classify_events(run);
    if refine {
        for ev in &mut events {
            refine_event(space, run, ev)?;
        }
        events.sort_by(|a, b| {
            a.s_estimate
                .total_cmp(&b.s_estimate)
                .then(a.rung.cmp(&b.rung))
        });
    }
    Ok(events)
}

fn refine_event(
    space: &ScaleSpace,
    run: &TrackRun,
    ev: &mut ScaleEvent,
) -> Result<(), ScaleSpaceError> {
    let h = run.h;
    // the rung with more points sits at the low end for endings, the high end for creations
    let rich_low = ev.kind != EventKind::Creation;
    let rich_rung = ev.rung;
    let positions: Vec<[f64; 2]> = ev
        .participants
        .iter()
        .filter_map(|&id| run.trajectories[id].at_rung(rich_rung))
        .map(|p| p.point.position)
        .collect();
    let needed = match ev.kind {
        EventKind::Creation => 2,
        _ => positions.len(),
    };
    let radius = positions
        .iter()
        .map(|&p| dist2(p, ev.location).sqrt())
        .fold(0.0, f64::max)
        + 2.0 * h;
    let cfg = DetectConfig {
        region: None,
        ..run.config.detect.clone()
    };
    let rich = |s: f64| -> Result<bool, ScaleSpaceError> {
        let field = space.local_field(s, ev.location, radius + 2.0 * h)?;
        let n = detect_with(&field, &cfg)
            .iter()
            .filter(|cp| cp.morse != MorseType::Degenerate || ev.kind != EventKind::Creation)
            .filter(|cp| cp.distance_to(ev.location) <= radius)
            .count();
        Ok(n >= needed)
    };
    let [mut lo, mut hi] = ev.bracket;
    let mut iterations = 0;
    while hi - lo > run.config.refine_rel * lo.abs().max(hi.abs())
        && iterations < run.config.refine_max_iter
    {
        let mid = 0.5 * (lo + hi);
        if rich(mid)? == rich_low {
            lo = mid;
        } else {
            hi = mid;
        }
        iterations += 1;
    }
    debug!(
        "{} event near ({:.4}, {:.4}) bracketed in [{lo:.8e}, {hi:.8e}] after {iterations} bisections",
        ev.kind.as_str(),
        ev.location[0],
        ev.location[1]
    );
    ev.bracket = [lo, hi];
    ev.s_estimate = 0.5 * (lo + hi);
    ev.refined = true;
    Ok(())
}
