use umbilic_core::damon;
use umbilic_core::morse::MorseType;
use umbilic_core::poly::{damon_family, Polynomial};
use umbilic_core::scale_space::{
    detect, find_events, level_sets, sample, track, BlurMode, EndStatus, EventKind, PolySlice,
    ScaleSpace, TrackConfig, TrackRun, Window,
};

fn ladder(s0: f64, s1: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| s0 + (s1 - s0) * k as f64 / (n - 1) as f64)
        .collect()
}

fn damon_run(mode: BlurMode, h: f64, half: f64) -> (ScaleSpace, TrackRun) {
    let space =
        ScaleSpace::from_family(&damon_family(), Window::square(half), h, 1.0 / 720.0, mode)
            .unwrap();
    let run = track(
        &space,
        &ladder(1.0 / 720.0, 1.0 / 36.0, 64),
        &TrackConfig::default(),
    )
    .unwrap();
    (space, run)
}

#[test]
fn damon_four_trajectories_collapse_to_two() {
    let (space, run) = damon_run(BlurMode::Oracle, 1.0 / 256.0, 0.5);
    assert_eq!(run.rungs[0].census.total(), 4);
    assert_eq!(run.rungs.last().unwrap().census.total(), 2);
    assert_eq!(run.trajectories.len(), 4);
    let merged = run
        .trajectories
        .iter()
        .filter(|t| t.end == EndStatus::Merged)
        .count();
    assert_eq!(merged, 2);

    let events = find_events(&space, &run, false).unwrap();
    assert_eq!(events.len(), 1);
    assert_eq!(events[0].kind, EventKind::Merge);
    assert_eq!(events[0].participants.len(), 3);
    let [lo, hi] = events[0].bracket;
    assert!(lo <= events[0].s_estimate && events[0].s_estimate <= hi);
}

#[test]
fn pc2_plus_follows_square_root_law() {
    let (_, run) = damon_run(BlurMode::Oracle, 1.0 / 512.0, 0.5);
    let t = run
        .trajectories
        .iter()
        .find(|t| t.first().point.position[0] > 0.0 && t.first().point.position[1].abs() < 1e-6)
        .expect("pc2+ trajectory");
    assert_eq!(t.points.len(), 64);
    for p in &t.points {
        let want = (2.0 * p.s).sqrt();
        assert!(
            (p.point.position[0] - want).abs() < 1e-3,
            "s={} x={}",
            p.s,
            p.point.position[0]
        );
    }
}

#[test]
fn morse_type_changes_only_at_events() {
    for (mode, h, half) in [
        (BlurMode::Oracle, 1.0 / 256.0, 0.5),
        (BlurMode::Numeric, 1.0 / 128.0, 1.5),
    ] {
        let (space, run) = damon_run(mode, h, half);
        let events = find_events(&space, &run, false).unwrap();
        for t in &run.trajectories {
            for w in t.points.windows(2) {
                if w[0].point.morse != w[1].point.morse {
                    let explained = events
                        .iter()
                        .any(|e| e.rung == w[0].rung && e.participants.contains(&t.id));
                    assert!(
                        explained,
                        "{mode:?}: trajectory {} changes type at rung {}",
                        t.id, w[0].rung
                    );
                }
            }
        }
    }
}

#[test]
fn numeric_and_oracle_modes_agree() {
    let (_, oracle) = damon_run(BlurMode::Oracle, 1.0 / 128.0, 1.5);
    let (_, numeric) = damon_run(BlurMode::Numeric, 1.0 / 128.0, 1.5);
    for (a, b) in oracle.rungs.iter().zip(&numeric.rungs) {
        let inside: Vec<_> = a
            .detections
            .iter()
            .filter(|p| b.valid.is_some_and(|w| w.contains(p.position)))
            .collect();
        assert_eq!(inside.len(), b.detections.len(), "s={}", a.s);
        for p in inside {
            let d = b
                .detections
                .iter()
                .map(|q| q.distance_to(p.position))
                .fold(f64::INFINITY, f64::min);
            assert!(d < 1e-9, "s={} mismatch {d:e}", a.s);
        }
    }
}

#[test]
fn creation_pairs_saddle_with_extremum() {
    let space = ScaleSpace::from_family(
        &damon_family(),
        Window::square(0.5),
        1.0 / 512.0,
        0.0,
        BlurMode::Oracle,
    )
    .unwrap();
    let run = track(&space, &[0.0, 1e-5, 3e-5, 1e-4], &TrackConfig::default()).unwrap();
    let events = find_events(&space, &run, true).unwrap();
    let creations: Vec<_> = events
        .iter()
        .filter(|e| e.kind == EventKind::Creation)
        .collect();
    assert_eq!(creations.len(), 1);
    let c = creations[0];
    assert_eq!(c.participants.len(), 2);
    let types: Vec<MorseType> = c
        .participants
        .iter()
        .map(|&id| run.trajectories[id].first().point.morse)
        .collect();
    assert!(types.contains(&MorseType::Saddle));
    assert!(types.iter().any(|m| m.is_extremum()));
    assert!(c.bracket[0] >= 0.0 && c.bracket[1] <= 1e-5);
    assert!(c.location[0].hypot(c.location[1]) < 1.0 / 512.0);
}

#[test]
fn bowl_has_no_events() {
    let bowl = Polynomial::parse("x^2 + y^2 + 4*s", 2).unwrap();
    for mode in [BlurMode::Oracle, BlurMode::Numeric] {
        let space =
            ScaleSpace::from_family(&bowl, Window::square(1.0), 1.0 / 64.0, 0.0, mode).unwrap();
        let run = track(&space, &ladder(0.0, 0.01, 12), &TrackConfig::default()).unwrap();
        assert_eq!(run.trajectories.len(), 1);
        assert!(find_events(&space, &run, true).unwrap().is_empty());
    }
}

#[test]
fn tracking_is_deterministic() {
    let (_, a) = damon_run(BlurMode::Oracle, 1.0 / 128.0, 0.5);
    let (_, b) = damon_run(BlurMode::Oracle, 1.0 / 128.0, 0.5);
    assert_eq!(a, b);
}

#[test]
fn saddle_level_passes_through_saddles() {
    let s = 1.0 / 144.0;
    let h = 1.0 / 256.0;
    let field = sample(
        &PolySlice::new(&damon_family(), s).unwrap(),
        Window::square(0.5),
        h,
        s,
    )
    .unwrap();
    let z1 = s + 1.0 / 216.0;
    let sets = level_sets(&field, &[z1]);
    for cp in damon::critical_points(s)
        .iter()
        .filter(|c| c.morse == MorseType::Saddle && c.position[1] != 0.0)
    {
        let d = sets[0]
            .polylines
            .iter()
            .flat_map(|l| l.points.iter())
            .map(|p| cp.distance_to(*p))
            .fold(f64::INFINITY, f64::min);
        assert!(
            d < 2.0 * h,
            "saddle {:?} is {d} from the contour",
            cp.position
        );
    }
    let w = field.window();
    for line in &sets[0].polylines {
        let ends = [line.points[0], *line.points.last().unwrap()];
        let on_edge = |p: [f64; 2]| {
            [p[0] - w.x0, w.x1 - p[0], p[1] - w.y0, w.y1 - p[1]]
                .iter()
                .any(|d| d.abs() < 1e-12)
        };
        assert!(line.closed || ends.iter().all(|&p| on_edge(p)));
    }
}

#[test]
fn detections_have_vanishing_gradient() {
    let s = 1.0 / 100.0;
    let field = sample(
        &PolySlice::new(&damon_family(), s).unwrap(),
        Window::square(0.5),
        1.0 / 512.0,
        s,
    )
    .unwrap();
    let found = detect(&field);
    assert_eq!(found.len(), 4);
    for cp in found {
        let [gx, gy] = field.gradient_at(cp.position[0], cp.position[1]);
        assert!(gx.hypot(gy) < 1e-6);
    }
}
