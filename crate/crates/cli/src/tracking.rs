//! `umbilic track`: scale-space tracking with event detection.

use anyhow::Result;
use clap::Args;
use serde_json::json;

use umbilic_core::scale_space::{
    find_events, track, BlurMode, ScaleEvent, ScaleSpace, TrackConfig, TrackRun,
};

use crate::args::{config_error, FieldArgs, Ladder, LadderMode, OutputArgs};
use crate::plot::{self, Figure, Kind};
use crate::table::{Output, Table};

#[derive(Debug, Clone, Args)]
pub struct TrackArgs {
    #[command(flatten)]
    pub field: FieldArgs,
    /// Scale ladder `s0:s1:n`; the first rung is the initial field.
    #[arg(long, allow_hyphen_values = true)]
    pub ladder: Option<String>,
    #[arg(long, value_enum, default_value_t = LadderMode::Linear)]
    pub ladder_mode: LadderMode,
    /// Blur the initial grid numerically, or resample the exact family at every rung.
    #[arg(long, default_value = "oracle", value_parser = parse_blur)]
    pub blur: BlurMode,
    /// Skip the bisection that narrows each event bracket.
    #[arg(long)]
    pub no_refine: bool,
    /// Relative bracket width at which refinement stops.
    #[arg(long, default_value_t = 1e-3)]
    pub refine_rel: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

fn parse_blur(text: &str) -> Result<BlurMode, String> {
    text.parse()
}

fn mode_name(mode: BlurMode) -> &'static str {
    match mode {
        BlurMode::Numeric => "numeric",
        BlurMode::Oracle => "oracle",
    }
}

fn event_row(e: &ScaleEvent) -> Vec<crate::table::Cell> {
    let ids: Vec<String> = e.participants.iter().map(usize::to_string).collect();
    vec![
        e.kind.as_str().into(),
        e.s_estimate.into(),
        e.bracket[0].into(),
        e.bracket[1].into(),
        e.location[0].into(),
        e.location[1].into(),
        ids.join(";").into(),
        e.survivor.into(),
        e.rung.into(),
        e.refined.into(),
    ]
}

fn trajectory_table(run: &TrackRun) -> Table {
    let mut t = Table::new(&[
        "trajectory",
        "rung",
        "s",
        "x",
        "y",
        "z",
        "morse",
        "start",
        "end",
    ]);
    for traj in &run.trajectories {
        for p in &traj.points {
            t.push(vec![
                traj.id.into(),
                p.rung.into(),
                p.s.into(),
                p.point.position[0].into(),
                p.point.position[1].into(),
                p.point.z.into(),
                p.point.morse.as_str().into(),
                traj.start.as_str().into(),
                traj.end.as_str().into(),
            ]);
        }
    }
    t
}

fn census_table(run: &TrackRun) -> Table {
    let mut t = Table::new(&[
        "rung",
        "s",
        "min",
        "max",
        "saddle",
        "degenerate",
        "total",
        "under_resolved",
    ]);
    for (k, r) in run.rungs.iter().enumerate() {
        t.push(vec![
            k.into(),
            r.s.into(),
            r.census.min.into(),
            r.census.max.into(),
            r.census.saddle.into(),
            r.census.degenerate.into(),
            r.census.total().into(),
            r.under_resolved.into(),
        ]);
    }
    t
}

pub fn run(args: &TrackArgs) -> Result<()> {
    args.output.check()?;
    if !(args.refine_rel > 0.0 && args.refine_rel.is_finite()) {
        return Err(config_error("--refine-rel must be positive"));
    }
    let poly = args.field.polynomial()?;
    let (default_h, default_window, default_ladder) = args.field.preset.tracking(args.blur);
    let h = args.field.h.unwrap_or(default_h);
    let window = args.field.window.unwrap_or(default_window);
    let ladder = match &args.ladder {
        Some(text) => Ladder::parse(text, args.ladder_mode)?.scales(),
        None => default_ladder,
    };

    let space = ScaleSpace::from_family(&poly, window, h, ladder[0], args.blur)?;
    let cfg = TrackConfig {
        refine_rel: args.refine_rel,
        ..TrackConfig::default()
    };
    let run = track(&space, &ladder, &cfg)?;
    let events = find_events(&space, &run, !args.no_refine)?;

    let mut out = Output::create(&args.output.out, args.output.format)?;
    let traj_file = out.table("trajectories", &trajectory_table(&run))?;
    let census_file = out.table("census", &census_table(&run))?;
    let mut event_table = Table::new(&[
        "kind",
        "s_estimate",
        "s_lo",
        "s_hi",
        "x",
        "y",
        "participants",
        "survivor",
        "rung",
        "refined",
    ]);
    for e in &events {
        event_table.push(event_row(e));
    }
    let event_file = out.table("events", &event_table)?;

    let summary = json!({
        "preset": args.field.preset.name(),
        "polynomial": poly.to_string(),
        "mode": args.blur,
        "h": h,
        "window": window.as_array(),
        "ladder": ladder,
        "trajectories": run.trajectories.len(),
        "census": run.rungs.iter().enumerate().map(|(k, r)| json!({
            "rung": k,
            "s": r.s,
            "min": r.census.min,
            "max": r.census.max,
            "saddle": r.census.saddle,
            "degenerate": r.census.degenerate,
            "under_resolved": r.under_resolved,
        })).collect::<Vec<_>>(),
        "events": events,
    });
    out.json("summary.json", &summary)?;

    if args.output.emit_plot {
        let figures = [
            Figure::new("trajectories", "Critical point trajectories in (x, y)")
                .layer(
                    &traj_file,
                    Kind::Line,
                    &[("x", "x"), ("y", "y"), ("group", "trajectory")],
                )
                .layer(
                    &event_file,
                    Kind::Scatter,
                    &[("x", "x"), ("y", "y"), ("group", "kind")],
                ),
            Figure::new("trajectories_s", "Trajectories: x against s").layer(
                &traj_file,
                Kind::Line,
                &[("x", "s"), ("y", "x"), ("group", "trajectory")],
            ),
            Figure::new("census", "Census per rung")
                .layer(&census_file, Kind::Line, &[("x", "s"), ("y", "total")])
                .layer(&census_file, Kind::Line, &[("x", "s"), ("y", "saddle")]),
        ];
        out.text("track.plot", &plot::script("track", &figures))?;
    }

    println!(
        "track: {} rungs from s={:.6e} to s={:.6e}, {} trajectories, {} events ({} mode, h={:.6e})",
        run.rungs.len(),
        ladder[0],
        ladder[ladder.len() - 1],
        run.trajectories.len(),
        events.len(),
        mode_name(args.blur),
        h
    );
    for e in &events {
        println!(
            "  {} at s={:.7} in [{:.7}, {:.7}] near ({:.5}, {:.5}), trajectories {:?}{}",
            e.kind.as_str(),
            e.s_estimate,
            e.bracket[0],
            e.bracket[1],
            e.location[0],
            e.location[1],
            e.participants,
            if e.refined { ", refined" } else { "" }
        );
    }
    Ok(())
}
