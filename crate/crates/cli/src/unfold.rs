//! `umbilic unfolding {discriminant, cvgraph, line}`.

use anyhow::Result;
use clap::{Args, Subcommand};

use umbilic_core::unfolding::{
    critical_value_graph, discriminant_section, embedding_line, inside, inside_transition,
};

use crate::args::{config_error, parse_range, parse_real, uniform, OutputArgs, ScaleArgs};
use crate::plot::{self, Figure, Kind};
use crate::table::{Output, Table};

#[derive(Debug, Clone, Subcommand)]
pub enum UnfoldingCommand {
    /// Section of the discriminant at fixed w, with cusps and axis crossings.
    Discriminant(DiscriminantArgs),
    /// Critical values of g over a (u, v) grid.
    Cvgraph(CvgraphArgs),
    /// The worked example's line in parameter space and its inside-census.
    Line(LineArgs),
}

#[derive(Debug, Clone, Args)]
pub struct DiscriminantArgs {
    #[arg(long, default_value = "0.5", value_parser = parse_real)]
    pub w: f64,
    /// Samples around the curve; a multiple of 3 so each cusp is a sample.
    #[arg(long, default_value_t = 720)]
    pub samples: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct CvgraphArgs {
    #[arg(long, default_value = "0.5", value_parser = parse_real)]
    pub w: f64,
    #[arg(long, default_value = "-0.05,0.15", value_parser = parse_range, allow_hyphen_values = true)]
    pub u_range: (f64, f64),
    #[arg(long, default_value = "-0.08,0.08", value_parser = parse_range, allow_hyphen_values = true)]
    pub v_range: (f64, f64),
    /// Nodes per axis.
    #[arg(long, default_value_t = 64)]
    pub resolution: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct LineArgs {
    #[command(flatten)]
    pub scales: ScaleArgs,
    /// Width at which the census flips are bracketed.
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

pub fn run(cmd: &UnfoldingCommand) -> Result<()> {
    match cmd {
        UnfoldingCommand::Discriminant(a) => discriminant(a),
        UnfoldingCommand::Cvgraph(a) => cvgraph(a),
        UnfoldingCommand::Line(a) => line(a),
    }
}

fn discriminant(args: &DiscriminantArgs) -> Result<()> {
    args.output.check()?;
    if !args.samples.is_multiple_of(3) {
        return Err(config_error(format!(
            "--samples must be a multiple of 3 so every cusp is sampled, got {}",
            args.samples
        )));
    }
    let curve =
        discriminant_section(args.w, args.samples).map_err(|e| config_error(e.to_string()))?;
    let mut table = Table::new(&["u", "v", "x", "y", "cusp"]);
    for s in &curve.samples {
        table.push(vec![
            s.u.into(),
            s.v.into(),
            s.x.into(),
            s.y.into(),
            s.is_cusp.into(),
        ]);
    }
    let mut features = Table::new(&["kind", "u", "v"]);
    for c in &curve.cusps {
        features.push(vec!["cusp".into(), c[0].into(), c[1].into()]);
    }
    for c in &curve.fold_axis_crossings {
        features.push(vec!["axis_crossing".into(), c[0].into(), c[1].into()]);
    }
    let mut out = Output::create(&args.output.out, args.output.format)?;
    let file = out.table("discriminant", &table)?;
    let feature_file = out.table("discriminant_features", &features)?;
    if args.output.emit_plot {
        let fig = Figure::new(
            "discriminant",
            format!("Discriminant section at w = {}", args.w),
        )
        .layer(&file, Kind::Line, &[("x", "u"), ("y", "v")])
        .layer(
            &feature_file,
            Kind::Scatter,
            &[("x", "u"), ("y", "v"), ("group", "kind")],
        );
        out.text(
            "discriminant.plot",
            &plot::script("unfolding discriminant", &[fig]),
        )?;
    }
    let marked = curve.samples.iter().filter(|s| s.is_cusp).count();
    println!(
        "discriminant: {} samples, {} cusps ({} marked rows), {} axis crossings in {}",
        curve.samples.len(),
        curve.cusps.len(),
        marked,
        curve.fold_axis_crossings.len(),
        file
    );
    for c in &curve.cusps {
        println!("  cusp at (u, v) = ({:.12}, {:.12})", c[0], c[1]);
    }
    Ok(())
}

fn cvgraph(args: &CvgraphArgs) -> Result<()> {
    args.output.check()?;
    let graph = critical_value_graph(args.w, args.u_range, args.v_range, args.resolution)
        .map_err(|e| config_error(e.to_string()))?;
    let mut table = Table::new(&["u", "v", "z", "morse"]);
    for r in &graph {
        table.push(vec![
            r.u.into(),
            r.v.into(),
            r.z.into(),
            r.morse.as_str().into(),
        ]);
    }
    let mut out = Output::create(&args.output.out, args.output.format)?;
    let file = out.table("cvgraph", &table)?;
    if args.output.emit_plot {
        let fig = Figure::new("cvgraph", format!("Critical values of g at w = {}", args.w)).layer(
            &file,
            Kind::Scatter,
            &[("x", "u"), ("y", "v"), ("z", "z"), ("group", "morse")],
        );
        out.text("cvgraph.plot", &plot::script("unfolding cvgraph", &[fig]))?;
    }
    println!(
        "cvgraph: {} rows over a {}x{} grid in {}",
        table.len(),
        args.resolution,
        args.resolution,
        file
    );
    Ok(())
}

fn line(args: &LineArgs) -> Result<()> {
    args.output.check()?;
    if !(args.tol > 0.0) {
        return Err(config_error("--tol must be positive"));
    }
    let scales = args
        .scales
        .resolve(|| uniform(-1.0 / 216.0, 4.0 / 216.0, 121), 121)?;
    let mut table = Table::new(&["s", "u", "c", "inside"]);
    let flags: Vec<bool> = scales.iter().map(|&s| inside(s)).collect();
    for (&s, &flag) in scales.iter().zip(&flags) {
        let (u, c) = embedding_line(s);
        table.push(vec![s.into(), u.into(), c.into(), flag.into()]);
    }
    let mut flips = Table::new(&["s_lo", "s_hi", "inside_before", "inside_after"]);
    for k in 1..scales.len() {
        if flags[k] != flags[k - 1] {
            if let Some((a, b)) = inside_transition(scales[k - 1], scales[k], args.tol) {
                flips.push(vec![
                    a.into(),
                    b.into(),
                    flags[k - 1].into(),
                    flags[k].into(),
                ]);
            }
        }
    }
    let mut out = Output::create(&args.output.out, args.output.format)?;
    let file = out.table("line", &table)?;
    let flip_file = out.table("line_flips", &flips)?;
    if args.output.emit_plot {
        let fig = Figure::new("line", "Embedding line: u against s, inside-census")
            .layer(&file, Kind::Line, &[("x", "s"), ("y", "u")])
            .layer(
                &file,
                Kind::Scatter,
                &[("x", "s"), ("y", "u"), ("filter", "inside")],
            );
        out.text("line.plot", &plot::script("unfolding line", &[fig]))?;
    }
    println!(
        "line: {} scales, {} census flips in {}",
        scales.len(),
        flips.len(),
        flip_file
    );
    Ok(())
}
