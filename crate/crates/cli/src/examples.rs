//! Data behind the worked example's figures: branches, surface sections and level sets.

use anyhow::Result;
use clap::Args;

use umbilic_core::damon;
use umbilic_core::morse::{Branch, CriticalPoint, EPS_LAMBDA};
use umbilic_core::poly::{damon_family, Polynomial};
use umbilic_core::scale_space::{detect, level_sets, sample, GridField, PolySlice, ScalarField};

use crate::args::{default_scales, parse_real, uniform, FieldArgs, OutputArgs, ScaleArgs};
use crate::plot::{self, Figure, Kind};
use crate::table::{Output, Table};

#[derive(Debug, Clone, Args)]
pub struct BranchesArgs {
    #[command(flatten)]
    pub scales: ScaleArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

/// Closed-form positions, values and Hessian spectra of every real branch.
pub fn branches(args: &BranchesArgs) -> Result<()> {
    args.output.check()?;
    let scales = args
        .scales
        .resolve(|| uniform(-1.0 / 216.0, 4.0 / 216.0, 120), 120)?;
    let mut table = Table::new(&[
        "branch", "s", "x", "y", "z", "morse", "index", "lambda1", "lambda2",
    ]);
    for branch in Branch::ALL {
        for &s in &scales {
            let Some([x, y]) = damon::branch_position(branch, s) else {
                continue;
            };
            let z = damon::value(x, y, s);
            let cp = CriticalPoint::from_hessian([x, y], s, z, damon::hessian_at(x, y), EPS_LAMBDA);
            let [l1, l2] = cp.eigenvalues();
            table.push(vec![
                branch.as_str().into(),
                s.into(),
                x.into(),
                y.into(),
                z.into(),
                cp.morse.as_str().into(),
                cp.morse.index().map(i64::from).into(),
                l1.into(),
                l2.into(),
            ]);
        }
    }
    let mut out = Output::create(&args.output.out, args.output.format)?;
    let file = out.table("branches", &table)?;
    if args.output.emit_plot {
        let figures = [
            Figure::new("branches_x", "Critical branches: x against s").layer(
                &file,
                Kind::Line,
                &[("x", "s"), ("y", "x"), ("group", "branch")],
            ),
            Figure::new("branches_y", "Critical branches: y against s").layer(
                &file,
                Kind::Line,
                &[("x", "s"), ("y", "y"), ("group", "branch")],
            ),
            Figure::new("branches_xy", "Critical branches in the plane").layer(
                &file,
                Kind::Scatter,
                &[("x", "x"), ("y", "y"), ("group", "branch")],
            ),
            Figure::new("critical_values", "Critical values against s").layer(
                &file,
                Kind::Line,
                &[("x", "s"), ("y", "z"), ("group", "branch")],
            ),
        ];
        out.text("branches.plot", &plot::script("branches", &figures))?;
    }
    println!(
        "branches: {} rows over {} scales in {}",
        table.len(),
        scales.len(),
        file
    );
    Ok(())
}

#[derive(Debug, Clone, Args)]
pub struct SectionsArgs {
    #[command(flatten)]
    pub field: FieldArgs,
    #[command(flatten)]
    pub scales: ScaleArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

fn sample_at(poly: &Polynomial, field: &FieldArgs, s: f64) -> Result<GridField> {
    let slice = PolySlice::new(poly, s)?;
    Ok(sample(&slice, field.window(), field.plot_h(), s)?)
}

/// Abscissae of the worked example's critical points on the axis `y = 0`.
fn axis_critical_x(s: f64) -> Vec<f64> {
    Branch::ALL
        .iter()
        .filter_map(|&b| damon::branch_position(b, s))
        .filter(|p| p[1] == 0.0)
        .map(|p| p[0])
        .collect()
}

/// Surface samples `z = f(x, y, s)` per scale and the median section along `y = 0`.
pub fn sections(args: &SectionsArgs) -> Result<()> {
    args.output.check()?;
    let poly = args.field.polynomial()?;
    let is_example = poly == damon_family();
    let scales = args.scales.resolve(default_scales, 6)?;
    let window = args.field.window();
    let mut out = Output::create(&args.output.out, args.output.format)?;

    let mut index = Table::new(&["index", "s", "surface"]);
    let mut median = Table::new(&["s", "x", "z", "critical"]);
    let mut figures = Vec::new();
    for (k, &s) in scales.iter().enumerate() {
        let grid = sample_at(&poly, &args.field, s)?;
        let (nx, ny) = grid.dims();
        let mut surface = Table::new(&["x", "y", "z"]);
        for j in 0..ny {
            for i in 0..nx {
                surface.push(vec![
                    grid.x(i).into(),
                    grid.y(j).into(),
                    grid.get(i, j).into(),
                ]);
            }
        }
        let file = out.table(&format!("surface_{k:02}"), &surface)?;
        figures.push(
            Figure::new(
                format!("surface_{k:02}"),
                format!("f(x, y, s) at s = {s:.6e}"),
            )
            .layer(&file, Kind::Surface, &[("x", "x"), ("y", "y"), ("z", "z")]),
        );
        index.push(vec![k.into(), s.into(), file.into()]);

        let slice = PolySlice::new(&poly, s)?;
        let mut xs: Vec<(f64, bool)> = (0..nx).map(|i| (grid.x(i), false)).collect();
        if is_example {
            let crit = axis_critical_x(s);
            xs.retain(|(x, _)| !crit.contains(x));
            xs.extend(
                crit.into_iter()
                    .filter(|x| (window.x0..=window.x1).contains(x))
                    .map(|x| (x, true)),
            );
            xs.sort_by(|a, b| a.0.total_cmp(&b.0));
            // coincident branches at creation and merge share one row
            xs.dedup_by(|b, a| a.0 == b.0);
        }
        for (x, critical) in xs {
            median.push(vec![
                s.into(),
                x.into(),
                slice.value_at(x, 0.0).into(),
                critical.into(),
            ]);
        }
    }
    let index_file = out.table("sections", &index)?;
    let median_file = out.table("median", &median)?;
    if args.output.emit_plot {
        figures.push(
            Figure::new("median", "Median sections f(x, 0, s)")
                .layer(
                    &median_file,
                    Kind::Line,
                    &[("x", "x"), ("y", "z"), ("group", "s")],
                )
                .layer(
                    &median_file,
                    Kind::Scatter,
                    &[("x", "x"), ("y", "z"), ("filter", "critical")],
                ),
        );
        out.text("sections.plot", &plot::script("sections", &figures))?;
    }
    println!(
        "sections: {} surfaces, median section with {} rows; index in {}",
        scales.len(),
        median.len(),
        index_file
    );
    Ok(())
}

#[derive(Debug, Clone, Args)]
pub struct LevelsetsArgs {
    #[command(flatten)]
    pub field: FieldArgs,
    #[command(flatten)]
    pub scales: ScaleArgs,
    /// Explicit comma-separated levels, used at every scale.
    #[arg(long, value_delimiter = ',', value_parser = parse_real, allow_hyphen_values = true)]
    pub levels: Vec<f64>,
    /// Number of quantile levels in the automatic list.
    #[arg(long, default_value_t = 12)]
    pub quantiles: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

/// Critical values visible in the grid: closed forms for the worked example,
/// detections otherwise.
fn critical_values(grid: &GridField, is_example: bool) -> Vec<f64> {
    let window = grid.window();
    if is_example {
        Branch::ALL
            .iter()
            .filter_map(|&b| {
                let p = damon::branch_position(b, grid.s())?;
                window
                    .contains(p)
                    .then(|| damon::critical_value(b, grid.s()).ok())?
            })
            .collect()
    } else {
        detect(grid).iter().map(|cp| cp.z).collect()
    }
}

/// Quantiles of the sampled values at `(k + 1/2)/n`, joined with the critical values.
fn automatic_levels(grid: &GridField, quantiles: usize, critical: &[f64]) -> Vec<(f64, bool)> {
    let mut values = grid.values().to_vec();
    values.sort_by(f64::total_cmp);
    let mut levels: Vec<(f64, bool)> = critical.iter().map(|&z| (z, true)).collect();
    for k in 0..quantiles {
        let pos = ((k as f64 + 0.5) / quantiles as f64 * values.len() as f64) as usize;
        levels.push((values[pos.min(values.len() - 1)], false));
    }
    levels.sort_by(|a, b| a.0.total_cmp(&b.0).then(b.1.cmp(&a.1)));
    // critical entries sort first among equal levels and survive deduplication
    levels.dedup_by(|b, a| (a.0 - b.0).abs() <= 1e-12 * a.0.abs().max(1.0));
    levels
}

/// Contours and gradient vectors per scale.
pub fn levelsets(args: &LevelsetsArgs) -> Result<()> {
    args.output.check()?;
    let poly = args.field.polynomial()?;
    let is_example = poly == damon_family();
    let scales = args.scales.resolve(default_scales, 6)?;
    let mut out = Output::create(&args.output.out, args.output.format)?;

    let mut summary = Table::new(&["index", "s", "level", "critical", "polylines"]);
    let mut figures = Vec::new();
    for (k, &s) in scales.iter().enumerate() {
        let grid = sample_at(&poly, &args.field, s)?;
        let critical = critical_values(&grid, is_example);
        let levels: Vec<(f64, bool)> = if args.levels.is_empty() {
            automatic_levels(&grid, args.quantiles, &critical)
        } else {
            args.levels
                .iter()
                .map(|&z| {
                    (
                        z,
                        critical
                            .iter()
                            .any(|c| (c - z).abs() <= 1e-12 * c.abs().max(1.0)),
                    )
                })
                .collect()
        };
        let plain: Vec<f64> = levels.iter().map(|l| l.0).collect();
        let sets = level_sets(&grid, &plain);

        let mut lines = Table::new(&["level", "line", "closed", "x", "y"]);
        let mut line_id = 0usize;
        for (set, &(_, is_critical)) in sets.iter().zip(&levels) {
            summary.push(vec![
                k.into(),
                s.into(),
                set.level.into(),
                is_critical.into(),
                set.polylines.len().into(),
            ]);
            for poly_line in &set.polylines {
                for p in &poly_line.points {
                    lines.push(vec![
                        set.level.into(),
                        line_id.into(),
                        poly_line.closed.into(),
                        p[0].into(),
                        p[1].into(),
                    ]);
                }
                line_id += 1;
            }
        }
        let line_file = out.table(&format!("levels_{k:02}"), &lines)?;

        let mut vectors = Table::new(&["x", "y", "gx", "gy"]);
        for g in grid.gradient_vectors() {
            vectors.push(vec![g.x.into(), g.y.into(), g.gx.into(), g.gy.into()]);
        }
        let vector_file = out.table(&format!("gradient_{k:02}"), &vectors)?;
        figures.push(
            Figure::new(
                format!("levels_{k:02}"),
                format!("Level sets and gradient at s = {s:.6e}"),
            )
            .layer(
                &line_file,
                Kind::Contour,
                &[("x", "x"), ("y", "y"), ("group", "line")],
            )
            .layer(
                &vector_file,
                Kind::Vectors,
                &[("x", "x"), ("y", "y"), ("dx", "gx"), ("dy", "gy")],
            ),
        );
    }
    let summary_file = out.table("levelsets", &summary)?;
    if args.output.emit_plot {
        out.text("levelsets.plot", &plot::script("levelsets", &figures))?;
    }
    println!(
        "levelsets: {} scales, {} levels listed in {}",
        scales.len(),
        summary.len(),
        summary_file
    );
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use umbilic_core::scale_space::Window;

    #[test]
    fn automatic_levels_keep_critical_values() {
        let s = 1.0 / 144.0;
        let grid = sample(
            &PolySlice::new(&damon_family(), s).unwrap(),
            Window::square(0.5),
            1.0 / 64.0,
            s,
        )
        .unwrap();
        let critical = critical_values(&grid, true);
        assert_eq!(critical.len(), 4);
        let levels = automatic_levels(&grid, 12, &critical);
        for z in critical {
            assert!(levels.iter().any(|&(l, c)| c && l == z));
        }
        assert!(levels.windows(2).all(|w| w[0].0 < w[1].0));
    }

    #[test]
    fn axis_points_at_merge() {
        let xs = axis_critical_x(1.0 / 72.0);
        assert!(xs.iter().any(|&x| (x - 1.0 / 6.0).abs() < 1e-15));
    }
}
