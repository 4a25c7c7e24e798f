//! Flag types shared between commands, their parsers, and preset defaults.

use std::fmt;
use std::path::PathBuf;

use anyhow::Result;
use clap::{Args, ValueEnum};

use umbilic_core::poly::{damon_family, Polynomial};
use umbilic_core::scale_space::{BlurMode, Window};

use crate::table::Format;

/// A run configuration that cannot be honoured; exits with status 2.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

pub fn config_error(msg: impl Into<String>) -> anyhow::Error {
    ConfigError(msg.into()).into()
}

/// A real number, optionally written as a fraction `p/q`.
pub fn parse_real(text: &str) -> Result<f64, String> {
    let text = text.trim();
    let value = match text.split_once('/') {
        Some((p, q)) => {
            let p: f64 = p
                .trim()
                .parse()
                .map_err(|_| format!("bad numerator in `{text}`"))?;
            let q: f64 = q
                .trim()
                .parse()
                .map_err(|_| format!("bad denominator in `{text}`"))?;
            if q == 0.0 {
                return Err(format!("zero denominator in `{text}`"));
            }
            p / q
        }
        None => text
            .parse()
            .map_err(|_| format!("`{text}` is not a number"))?,
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(format!("`{text}` is not finite"))
    }
}

fn parse_list(text: &str, len: usize) -> Result<Vec<f64>, String> {
    let parts: Vec<f64> = text.split(',').map(parse_real).collect::<Result<_, _>>()?;
    if parts.len() != len {
        return Err(format!(
            "expected {len} comma-separated numbers, got {}",
            parts.len()
        ));
    }
    Ok(parts)
}

/// `x0,y0,x1,y1` with `x0 < x1` and `y0 < y1`.
pub fn parse_window(text: &str) -> Result<Window, String> {
    let v = parse_list(text, 4)?;
    if !(v[0] < v[2] && v[1] < v[3]) {
        return Err("window corners must satisfy x0 < x1 and y0 < y1".into());
    }
    Ok(Window::new(v[0], v[1], v[2], v[3]))
}

/// `a,b` with `a < b`.
pub fn parse_range(text: &str) -> Result<(f64, f64), String> {
    let v = parse_list(text, 2)?;
    if !(v[0] < v[1]) {
        return Err("range must satisfy a < b".into());
    }
    Ok((v[0], v[1]))
}

fn parse_positive(text: &str) -> Result<f64, String> {
    let v = parse_real(text)?;
    if v > 0.0 {
        Ok(v)
    } else {
        Err(format!("`{text}` must be positive"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    /// x^3 - 6xy^2 + y^2 - 6sx + 2s across its triple merge.
    Damon,
    /// x^2 + y^2 + 4s, a single minimum and no events.
    Bowl,
    /// The worked example started at s = 0, where pc2+ and pc2- are born.
    Creation,
}

impl Preset {
    pub fn name(self) -> &'static str {
        match self {
            Preset::Damon => "damon",
            Preset::Bowl => "bowl",
            Preset::Creation => "creation",
        }
    }

    pub fn polynomial(self) -> Polynomial {
        match self {
            Preset::Damon | Preset::Creation => damon_family(),
            Preset::Bowl => Polynomial::parse("x^2 + y^2 + 4*s", 2).expect("static polynomial"),
        }
    }

    pub fn window(self) -> Window {
        match self {
            Preset::Damon | Preset::Creation => Window::square(0.5),
            Preset::Bowl => Window::square(1.0),
        }
    }

    /// Default tracking resolution, window and ladder for a blur mode.
    pub fn tracking(self, mode: BlurMode) -> (f64, Window, Vec<f64>) {
        match (self, mode) {
            (Preset::Damon, BlurMode::Oracle) => (
                1.0 / 512.0,
                Window::square(0.5),
                Ladder::linear(1.0 / 720.0, 1.0 / 36.0, 64).scales(),
            ),
            // blurring eats a margin of about 4σ ≈ 0.94 at s = 1/36
            (Preset::Damon, BlurMode::Numeric) => (
                1.0 / 128.0,
                Window::square(1.5),
                Ladder::linear(1.0 / 720.0, 1.0 / 36.0, 64).scales(),
            ),
            (Preset::Bowl, _) => (
                1.0 / 64.0,
                Window::square(1.0),
                Ladder::linear(0.0, 0.01, 12).scales(),
            ),
            (Preset::Creation, _) => (
                1.0 / 512.0,
                Window::square(0.5),
                vec![0.0, 1e-5, 2e-5, 4e-5, 8e-5],
            ),
        }
    }
}

/// Output directory, file format and plot scripts.
#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Directory receiving the output files (created if missing).
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Also write plain-text plot scripts referencing the CSV files.
    #[arg(long)]
    pub emit_plot: bool,
}

impl OutputArgs {
    pub fn check(&self) -> Result<()> {
        if self.emit_plot && self.format != Format::Csv {
            return Err(config_error(
                "--emit-plot references CSV files; use it with --format csv",
            ));
        }
        Ok(())
    }
}

/// The sampled field: a preset or an explicit polynomial in `x`, `y`, `s`.
#[derive(Debug, Clone, Args)]
pub struct FieldArgs {
    #[arg(long, value_enum, default_value_t = Preset::Damon)]
    pub preset: Preset,
    /// Polynomial in x, y and s replacing the preset's, e.g. "x^2 - y^2".
    #[arg(long)]
    pub poly: Option<String>,
    /// Sampling window `x0,y0,x1,y1`.
    #[arg(long, value_parser = parse_window, allow_hyphen_values = true)]
    pub window: Option<Window>,
    /// Grid spacing; fractions such as 1/256 are accepted.
    #[arg(long, value_parser = parse_positive)]
    pub h: Option<f64>,
}

impl FieldArgs {
    pub fn polynomial(&self) -> Result<Polynomial> {
        match &self.poly {
            Some(text) => Polynomial::parse(text, 2)
                .map_err(|e| config_error(format!("invalid --poly `{text}`: {e}"))),
            None => Ok(self.preset.polynomial()),
        }
    }

    pub fn window(&self) -> Window {
        self.window.unwrap_or_else(|| self.preset.window())
    }

    /// Spacing for surface and contour exports: 64 cells across by default.
    pub fn plot_h(&self) -> f64 {
        self.h.unwrap_or_else(|| {
            let w = self.window();
            (w.x1 - w.x0) / 64.0
        })
    }
}

/// Scales given as a list, as a uniform range, or left to the command default.
#[derive(Debug, Clone, Default, Args)]
pub struct ScaleArgs {
    /// Explicit comma-separated scales.
    #[arg(long = "s", value_delimiter = ',', value_parser = parse_real, allow_hyphen_values = true,
          conflicts_with_all = ["s_min", "s_max"])]
    pub s: Vec<f64>,
    #[arg(long, value_parser = parse_real, allow_hyphen_values = true, requires = "s_max")]
    pub s_min: Option<f64>,
    #[arg(long, value_parser = parse_real, allow_hyphen_values = true, requires = "s_min")]
    pub s_max: Option<f64>,
    /// Number of scales in `[s-min, s-max]`, endpoints included; 1 samples s-min only.
    #[arg(long)]
    pub steps: Option<usize>,
}

impl ScaleArgs {
    pub fn resolve(
        &self,
        default: impl FnOnce() -> Vec<f64>,
        default_steps: usize,
    ) -> Result<Vec<f64>> {
        if !self.s.is_empty() {
            return Ok(self.s.clone());
        }
        match (self.s_min, self.s_max) {
            (Some(a), Some(b)) => {
                if a > b {
                    return Err(config_error(format!(
                        "invalid range: --s-min {a} exceeds --s-max {b}"
                    )));
                }
                let n = self.steps.unwrap_or(default_steps);
                if n == 0 {
                    return Err(config_error("--steps must be at least 1"));
                }
                if n > 1 && a == b {
                    return Err(config_error("an empty range admits a single step"));
                }
                Ok(uniform(a, b, n))
            }
            _ => {
                if self.steps.is_some() {
                    return Err(config_error("--steps needs --s-min and --s-max"));
                }
                Ok(default())
            }
        }
    }
}

pub fn uniform(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    (0..n)
        .map(|k| a + (b - a) * k as f64 / (n - 1) as f64)
        .collect()
}

/// The six scales `(k/3)(1/72)`, `k = −1..4`.
pub fn default_scales() -> Vec<f64> {
    (-1..=4).map(|k| k as f64 / 3.0 / 72.0).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LadderMode {
    Linear,
    Geometric,
}

/// `s0:s1:n`: `n` scales from `s0` to `s1` inclusive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ladder {
    pub s0: f64,
    pub s1: f64,
    pub n: usize,
    pub mode: LadderMode,
}

impl Ladder {
    pub fn linear(s0: f64, s1: f64, n: usize) -> Self {
        Ladder {
            s0,
            s1,
            n,
            mode: LadderMode::Linear,
        }
    }

    pub fn parse(text: &str, mode: LadderMode) -> Result<Self> {
        let parts: Vec<&str> = text.split(':').collect();
        let [a, b, n] = parts.as_slice() else {
            return Err(config_error(format!(
                "--ladder expects s0:s1:n, got `{text}`"
            )));
        };
        let s0 = parse_real(a).map_err(config_error)?;
        let s1 = parse_real(b).map_err(config_error)?;
        let n: usize = n
            .trim()
            .parse()
            .map_err(|_| config_error(format!("ladder length `{n}` is not a count")))?;
        if n < 2 || !(s0 < s1) {
            return Err(config_error("a ladder needs s0 < s1 and at least 2 rungs"));
        }
        if mode == LadderMode::Geometric && s0 <= 0.0 {
            return Err(config_error("a geometric ladder needs s0 > 0"));
        }
        Ok(Ladder { s0, s1, n, mode })
    }

    pub fn scales(&self) -> Vec<f64> {
        match self.mode {
            LadderMode::Linear => uniform(self.s0, self.s1, self.n),
            LadderMode::Geometric => {
                let ratio = (self.s1 / self.s0).ln();
                (0..self.n)
                    .map(|k| match k {
                        0 => self.s0,
                        k if k + 1 == self.n => self.s1,
                        k => self.s0 * (ratio * k as f64 / (self.n - 1) as f64).exp(),
                    })
                    .collect()
            }
        }
    }
}
