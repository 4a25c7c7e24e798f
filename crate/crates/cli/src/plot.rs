//! Tool-agnostic plot scripts: plain `key = value` blocks naming the CSV file
//! and columns of each figure, left for any plotting front end to translate.

use std::fmt::Write as _;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Line,
    Scatter,
    Surface,
    Contour,
    Vectors,
}

impl Kind {
    fn as_str(self) -> &'static str {
        match self {
            Kind::Line => "line",
            Kind::Scatter => "scatter",
            Kind::Surface => "surface",
            Kind::Contour => "contour",
            Kind::Vectors => "vectors",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Figure {
    name: String,
    title: String,
    layers: Vec<Layer>,
}

#[derive(Debug, Clone)]
struct Layer {
    data: String,
    kind: Kind,
    columns: Vec<(&'static str, String)>,
}

impl Figure {
    pub fn new(name: impl Into<String>, title: impl Into<String>) -> Self {
        Figure {
            name: name.into(),
            title: title.into(),
            layers: Vec::new(),
        }
    }

    /// Adds a layer; `columns` maps roles (`x`, `y`, `z`, `dx`, `dy`, `group`,
    /// `filter`) to CSV column names or expressions.
    pub fn layer(mut self, data: &str, kind: Kind, columns: &[(&'static str, &str)]) -> Self {
        self.layers.push(Layer {
            data: data.to_owned(),
            kind,
            columns: columns.iter().map(|(k, v)| (*k, v.to_string())).collect(),
        });
        self
    }
}

pub fn script(command: &str, figures: &[Figure]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# plot script for `umbilic {command}`");
    let _ = writeln!(
        out,
        "# each figure lists layers; every layer reads one comma-separated file with a header row"
    );
    for fig in figures {
        let _ = writeln!(out, "\nfigure {}", fig.name);
        let _ = writeln!(out, "title = {}", fig.title);
        for layer in &fig.layers {
            let _ = writeln!(out, "layer");
            let _ = writeln!(out, "  data = {}", layer.data);
            let _ = writeln!(out, "  kind = {}", layer.kind.as_str());
            for (role, col) in &layer.columns {
                let _ = writeln!(out, "  {role} = {col}");
            }
        }
        let _ = writeln!(out, "end");
    }
    out
}
