use std::collections::HashMap;

use serde::Serialize;

use super::GridField;

/// A contour piece: a closed loop, or an open chain whose ends lie on the grid border.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Polyline {
    pub points: Vec<[f64; 2]>,
    pub closed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelSet {
    pub level: f64,
    pub polylines: Vec<Polyline>,
}

/// Grid edge: `(vertical, i, j)` runs from node `(i, j)` to `(i+1, j)` or `(i, j+1)`.
type EdgeKey = (bool, usize, usize);

/// Marching-squares contours of `field` at each level.
pub fn level_sets(field: &GridField, levels: &[f64]) -> Vec<LevelSet> {
    levels
        .iter()
        .map(|&level| LevelSet {
            level,
            polylines: contour(field, level),
        })
        .collect()
}

fn contour(field: &GridField, level: f64) -> Vec<Polyline> {
    let (nx, ny) = field.dims();
    let above = |i: usize, j: usize| field.get(i, j) >= level;
    let mut segments: Vec<[EdgeKey; 2]> = Vec::new();
    for j in 0..ny - 1 {
        for i in 0..nx - 1 {
            // corners counter-clockwise from (i, j); edge k joins corner k and k+1
            let corners = [
                above(i, j),
                above(i + 1, j),
                above(i + 1, j + 1),
                above(i, j + 1),
            ];
            let edges: [EdgeKey; 4] = [
                (false, i, j),
                (true, i + 1, j),
                (false, i, j + 1),
                (true, i, j),
            ];
            let crossed: Vec<usize> = (0..4)
                .filter(|&k| corners[k] != corners[(k + 1) % 4])
                .collect();
            match crossed.len() {
                2 => segments.push([edges[crossed[0]], edges[crossed[1]]]),
                4 => {
                    let centre = 0.25
                        * (field.get(i, j)
                            + field.get(i + 1, j)
                            + field.get(i + 1, j + 1)
                            + field.get(i, j + 1));
                    let centre_above = centre >= level;
                    // isolate the corners on the other side of the centre
                    for k in 0..4 {
                        if corners[k] != centre_above {
                            segments.push([edges[(k + 3) % 4], edges[k]]);
                        }
                    }
                }
                _ => {}
            }
        }
    }
    chain(field, level, &segments)
}

fn crossing(field: &GridField, level: f64, (vertical, i, j): EdgeKey) -> [f64; 2] {
    let (i2, j2) = if vertical { (i, j + 1) } else { (i + 1, j) };
    let (a, b) = (field.get(i, j), field.get(i2, j2));
    let t = if a == b {
        0.5
    } else {
        ((level - a) / (b - a)).clamp(0.0, 1.0)
    };
    let (x0, y0) = (field.x(i), field.y(j));
    let (x1, y1) = (field.x(i2), field.y(j2));
    [x0 + t * (x1 - x0), y0 + t * (y1 - y0)]
}

fn chain(field: &GridField, level: f64, segments: &[[EdgeKey; 2]]) -> Vec<Polyline> {
    let mut incident: HashMap<EdgeKey, Vec<usize>> = HashMap::new();
    for (k, seg) in segments.iter().enumerate() {
        for e in seg {
            incident.entry(*e).or_default().push(k);
        }
    }
    let mut used = vec![false; segments.len()];
    let mut out = Vec::new();

    let walk =
        |start_seg: usize, start_key: EdgeKey, used: &mut Vec<bool>| -> (Vec<EdgeKey>, bool) {
            let mut keys = vec![start_key];
            let mut seg = start_seg;
            let mut key = start_key;
            loop {
                used[seg] = true;
                let [a, b] = segments[seg];
                key = if a == key { b } else { a };
                if key == start_key {
                    return (keys, true);
                }
                keys.push(key);
                match incident[&key].iter().copied().find(|&s| !used[s]) {
                    Some(next) => seg = next,
                    None => return (keys, false),
                }
            }
        };

    // open chains start at border edges, which belong to a single segment
    let mut ends: Vec<EdgeKey> = incident
        .iter()
        .filter(|(_, segs)| segs.len() == 1)
        .map(|(k, _)| *k)
        .collect();
    ends.sort_unstable();
    for key in ends {
        let seg = incident[&key][0];
        if used[seg] {
            continue;
        }
        let (keys, _) = walk(seg, key, &mut used);
        out.push(Polyline {
            points: keys
                .into_iter()
                .map(|k| crossing(field, level, k))
                .collect(),
            closed: false,
        });
    }
    for seg in 0..segments.len() {
        if used[seg] {
            continue;
        }
        let (keys, closed) = walk(seg, segments[seg][0], &mut used);
        out.push(Polyline {
            points: keys
                .into_iter()
                .map(|k| crossing(field, level, k))
                .collect(),
            closed,
        });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scale_space::{sample, Window};

    fn on_border(g: &GridField, p: [f64; 2]) -> bool {
        let w = g.window();
        let tol = 1e-12;
        (p[0] - w.x0).abs() < tol
            || (p[0] - w.x1).abs() < tol
            || (p[1] - w.y0).abs() < tol
            || (p[1] - w.y1).abs() < tol
    }

    #[test]
    fn constant_has_no_contours() {
        let g = sample(&|_x: f64, _y: f64| 1.0, Window::square(1.0), 0.1, 0.0).unwrap();
        assert!(level_sets(&g, &[0.5, 1.5])[0].polylines.is_empty());
    }

    #[test]
    fn bowl_unit_circle() {
        let h = 1.0 / 32.0;
        let g = sample(&|x: f64, y: f64| x * x + y * y, Window::square(1.5), h, 0.0).unwrap();
        let sets = level_sets(&g, &[1.0]);
        assert_eq!(sets[0].polylines.len(), 1);
        let line = &sets[0].polylines[0];
        assert!(line.closed);
        assert!(line.points.len() > 100);
        for p in &line.points {
            assert!((p[0].hypot(p[1]) - 1.0).abs() < h);
        }
    }

    #[test]
    fn saddle_lines_terminate_on_border() {
        let g = sample(
            &|x: f64, y: f64| x * y + 0.01 * x,
            Window::square(1.0),
            0.1,
            0.0,
        )
        .unwrap();
        for set in level_sets(&g, &[0.0, 0.05, -0.2]) {
            for line in &set.polylines {
                assert!(
                    line.closed
                        || (on_border(&g, line.points[0])
                            && on_border(&g, *line.points.last().unwrap()))
                );
            }
        }
    }
}
