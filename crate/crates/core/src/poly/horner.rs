use num_traits::Zero;

use super::{to_f64, Polynomial, Rational};

/// Nested Horner form of a polynomial for fast floating point evaluation.
///
/// Variables are peeled in order `x1, .., xn, s`; each level holds the dense
/// coefficient list of one variable whose entries are Horner forms in the
/// remaining variables.
#[derive(Debug, Clone)]
pub struct HornerPoly {
    n_vars: usize,
    root: Node,
}

#[derive(Debug, Clone)]
enum Node {
    Const(f64),
    Var { index: usize, coeffs: Vec<Node> },
}

impl HornerPoly {
    pub fn new(p: &Polynomial) -> Self {
        let terms: Vec<(Vec<u32>, Rational)> = p
            .terms()
            .map(|(m, c)| (m.exponents().to_vec(), c.clone()))
            .collect();
        let n_vars = p.n_spatial() + 1;
        HornerPoly {
            n_vars,
            root: build(&terms, 0, n_vars),
        }
    }

    /// Evaluates at `coords = (x1, .., xn, s)`.
    pub fn eval(&self, coords: &[f64]) -> f64 {
        debug_assert_eq!(coords.len(), self.n_vars);
        eval(&self.root, coords)
    }
}

fn build(terms: &[(Vec<u32>, Rational)], index: usize, n_vars: usize) -> Node {
    if index == n_vars {
        let total = terms.iter().fold(Rational::zero(), |acc, (_, c)| acc + c);
        return Node::Const(to_f64(&total));
    }
    let max_e = terms.iter().map(|(e, _)| e[index]).max().unwrap_or(0);
    if max_e == 0 {
        return build(terms, index + 1, n_vars);
    }
    let coeffs = (0..=max_e)
        .map(|k| {
            let sub: Vec<(Vec<u32>, Rational)> = terms
                .iter()
                .filter(|(e, _)| e[index] == k)
                .cloned()
                .collect();
            build(&sub, index + 1, n_vars)
        })
        .collect();
    Node::Var { index, coeffs }
}

fn eval(node: &Node, coords: &[f64]) -> f64 {
    match node {
        Node::Const(c) => *c,
        Node::Var { index, coeffs } => {
            let v = coords[*index];
            coeffs
                .iter()
                .rev()
                .fold(0.0, |acc, c| acc * v + eval(c, coords))
        }
    }
}
