//! Catalog of low-degree stable normal forms for germs in space-scale
//! variables, each of which must itself solve the heat equation.
//!
//! Nine templates are provided. `F1..F4` are stable under H-equivalence,
//! `F5..F9` under the intensity-sensitive (IS) equivalence:
//!
//! | id | kind | polynomial |
//! |----|------|------------|
//! | F1 | H  | `σ(Σ xᵢ² + 2n·s)` |
//! | F2 | H  | `Σ aᵢxᵢ²`, `Σ aᵢ = 0` |
//! | F3 | H  | `x₁³ + 6s·x₁ + Q(x₂..xₙ, s)` |
//! | F4 | H  | `x₁³ − 6s·x₁ − 6x₁x₂² + Q(x₂..xₙ, s)` |
//! | F5 | IS | `σ(Σ xᵢ² + 2n·s)` |
//! | F6 | IS | `Σ aᵢxᵢ² + 2(Σ aᵢ)s`, `Σ aᵢ ≠ 0` |
//! | F7 | IS | `Σ aᵢxᵢ² + σ(s² + ½s·r² + q·r⁴)`, `n = 2`, `Σ aᵢ = 0` |
//! | F8 | IS | `x₁³ + 6s·x₁ + Σ₂ aᵢxᵢ² + 2(Σ₂ aᵢ)s`, `Σ₂ aᵢ ≠ 0` |
//! | F9 | IS | `x₁³ − 6s·x₁ − 6x₁x₂² + Σ₂ aᵢxᵢ² + 2(Σ₂ aᵢ)s`, `Σ₂ aᵢ ≠ 0` |
//!
//! In F7 the quartic coefficient `q` is a free parameter. The historically
//! printed value `1/16` leaves a residual of `∓½r²`; only `q = 1/32` gives an
//! exact heat solution. Both are available as presets and the verifier
//! reports the residual instead of rejecting the form.

use serde::Serialize;
use std::fmt;

use num_traits::Zero;
use thiserror::Error;

use crate::poly::{int, rat, PolyError, Polynomial, Rational, Var};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum FormId {
    F1,
    F2,
    F3,
    F4,
    F5,
    F6,
    F7,
    F8,
    F9,
}

impl FormId {
    pub const ALL: [FormId; 9] = [
        FormId::F1,
        FormId::F2,
        FormId::F3,
        FormId::F4,
        FormId::F5,
        FormId::F6,
        FormId::F7,
        FormId::F8,
        FormId::F9,
    ];

    pub fn kind(self) -> StabilityKind {
        match self {
            FormId::F1 | FormId::F2 | FormId::F3 | FormId::F4 => StabilityKind::H,
            _ => StabilityKind::IS,
        }
    }

    pub fn is_cubic(self) -> bool {
        matches!(self, FormId::F3 | FormId::F4 | FormId::F8 | FormId::F9)
    }

    /// Whether the template exists in dimension `n`.
    pub fn applies_to(self, n: usize) -> bool {
        match self {
            FormId::F1 | FormId::F3 | FormId::F5 | FormId::F6 => n >= 1,
            // Σaᵢ = 0 with every aᵢ ≠ 0 needs two coefficients; F8 needs a non-empty tail.
            FormId::F2 | FormId::F4 | FormId::F8 | FormId::F9 => n >= 2,
            FormId::F7 => n == 2,
        }
    }

    fn constraint(self) -> &'static str {
        match self {
            FormId::F1 | FormId::F5 => "sigma = +1 or -1 (signs coupled)",
            FormId::F2 => "a_i != 0 for all i, sum(a_i) = 0",
            FormId::F3 | FormId::F4 => {
                "optional quadratic tail Q in x2..xn that solves the heat equation"
            }
            FormId::F6 => "a_i != 0 for all i, sum(a_i) != 0",
            FormId::F7 => "n = 2, a_i != 0, sum(a_i) = 0, sigma = +1 or -1, quartic coefficient q",
            FormId::F8 | FormId::F9 => "a_2..a_n != 0, sum(a_2..a_n) != 0",
        }
    }

    fn template(self) -> &'static str {
        match self {
            FormId::F1 | FormId::F5 => "sigma*(sum x_i^2 + 2n*s)",
            FormId::F2 => "sum a_i*x_i^2",
            FormId::F3 => "x1^3 + 6*s*x1 + Q(x2..xn, s)",
            FormId::F4 => "x1^3 - 6*s*x1 - 6*x1*x2^2 + Q(x2..xn, s)",
            FormId::F6 => "sum a_i*x_i^2 + 2*(sum a_i)*s",
            FormId::F7 => "sum a_i*x_i^2 + sigma*(s^2 + 1/2*s*r^2 + q*r^4), r^2 = x1^2 + x2^2",
            FormId::F8 => "x1^3 + 6*s*x1 + sum_{i>=2} a_i*x_i^2 + 2*(sum_{i>=2} a_i)*s",
            FormId::F9 => "x1^3 - 6*s*x1 - 6*x1*x2^2 + sum_{i>=2} a_i*x_i^2 + 2*(sum_{i>=2} a_i)*s",
        }
    }
}

impl fmt::Display for FormId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum StabilityKind {
    #[serde(rename = "H-stable")]
    H,
    #[serde(rename = "IS-stable")]
    IS,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FormError {
    #[error("{id} is not defined in dimension {n}")]
    Dimension { id: FormId, n: usize },
    #[error("{id} expects {expected} coefficients, got {got}")]
    ParamCount {
        id: FormId,
        expected: usize,
        got: usize,
    },
    #[error("{id}: coefficient a_{index} is zero")]
    ZeroCoefficient { id: FormId, index: usize },
    #[error("{id}: coefficient sum is {sum}, constraint requires {required}")]
    SumConstraint {
        id: FormId,
        sum: Rational,
        required: &'static str,
    },
    #[error("{id}: sign must be +1 or -1, got {sign}")]
    Sign { id: FormId, sign: i8 },
    #[error("{id}: invalid tail: {reason}")]
    Tail { id: FormId, reason: String },
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// One parameterized catalog entry.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalForm {
    pub id: FormId,
    pub n: usize,
    /// `a₁..aₙ` for F2/F6/F7; `a₂..aₙ` for F8/F9; empty otherwise.
    pub params: Vec<Rational>,
    /// `σ = ±1` for F1/F5/F7; ignored elsewhere.
    pub sign: i8,
    /// Quadratic tail `Q(x₂..xₙ, s)` for F3/F4, a form in `n − 1` variables.
    pub tail: Option<Box<NormalForm>>,
    /// Quartic coefficient `q` of F7.
    pub quartic: Rational,
}

/// Printed quartic coefficient of F7.
pub fn f7_printed_quartic() -> Rational {
    rat(1, 16)
}

/// Quartic coefficient of F7 that makes it an exact heat solution.
pub fn f7_corrected_quartic() -> Rational {
    rat(1, 32)
}

impl NormalForm {
    fn bare(id: FormId, n: usize) -> Self {
        NormalForm {
            id,
            n,
            params: Vec::new(),
            sign: 1,
            tail: None,
            quartic: Rational::zero(),
        }
    }

    pub fn f1(n: usize, sign: i8) -> Self {
        NormalForm {
            sign,
            ..Self::bare(FormId::F1, n)
        }
    }

    pub fn f2(params: Vec<Rational>) -> Self {
        NormalForm {
            params: params.clone(),
            ..Self::bare(FormId::F2, params.len())
        }
    }

    pub fn f3(n: usize, tail: Option<NormalForm>) -> Self {
        NormalForm {
            tail: tail.map(Box::new),
            ..Self::bare(FormId::F3, n)
        }
    }

    pub fn f4(n: usize, tail: Option<NormalForm>) -> Self {
        NormalForm {
            tail: tail.map(Box::new),
            ..Self::bare(FormId::F4, n)
        }
    }

    pub fn f5(n: usize, sign: i8) -> Self {
        NormalForm {
            sign,
            ..Self::bare(FormId::F5, n)
        }
    }

    pub fn f6(params: Vec<Rational>) -> Self {
        NormalForm {
            params: params.clone(),
            ..Self::bare(FormId::F6, params.len())
        }
    }

    pub fn f7(params: Vec<Rational>, sign: i8, quartic: Rational) -> Self {
        NormalForm {
            params: params.clone(),
            sign,
            quartic,
            ..Self::bare(FormId::F7, params.len())
        }
    }

    /// F7 with the quartic coefficient as historically printed (`1/16`).
    pub fn f7_printed(params: Vec<Rational>, sign: i8) -> Self {
        Self::f7(params, sign, f7_printed_quartic())
    }

    /// F7 with `q = 1/32`, the value that solves the heat equation.
    pub fn f7_corrected(params: Vec<Rational>, sign: i8) -> Self {
        Self::f7(params, sign, f7_corrected_quartic())
    }

    /// F8 in dimension `tail_params.len() + 1` with coefficients `a₂..aₙ`.
    pub fn f8(tail_params: Vec<Rational>) -> Self {
        NormalForm {
            params: tail_params.clone(),
            ..Self::bare(FormId::F8, tail_params.len() + 1)
        }
    }

    pub fn f9(tail_params: Vec<Rational>) -> Self {
        NormalForm {
            params: tail_params.clone(),
            ..Self::bare(FormId::F9, tail_params.len() + 1)
        }
    }

    pub fn kind(&self) -> StabilityKind {
        self.id.kind()
    }

    fn check_sign(&self) -> Result<(), FormError> {
        if self.sign == 1 || self.sign == -1 {
            Ok(())
        } else {
            Err(FormError::Sign {
                id: self.id,
                sign: self.sign,
            })
        }
    }

    fn check_params(&self, expected: usize, offset: usize) -> Result<Rational, FormError> {
        if self.params.len() != expected {
            return Err(FormError::ParamCount {
                id: self.id,
                expected,
                got: self.params.len(),
            });
        }
        if let Some(i) = self.params.iter().position(Zero::is_zero) {
            return Err(FormError::ZeroCoefficient {
                id: self.id,
                index: i + 1 + offset,
            });
        }
        Ok(self.params.iter().fold(Rational::zero(), |acc, a| acc + a))
    }

    fn require_sum(&self, sum: Rational, zero: bool) -> Result<(), FormError> {
        match (zero, sum.is_zero()) {
            (true, false) => Err(FormError::SumConstraint {
                id: self.id,
                sum,
                required: "= 0",
            }),
            (false, true) => Err(FormError::SumConstraint {
                id: self.id,
                sum,
                required: "!= 0",
            }),
            _ => Ok(()),
        }
    }

    /// Checks every parameter constraint of the template.
    pub fn validate(&self) -> Result<(), FormError> {
        if !self.id.applies_to(self.n) {
            return Err(FormError::Dimension {
                id: self.id,
                n: self.n,
            });
        }
        match self.id {
            FormId::F1 | FormId::F5 => self.check_sign(),
            FormId::F2 => {
                let sum = self.check_params(self.n, 0)?;
                self.require_sum(sum, true)
            }
            FormId::F6 => {
                let sum = self.check_params(self.n, 0)?;
                self.require_sum(sum, false)
            }
            FormId::F7 => {
                self.check_sign()?;
                let sum = self.check_params(2, 0)?;
                self.require_sum(sum, true)
            }
            FormId::F8 | FormId::F9 => {
                let sum = self.check_params(self.n - 1, 1)?;
                self.require_sum(sum, false)
            }
            FormId::F3 | FormId::F4 => self.check_tail(),
        }
    }

    fn check_tail(&self) -> Result<(), FormError> {
        let Some(tail) = &self.tail else {
            return Ok(());
        };
        let err = |reason: String| FormError::Tail {
            id: self.id,
            reason,
        };
        if tail.n + 1 != self.n {
            return Err(err(format!(
                "tail has {} variables, expected {}",
                tail.n,
                self.n - 1
            )));
        }
        if !matches!(tail.id, FormId::F1 | FormId::F2 | FormId::F5 | FormId::F6) {
            return Err(err(format!(
                "{} is not a quadratic heat-solution form",
                tail.id
            )));
        }
        tail.validate().map_err(|e| err(e.to_string()))
    }

    /// Realizes the form as an exact polynomial in `x₁..xₙ, s`.
    pub fn build(&self) -> Result<Polynomial, FormError> {
        self.validate()?;
        let n = self.n;
        let x = |i: usize| Polynomial::var(n, Var::Spatial(i)).expect("index < n");
        let s = Polynomial::var(n, Var::S)?;
        let sum_sq = (0..n).fold(Polynomial::zero(n), |acc, i| &acc + &x(i).pow(2));
        let weighted_sq = |params: &[Rational], first: usize| {
            params
                .iter()
                .enumerate()
                .fold(Polynomial::zero(n), |acc, (k, a)| {
                    &acc + &x(first + k).pow(2).scale_by(a)
                })
        };
        let sigma = int(self.sign as i64);
        let cubic_plus = || &x(0).pow(3) + &(&s * &x(0)).scale_by(&int(6));
        let cubic_minus = || {
            let base = &x(0).pow(3) - &(&s * &x(0)).scale_by(&int(6));
            &base - &(&x(0) * &x(1).pow(2)).scale_by(&int(6))
        };
        let sum = || self.params.iter().fold(Rational::zero(), |acc, a| acc + a);

        let poly = match self.id {
            FormId::F1 | FormId::F5 => (&sum_sq + &s.scale_by(&int(2 * n as i64))).scale_by(&sigma),
            FormId::F2 => weighted_sq(&self.params, 0),
            FormId::F6 => &weighted_sq(&self.params, 0) + &s.scale_by(&(int(2) * sum())),
            FormId::F7 => {
                let r2 = &x(0).pow(2) + &x(1).pow(2);
                let inner = &(&s.pow(2) + &(&s * &r2).scale_by(&rat(1, 2)))
                    + &r2.pow(2).scale_by(&self.quartic);
                &weighted_sq(&self.params, 0) + &inner.scale_by(&sigma)
            }
            FormId::F3 | FormId::F4 => {
                let head = if self.id == FormId::F3 {
                    cubic_plus()
                } else {
                    cubic_minus()
                };
                match &self.tail {
                    Some(t) => &head + &t.build()?.embed(n, 1)?,
                    None => head,
                }
            }
            FormId::F8 | FormId::F9 => {
                let head = if self.id == FormId::F8 {
                    cubic_plus()
                } else {
                    cubic_minus()
                };
                let tail = &weighted_sq(&self.params, 1) + &s.scale_by(&(int(2) * sum()));
                &head + &tail
            }
        };
        Ok(poly)
    }

    /// Exact heat-equation check of the built polynomial.
    pub fn verify_heat(&self) -> Result<HeatReport, FormError> {
        let poly = self.build()?;
        let residual = poly.heat_residual();
        Ok(HeatReport {
            id: self.id,
            kind: self.kind(),
            n: self.n,
            params: self.param_strings(),
            polynomial: poly.to_string(),
            is_solution: residual.is_zero(),
            residual: residual.to_string(),
        })
    }

    fn param_strings(&self) -> Vec<String> {
        let mut out: Vec<String> = self.params.iter().map(|a| a.to_string()).collect();
        match self.id {
            FormId::F1 | FormId::F5 => out.push(format!("sigma={}", self.sign)),
            FormId::F7 => {
                out.push(format!("sigma={}", self.sign));
                out.push(format!("q={}", self.quartic));
            }
            FormId::F3 | FormId::F4 => {
                if let Some(t) = &self.tail {
                    out.push(format!("Q={}", t.id));
                    out.extend(t.param_strings());
                }
            }
            _ => {}
        }
        out
    }
}

/// Result of [`NormalForm::verify_heat`]; serialized as the catalog verification record.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HeatReport {
    pub id: FormId,
    pub kind: StabilityKind,
    pub n: usize,
    pub params: Vec<String>,
    pub polynomial: String,
    pub residual: String,
    pub is_solution: bool,
}

/// Description of one template in a given dimension.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FormTemplate {
    pub id: FormId,
    pub kind: StabilityKind,
    pub n: usize,
    pub template: &'static str,
    pub constraints: &'static str,
    pub param_slots: usize,
}

/// Templates applicable in dimension `n`.
pub fn list_catalog(n: usize) -> Result<Vec<FormTemplate>, FormError> {
    if n == 0 {
        return Err(FormError::Dimension { id: FormId::F1, n });
    }
    Ok(FormId::ALL
        .iter()
        .filter(|id| id.applies_to(n))
        .map(|&id| FormTemplate {
            id,
            kind: id.kind(),
            n,
            template: id.template(),
            constraints: id.constraint(),
            param_slots: match id {
                FormId::F2 | FormId::F6 => n,
                FormId::F7 => 2,
                FormId::F8 | FormId::F9 => n - 1,
                _ => 0,
            },
        })
        .collect())
}

/// A representative valid instance of every template in dimension `n`,
/// with the printed F7 coefficient.
pub fn sample_forms(n: usize) -> Vec<NormalForm> {
    let ones_alt = |len: usize| -> Vec<Rational> {
        // 1, -1, 1, -1, ... with the last entry adjusted so the sum is zero
        let mut v: Vec<Rational> = (0..len)
            .map(|i| if i % 2 == 0 { int(1) } else { int(-1) })
            .collect();
        if len % 2 == 1 && len >= 3 {
            v[len - 1] = int(-1);
            v[len - 2] = int(2);
            v[len - 3] = int(-1);
        }
        v
    };
    let tail = (n >= 2).then(|| NormalForm::f1(n - 1, 1));
    let mut out = Vec::new();
    for id in FormId::ALL {
        if !id.applies_to(n) {
            continue;
        }
        out.push(match id {
            FormId::F1 => NormalForm::f1(n, 1),
            FormId::F2 => NormalForm::f2(ones_alt(n)),
            FormId::F3 => NormalForm::f3(n, tail.clone()),
            FormId::F4 => NormalForm::f4(n, tail.clone()),
            FormId::F5 => NormalForm::f5(n, -1),
            FormId::F6 => NormalForm::f6((1..=n as i64).map(int).collect()),
            FormId::F7 => NormalForm::f7_printed(vec![int(1), int(-1)], 1),
            FormId::F8 => NormalForm::f8((1..n as i64).map(int).collect()),
            FormId::F9 => NormalForm::f9((1..n as i64).map(int).collect()),
        });
    }
    out
}

/// Residual of F7 in closed form: `σ(½ − 16q)·r²`.
pub fn f7_expected_residual(sign: i8, quartic: &Rational) -> Polynomial {
    let r2 = Polynomial::parse("x^2 + y^2", 2).expect("static");
    let factor = (rat(1, 2) - int(16) * quartic) * int(sign as i64);
    r2.scale_by(&factor)
}
