use std::collections::BTreeMap;

use super::classify::admissible;
use super::spec::{SingularitySpec, Term};
use crate::error::{CmError, Result};
use crate::exactfield::{Elem, Field, FieldSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StandardKind {
    Tpq,
    FamilyMember,
}

/// A branch component `c * t^e`; `None` is zero.
type Mono = Option<(usize, i64)>;

struct Layout {
    x: Vec<Mono>,
    y: Vec<Mono>,
    b: Vec<usize>,
    /// Branches on which the family scales `x` (resp. `y`) by lambda.
    lambda_x: Vec<bool>,
    lambda_y: Vec<bool>,
}

fn layout(p: usize, q: usize) -> Layout {
    let m = |e: usize| Some((e, 1));
    match (p % 2, q % 2) {
        (1, 1) => Layout {
            x: vec![m(2), m(p - 2)],
            y: vec![m(q - 2), m(2)],
            b: vec![p + 1, q + 1],
            lambda_x: vec![true, false],
            lambda_y: vec![false, true],
        },
        (1, 0) => Layout {
            x: vec![m(1), m(1), m(p - 2)],
            y: vec![None, m(q / 2 - 1), m(2)],
            b: vec![q / 2 + 1, q / 2 + 1, p + 1],
            lambda_x: vec![false, false, true],
            lambda_y: vec![true, true, false],
        },
        (0, 0) => Layout {
            x: vec![m(1), m(1), m(p / 2 - 1), None],
            y: vec![m(q / 2 - 1), None, m(1), m(1)],
            b: vec![q / 2 + 1, p / 2 + 1, q / 2 + 1, p / 2 + 1],
            lambda_x: vec![false, true, false, true],
            lambda_y: vec![true, false, true, false],
        },
        _ => {
            // p even, q odd: the odd/even layout of T(q, p) with x and y exchanged.
            let l = layout(q, p);
            Layout {
                x: l.y,
                y: l.x,
                b: l.b,
                lambda_x: l.lambda_y,
                lambda_y: l.lambda_x,
            }
        }
    }
}

/// Separates branches that would otherwise carry identical parametrizations
/// by negating `y` on the later one.
fn separate_branches(x: &[Mono], y: &mut [Mono]) {
    for j in 1..x.len() {
        for i in 0..j {
            if x[i] == x[j] && y[i] == y[j] {
                if let Some((e, c)) = y[j] {
                    y[j] = Some((e, -c));
                }
            }
        }
    }
}

fn terms(monos: &[Mono]) -> Vec<Vec<Term>> {
    monos
        .iter()
        .map(|m| m.map(|(e, c)| vec![(e, vec![c])]).unwrap_or_default())
        .collect()
}

/// The standard `T_pq` parametrization, or the member `Lambda(lambda)` of
/// the degeneration family, over the given field.
pub fn build_standard(
    kind: StandardKind,
    p: usize,
    q: usize,
    lambda_value: Option<Elem>,
    field: FieldSpec,
) -> Result<SingularitySpec> {
    if p < 3 || q < 3 || !admissible(p, q) {
        return Err(CmError::input(format!(
            "(p, q) = ({p}, {q}) violates 1/p + 1/q <= 1/2"
        )));
    }
    let f = Field::from_spec(field)?;
    let mut l = layout(p, q);
    separate_branches(&l.x, &mut l.y);
    let truncation = l.b.iter().max().copied().unwrap() + 4;
    let branches = l.x.len();
    let mut generators = BTreeMap::new();
    match kind {
        StandardKind::Tpq => {
            generators.insert("x".to_string(), terms(&l.x));
            generators.insert("y".to_string(), terms(&l.y));
        }
        StandardKind::FamilyMember => {
            let lam =
                lambda_value.ok_or_else(|| CmError::input("family member needs a lambda value"))?;
            if lam >= f.order() {
                return Err(CmError::input(format!(
                    "lambda {lam} is not an element of {f:?}"
                )));
            }
            let scaled = |monos: &[Mono], flags: &[bool]| -> Vec<Vec<Term>> {
                monos
                    .iter()
                    .zip(flags)
                    .map(|(m, &is_lam)| match m {
                        None => Vec::new(),
                        Some(_) if is_lam && lam == 0 => Vec::new(),
                        Some((e, c)) if is_lam => {
                            vec![(
                                *e,
                                f.coords(lam)
                                    .into_iter()
                                    .map(|x| i64::from(x) * c)
                                    .collect(),
                            )]
                        }
                        Some((e, c)) => vec![(*e, vec![*c])],
                    })
                    .collect()
            };
            let xy: Vec<Mono> =
                l.x.iter()
                    .zip(&l.y)
                    .map(|(a, b)| match (a, b) {
                        (Some((e1, c1)), Some((e2, c2))) if e1 + e2 < truncation => {
                            Some((e1 + e2, c1 * c2))
                        }
                        _ => None,
                    })
                    .collect();
            generators.insert("x".to_string(), scaled(&l.x, &l.lambda_x));
            generators.insert("y".to_string(), scaled(&l.y, &l.lambda_y));
            generators.insert("xy".to_string(), terms(&xy));
            for (br, &bi) in l.b.iter().enumerate() {
                for j in bi..truncation {
                    let mut per_branch = vec![Vec::new(); branches];
                    per_branch[br] = vec![(j, vec![1])];
                    generators.insert(format!("i{}_{:02}", br + 1, j), per_branch);
                }
            }
        }
    }
    let spec = SingularitySpec {
        field,
        branches,
        truncation,
        generators,
    };
    spec.validate()?;
    Ok(spec)
}
