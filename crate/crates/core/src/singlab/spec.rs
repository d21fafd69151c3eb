use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::branches::{AmbientRing, MultiBranchElement};
use crate::error::{CmError, Result};
use crate::exactfield::{Field, FieldSpec};

/// One `(exponent, coefficient)` term; the coefficient lists residue
/// polynomial coordinates over `F_p`.
pub type Term = (usize, Vec<i64>);

/// A parametrized singularity: generators given branch by branch.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SingularitySpec {
    pub field: FieldSpec,
    pub branches: usize,
    pub truncation: usize,
    pub generators: BTreeMap<String, Vec<Vec<Term>>>,
}

impl SingularitySpec {
    pub fn validate(&self) -> Result<()> {
        if self.branches == 0 || self.truncation == 0 {
            return Err(CmError::input("branches and truncation must be positive"));
        }
        for (name, per_branch) in &self.generators {
            if per_branch.len() != self.branches {
                return Err(CmError::input(format!(
                    "generator {name} lists {} branches, expected {}",
                    per_branch.len(),
                    self.branches
                )));
            }
            for terms in per_branch {
                for (exp, coeff) in terms {
                    if *exp == 0 {
                        return Err(CmError::input(format!(
                            "generator {name} has exponent 0; generators must vanish at the origin"
                        )));
                    }
                    if *exp >= self.truncation {
                        return Err(CmError::TruncationInsufficient(format!(
                            "generator {name} has exponent {exp} >= truncation {}; raise the truncation",
                            self.truncation
                        )));
                    }
                    if coeff.len() > self.field.degree as usize {
                        return Err(CmError::input(format!(
                            "generator {name}: coefficient vector longer than the field degree"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn field(&self) -> Result<Field> {
        Field::from_spec(self.field)
    }

    pub fn ambient(&self) -> Result<AmbientRing> {
        AmbientRing::new(self.field()?, self.branches, self.truncation)
    }

    pub fn element(&self, amb: &AmbientRing, name: &str) -> Result<MultiBranchElement> {
        let per_branch = self
            .generators
            .get(name)
            .ok_or_else(|| CmError::input(format!("missing generator {name}")))?;
        let f = amb.field();
        let mut v = amb.zero_vec();
        for (br, terms) in per_branch.iter().enumerate() {
            for (exp, coeff) in terms {
                if *exp < amb.truncation() {
                    let idx = amb.index(br, *exp);
                    v[idx] = f.add(v[idx], f.from_coords(coeff)?);
                }
            }
        }
        amb.element(v)
    }

    pub fn elements(&self, amb: &AmbientRing) -> Result<Vec<MultiBranchElement>> {
        self.generators
            .keys()
            .map(|k| self.element(amb, k))
            .collect()
    }

    pub fn with_truncation(&self, truncation: usize) -> SingularitySpec {
        SingularitySpec {
            truncation,
            ..self.clone()
        }
    }

    /// Branch `i` of the result is branch `perm[i]` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> SingularitySpec {
        let generators = self
            .generators
            .iter()
            .map(|(k, v)| (k.clone(), perm.iter().map(|&i| v[i].clone()).collect()))
            .collect();
        SingularitySpec {
            generators,
            ..self.clone()
        }
    }

    /// The same integer coefficients read over the prime field `F_p`.
    pub fn reinstantiate(&self, p: u32) -> Result<SingularitySpec> {
        for (name, per_branch) in &self.generators {
            for (exp, coeff) in per_branch.iter().flatten() {
                if coeff
                    .iter()
                    .skip(1)
                    .any(|&c| c.rem_euclid(self.field.characteristic as i64) != 0)
                {
                    return Err(CmError::IncompatibleCoefficients {
                        prime: p,
                        detail: format!("generator {name}, exponent {exp}: coefficient {coeff:?} is not an integer"),
                    });
                }
            }
        }
        let generators = self
            .generators
            .iter()
            .map(|(k, v)| {
                let v = v
                    .iter()
                    .map(|terms| {
                        terms
                            .iter()
                            .map(|(e, c)| (*e, vec![c.first().copied().unwrap_or(0)]))
                            .collect()
                    })
                    .collect();
                (k.clone(), v)
            })
            .collect();
        Field::new(p, 1)?;
        Ok(SingularitySpec {
            field: FieldSpec {
                characteristic: p,
                degree: 1,
            },
            generators,
            ..self.clone()
        })
    }
}
