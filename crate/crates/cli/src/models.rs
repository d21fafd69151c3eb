//! Input files for the `dense` and `normalize` commands.

use cmlab::algcore::closure_in;
use cmlab::densekit::{
    flag_subalgebra, is_dense, is_dense_in_flag, normalize_escalating, refine_to_dense_flag,
    BlockMatrixAmbient, FlagData, Normalization, SemisimpleAlgebraModel,
};
use cmlab::exactfield::{Elem, Field, FieldEmbedding, FieldSpec, Matrix, SubspaceBasis};
use cmlab::{CmError, Result};
use serde::{Deserialize, Serialize};

/// A field element: a prime-field residue or a coordinate vector.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Int(i64),
    Coords(Vec<i64>),
}

impl Entry {
    fn elem(&self, f: &Field) -> Result<Elem> {
        match self {
            Entry::Int(v) => Ok(f.from_int(*v)),
            Entry::Coords(c) => f.from_coords(c),
        }
    }
}

type RawMatrix = Vec<Vec<Entry>>;

fn matrix(f: &Field, raw: &RawMatrix, rows: usize, cols: usize, what: &str) -> Result<Matrix> {
    if raw.len() != rows || raw.iter().any(|r| r.len() != cols) {
        return Err(CmError::InvalidInput(format!(
            "{what} must be {rows} x {cols}"
        )));
    }
    let rows: Vec<Vec<Elem>> = raw
        .iter()
        .map(|r| r.iter().map(|e| e.elem(f)).collect::<Result<_>>())
        .collect::<Result<_>>()?;
    Ok(Matrix::from_rows(&rows))
}

fn vector(f: &Field, raw: &[Entry], len: usize, what: &str) -> Result<Vec<Elem>> {
    if raw.len() != len {
        return Err(CmError::InvalidInput(format!(
            "{what} must have length {len}"
        )));
    }
    raw.iter().map(|e| e.elem(f)).collect()
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DenseModel {
    pub field: FieldSpec,
    /// `(n_i, degree_i)` per simple factor.
    pub factors: Vec<(usize, usize)>,
    /// Each generator lists one square block per factor.
    pub generators: Vec<Vec<RawMatrix>>,
    /// Per factor, the proper nonzero members of the flag as spanning rows.
    #[serde(default)]
    pub flag: Option<Vec<Vec<Vec<Vec<Entry>>>>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct FlagSummary {
    pub dims: Vec<Vec<usize>>,
    pub chains: Vec<Vec<Vec<Vec<Elem>>>>,
}

impl FlagSummary {
    fn of(flag: &FlagData) -> Self {
        FlagSummary {
            dims: flag
                .chains
                .iter()
                .map(|c| c.iter().map(|u| u.dim()).collect())
                .collect(),
            chains: flag
                .chains
                .iter()
                .map(|c| c.iter().map(|u| u.rows().to_vec()).collect())
                .collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DenseReport {
    pub algebra_dim: usize,
    pub subalgebra_dim: usize,
    pub is_dense: bool,
    pub flag: FlagSummary,
    pub flag_algebra_dim: usize,
    pub dense_in_flag: bool,
    pub refined_flag: FlagSummary,
    pub refined_flag_algebra_dim: usize,
    pub dense_in_refined_flag: bool,
}

pub fn run_dense(model: &DenseModel) -> Result<DenseReport> {
    let f = Field::from_spec(model.field)?;
    let a = SemisimpleAlgebraModel::new(f.clone(), &model.factors)?;
    let amb = a.ambient();
    let mut gens = Vec::new();
    for (k, g) in model.generators.iter().enumerate() {
        if g.len() != a.factors().len() {
            return Err(CmError::InvalidInput(format!(
                "generator {k} must give one block per factor"
            )));
        }
        let blocks = g
            .iter()
            .zip(a.factors())
            .map(|(m, fac)| matrix(&f, m, fac.module_dim(), fac.module_dim(), "block"))
            .collect::<Result<Vec<_>>>()?;
        gens.push(amb.from_blocks(&blocks));
    }
    let b = a.subalgebra(&gens)?;
    let flag = match &model.flag {
        None => FlagData::trivial(&a),
        Some(per_factor) => {
            if per_factor.len() != a.factors().len() {
                return Err(CmError::InvalidInput(
                    "flag must list one chain per factor".into(),
                ));
            }
            let mut chains = Vec::new();
            for (subs, fac) in per_factor.iter().zip(a.factors()) {
                let dim = fac.module_dim();
                let mut chain = vec![SubspaceBasis::full(dim)];
                for rows in subs {
                    let rows = rows
                        .iter()
                        .map(|r| vector(&f, r, dim, "flag row"))
                        .collect::<Result<Vec<_>>>()?;
                    chain.push(SubspaceBasis::span(&f, dim, rows));
                }
                chain.push(SubspaceBasis::zero(dim));
                chains.push(chain);
            }
            FlagData { chains }
        }
    };
    let af = flag_subalgebra(&a, &flag)?;
    let refined = refine_to_dense_flag(&b, &a, &flag)?;
    let ar = flag_subalgebra(&a, &refined)?;
    Ok(DenseReport {
        algebra_dim: a.dim(),
        subalgebra_dim: b.dim(),
        is_dense: is_dense(&b, &a)?,
        flag: FlagSummary::of(&flag),
        flag_algebra_dim: af.dim(),
        dense_in_flag: is_dense_in_flag(&b, &a, &flag)?,
        refined_flag: FlagSummary::of(&refined),
        refined_flag_algebra_dim: ar.dim(),
        dense_in_refined_flag: is_dense_in_flag(&b, &a, &refined)?,
    })
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormalizeInput {
    pub field: FieldSpec,
    pub n: usize,
    pub m: usize,
    /// Spanning `n x m` matrices of `V`.
    pub v: Vec<RawMatrix>,
    /// Generators of `b ⊆ M_n`; all of `M_n` when absent.
    #[serde(default)]
    pub b: Option<Vec<RawMatrix>>,
    #[serde(default = "yes")]
    pub check_density: bool,
}

fn yes() -> bool {
    true
}

#[derive(Clone, Debug, Serialize)]
pub struct NormalizeReport {
    pub field: FieldSpec,
    pub escalated: bool,
    pub dim_v: usize,
    pub b_dim: usize,
    #[serde(flatten)]
    pub normalization: Normalization,
    pub verified: bool,
}

pub fn run_normalize(input: &NormalizeInput) -> Result<NormalizeReport> {
    let f = Field::from_spec(input.field)?;
    let (n, m) = (input.n, input.m);
    if n == 0 || m == 0 {
        return Err(CmError::InvalidInput("n and m must be positive".into()));
    }
    let rows = input
        .v
        .iter()
        .map(|x| matrix(&f, x, n, m, "element of V").map(|mm| mm.to_rows().concat()))
        .collect::<Result<Vec<_>>>()?;
    let v = SubspaceBasis::span(&f, n * m, rows);
    let amb = BlockMatrixAmbient::new(f.clone(), vec![n]);
    let b = match &input.b {
        None => SemisimpleAlgebraModel::matrix_algebra(f.clone(), n)?
            .algebra()
            .clone(),
        Some(gens) => {
            let gens = gens
                .iter()
                .map(|g| matrix(&f, g, n, n, "generator of b").map(|mm| mm.to_rows().concat()))
                .collect::<Result<Vec<_>>>()?;
            closure_in(&amb, &gens)
        }
    };
    let (norm, big) = normalize_escalating(&v, &b, n, m, input.check_density)?;
    let verified = if big == f {
        norm.verify(&f, &v)
    } else {
        let e = FieldEmbedding::new(&f, &big)?;
        let vb = SubspaceBasis::span(&big, n * m, v.rows().iter().map(|r| e.map_vec(r)));
        norm.verify(&big, &vb)
    };
    Ok(NormalizeReport {
        field: big.spec(),
        escalated: big != f,
        dim_v: v.dim(),
        b_dim: b.dim(),
        normalization: norm,
        verified,
    })
}
