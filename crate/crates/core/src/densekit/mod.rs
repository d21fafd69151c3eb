//! Dense subalgebras of semisimple algebras, flag subalgebras, and the
//! normalization of submodules of `M_{n x m}`.

mod normalize;
mod sandwich;

use serde::Serialize;

use crate::algcore::{AlgebraAmbient, FiniteAlgebra};
use crate::error::{CmError, Result};
use crate::exactfield::{poly, Elem, Field, Matrix, SubspaceBasis};

pub use normalize::{
    complete_to_free_rank, extract_free_basis, extract_free_basis_escalating, is_free_basis,
    normalize_escalating, normalize_submodule, right_image, row_space_spans, with_escalation,
    FreeRankCompletion, Normalization, MAX_ESCALATION_DEGREE,
};
pub use sandwich::{is_dense_pair, sandwich_form, Sandwich};

/// Largest number of vectors an exhaustive spin may visit.
pub const SPIN_BUDGET: u64 = 1 << 22;

/// Product of full matrix algebras `M_{s_i}(k)`, coordinates the
/// concatenated row-major blocks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockMatrixAmbient {
    field: Field,
    sizes: Vec<usize>,
    offsets: Vec<usize>,
}

impl BlockMatrixAmbient {
    pub fn new(field: Field, sizes: Vec<usize>) -> Self {
        let mut offsets = Vec::with_capacity(sizes.len());
        let mut acc = 0;
        for &s in &sizes {
            offsets.push(acc);
            acc += s * s;
        }
        BlockMatrixAmbient {
            field,
            sizes,
            offsets,
        }
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn block(&self, x: &[Elem], i: usize) -> Matrix {
        let s = self.sizes[i];
        let o = self.offsets[i];
        Matrix::from_flat(s, s, x[o..o + s * s].to_vec())
    }

    pub fn from_blocks(&self, blocks: &[Matrix]) -> Vec<Elem> {
        blocks.iter().flat_map(|m| m.data.clone()).collect()
    }

    /// Embeds a single block, zero elsewhere.
    pub fn embed(&self, i: usize, m: &Matrix) -> Vec<Elem> {
        let mut v = vec![0; self.dim()];
        let o = self.offsets[i];
        v[o..o + m.data.len()].copy_from_slice(&m.data);
        v
    }
}

impl AlgebraAmbient for BlockMatrixAmbient {
    fn field(&self) -> &Field {
        &self.field
    }

    fn dim(&self) -> usize {
        self.sizes.iter().map(|s| s * s).sum()
    }

    fn mul(&self, a: &[Elem], b: &[Elem]) -> Vec<Elem> {
        let f = &self.field;
        let blocks: Vec<Matrix> = (0..self.sizes.len())
            .map(|i| self.block(a, i).mul(f, &self.block(b, i)))
            .collect();
        self.from_blocks(&blocks)
    }

    fn one(&self) -> Vec<Elem> {
        let blocks: Vec<Matrix> = self.sizes.iter().map(|&s| Matrix::identity(s)).collect();
        self.from_blocks(&blocks)
    }
}

/// A simple factor `M_n(K)` with `K = k[C]`, `C` the companion matrix of an
/// irreducible polynomial of degree `degree` over the base field.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SimpleFactor {
    pub n: usize,
    pub degree: usize,
    #[serde(skip)]
    pub companion: Matrix,
}

impl SimpleFactor {
    /// Dimension of the column module over the base field.
    pub fn module_dim(&self) -> usize {
        self.n * self.degree
    }
}

/// `A = prod M_{n_i}(K_i)` realized inside block matrices over `k`.
#[derive(Clone, Debug)]
pub struct SemisimpleAlgebraModel {
    field: Field,
    factors: Vec<SimpleFactor>,
    ambient: BlockMatrixAmbient,
    algebra: FiniteAlgebra<BlockMatrixAmbient>,
}

/// Lexicographically first monic irreducible polynomial of the given degree.
fn first_irreducible(f: &Field, degree: usize) -> Vec<Elem> {
    let q = f.order() as u64;
    let count = q.pow(degree as u32);
    for idx in 0..count {
        let mut coeffs = Vec::with_capacity(degree + 1);
        let mut r = idx;
        for _ in 0..degree {
            coeffs.push((r % q) as Elem);
            r /= q;
        }
        coeffs.push(1);
        if poly::is_irreducible(f, &coeffs) {
            return coeffs;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

fn companion(f: &Field, g: &[Elem]) -> Matrix {
    let d = g.len() - 1;
    let mut c = Matrix::zeros(d, d);
    for i in 0..d.saturating_sub(1) {
        c.set(i + 1, i, 1);
    }
    for (j, &gj) in g[..d].iter().enumerate() {
        c.set(j, d - 1, f.neg(gj));
    }
    c
}

fn mat_pow(f: &Field, m: &Matrix, k: usize) -> Matrix {
    (0..k).fold(Matrix::identity(m.rows), |acc, _| acc.mul(f, m))
}

/// Kronecker-style placement: block `(r, c)` of an `n x n` grid of
/// `d x d` blocks set to `m`.
fn place(n: usize, d: usize, r: usize, c: usize, m: &Matrix) -> Matrix {
    let mut out = Matrix::zeros(n * d, n * d);
    for i in 0..d {
        for j in 0..d {
            out.set(r * d + i, c * d + j, m.get(i, j));
        }
    }
    out
}

impl SemisimpleAlgebraModel {
    /// Factors given as `(n_i, degree_i)`.
    pub fn new(field: Field, factors: &[(usize, usize)]) -> Result<Self> {
        if factors.is_empty() || factors.iter().any(|&(n, d)| n == 0 || d == 0) {
            return Err(CmError::input("factors need n >= 1 and degree >= 1"));
        }
        let factors: Vec<SimpleFactor> = factors
            .iter()
            .map(|&(n, degree)| SimpleFactor {
                n,
                degree,
                companion: companion(&field, &first_irreducible(&field, degree)),
            })
            .collect();
        let ambient = BlockMatrixAmbient::new(
            field.clone(),
            factors.iter().map(|x| x.module_dim()).collect(),
        );
        let mut rows = Vec::new();
        for (i, fac) in factors.iter().enumerate() {
            for j in 0..fac.degree {
                let cj = mat_pow(&field, &fac.companion, j);
                for r in 0..fac.n {
                    for c in 0..fac.n {
                        rows.push(ambient.embed(i, &place(fac.n, fac.degree, r, c, &cj)));
                    }
                }
            }
        }
        let basis = SubspaceBasis::span(&field, ambient.dim(), rows);
        let algebra = FiniteAlgebra::new(ambient.clone(), basis)?;
        Ok(SemisimpleAlgebraModel {
            field,
            factors,
            ambient,
            algebra,
        })
    }

    /// `M_n(k)`.
    pub fn matrix_algebra(field: Field, n: usize) -> Result<Self> {
        Self::new(field, &[(n, 1)])
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn factors(&self) -> &[SimpleFactor] {
        &self.factors
    }

    pub fn ambient(&self) -> &BlockMatrixAmbient {
        &self.ambient
    }

    pub fn algebra(&self) -> &FiniteAlgebra<BlockMatrixAmbient> {
        &self.algebra
    }

    pub fn dim(&self) -> usize {
        self.algebra.dim()
    }

    /// True when every factor is a matrix algebra over the base field.
    pub fn is_split(&self) -> bool {
        self.factors.iter().all(|x| x.degree == 1)
    }

    /// Right scalar action of the generator of `K_i` on the column module.
    fn scalar_generator(&self, i: usize) -> Matrix {
        let fac = &self.factors[i];
        let mut m = Matrix::zeros(fac.module_dim(), fac.module_dim());
        for r in 0..fac.n {
            let p = place(fac.n, fac.degree, r, r, &fac.companion);
            m = m.add(&self.field, &p);
        }
        m
    }

    /// Basis of the factor `A_i`, as ambient vectors.
    pub fn factor_basis(&self, i: usize) -> Vec<Vec<Elem>> {
        let fac = &self.factors[i];
        let mut out = Vec::new();
        for j in 0..fac.degree {
            let cj = mat_pow(&self.field, &fac.companion, j);
            for r in 0..fac.n {
                for c in 0..fac.n {
                    out.push(self.ambient.embed(i, &place(fac.n, fac.degree, r, c, &cj)));
                }
            }
        }
        out
    }

    /// Subalgebra of the model generated by the given elements.
    pub fn subalgebra(&self, gens: &[Vec<Elem>]) -> Result<FiniteAlgebra<BlockMatrixAmbient>> {
        for g in gens {
            if !self.algebra.contains(g) {
                return Err(CmError::pre(
                    "generator does not lie in the semisimple algebra",
                ));
            }
        }
        Ok(crate::algcore::closure_in(&self.ambient, gens))
    }

    fn check_sub(&self, b: &FiniteAlgebra<BlockMatrixAmbient>) -> Result<()> {
        if b.ambient() != &self.ambient || !self.algebra.contains_algebra(b) {
            return Err(CmError::pre(
                "b is not a subalgebra of the semisimple model",
            ));
        }
        if !b.contains_one() {
            return Err(CmError::pre("b is not unital"));
        }
        Ok(())
    }

    /// Operators on the `i`-th column module: `b` on the left and the
    /// scalar field on the right.
    fn operators(&self, b: &FiniteAlgebra<BlockMatrixAmbient>, i: usize) -> Vec<Matrix> {
        let mut ops: Vec<Matrix> = b
            .basis()
            .rows()
            .iter()
            .map(|x| self.ambient.block(x, i))
            .collect();
        if self.factors[i].degree > 1 {
            ops.push(self.scalar_generator(i));
        }
        ops
    }
}

/// Smallest subspace containing `start` and stable under `ops`.
pub fn spin(f: &Field, dim: usize, ops: &[Matrix], start: &SubspaceBasis) -> SubspaceBasis {
    let mut space = start.clone();
    let mut queue: Vec<Vec<Elem>> = start.rows().to_vec();
    while let Some(v) = queue.pop() {
        for op in ops {
            let w = op.mul_vec(f, &v);
            if !space.contains(f, &w) {
                space = space
                    .sum(f, &SubspaceBasis::span(f, dim, [w.clone()]))
                    .unwrap();
                queue.push(w);
            }
        }
    }
    space
}

/// Nonzero vectors of `k^dim` up to scalars (first nonzero entry 1).
fn projective_points(f: &Field, dim: usize) -> Result<Vec<Vec<Elem>>> {
    let q = f.order() as u64;
    let total = (0..dim)
        .try_fold(1u64, |acc, _| acc.checked_mul(q))
        .unwrap_or(u64::MAX);
    if total > SPIN_BUDGET {
        return Err(CmError::BudgetExceeded(format!(
            "exhaustive spin over {q}^{dim} vectors exceeds {SPIN_BUDGET}"
        )));
    }
    let mut out = Vec::new();
    for lead in 0..dim {
        let free = dim - lead - 1;
        let count = q.pow(free as u32);
        for idx in 0..count {
            let mut v = vec![0; dim];
            v[lead] = 1;
            let mut r = idx;
            for x in v.iter_mut().skip(lead + 1) {
                *x = (r % q) as Elem;
                r /= q;
            }
            out.push(v);
        }
    }
    Ok(out)
}

/// A subspace strictly between `lower` and `upper` stable under `ops`, if
/// any; found by spinning every vector of `upper` modulo `lower`.
fn intermediate_stable(
    f: &Field,
    dim: usize,
    ops: &[Matrix],
    lower: &SubspaceBasis,
    upper: &SubspaceBasis,
) -> Result<Option<SubspaceBasis>> {
    let mut comp = Vec::new();
    let mut acc = lower.clone();
    for u in upper.rows() {
        if !acc.contains(f, u) {
            acc = acc.sum(f, &SubspaceBasis::span(f, dim, [u.clone()]))?;
            comp.push(u.clone());
        }
    }
    for coeffs in projective_points(f, comp.len())? {
        let mut v = vec![0; dim];
        for (c, row) in coeffs.iter().zip(&comp) {
            if *c != 0 {
                for (x, &r) in v.iter_mut().zip(row) {
                    *x = f.mul_add(*x, *c, r);
                }
            }
        }
        let start = lower.sum(f, &SubspaceBasis::span(f, dim, [v]))?;
        let w = spin(f, dim, ops, &start);
        if w.dim() < upper.dim() {
            return Ok(Some(w));
        }
    }
    Ok(None)
}

/// Whether every simple `a`-module is simple as a `b`-`End_a U` bimodule.
pub fn is_dense(b: &FiniteAlgebra<BlockMatrixAmbient>, a: &SemisimpleAlgebraModel) -> Result<bool> {
    a.check_sub(b)?;
    let f = &a.field;
    for i in 0..a.factors.len() {
        let dim = a.factors[i].module_dim();
        let ops = a.operators(b, i);
        let zero = SubspaceBasis::zero(dim);
        if intermediate_stable(f, dim, &ops, &zero, &SubspaceBasis::full(dim))?.is_some() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Per factor, a chain `U = U_0 > U_1 > ... > U_s = 0` of `K`-subspaces of
/// the column module.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FlagData {
    pub chains: Vec<Vec<SubspaceBasis>>,
}

impl FlagData {
    pub fn trivial(a: &SemisimpleAlgebraModel) -> Self {
        FlagData {
            chains: a
                .factors
                .iter()
                .map(|x| {
                    vec![
                        SubspaceBasis::full(x.module_dim()),
                        SubspaceBasis::zero(x.module_dim()),
                    ]
                })
                .collect(),
        }
    }

    pub fn validate(&self, a: &SemisimpleAlgebraModel) -> Result<()> {
        if self.chains.len() != a.factors.len() {
            return Err(CmError::input("flag must list one chain per simple factor"));
        }
        let f = &a.field;
        for (i, chain) in self.chains.iter().enumerate() {
            let dim = a.factors[i].module_dim();
            let bad = |msg: &str| Err(CmError::input(format!("factor {i}: {msg}")));
            if chain.len() < 2 || !chain[0].is_full() || !chain.last().unwrap().is_zero() {
                return bad("chain must run from the full module to zero");
            }
            if chain.iter().any(|u| u.ambient_dim() != dim) {
                return bad("subspace has the wrong ambient dimension");
            }
            for w in chain.windows(2) {
                if !(w[0].contains_space(f, &w[1]) && w[0].dim() > w[1].dim()) {
                    return bad("inclusions must be strict");
                }
            }
            let s = a.scalar_generator(i);
            for u in chain {
                if u.rows().iter().any(|r| !u.contains(f, &s.mul_vec(f, r))) {
                    return bad("subspace is not stable under the scalar field");
                }
            }
        }
        Ok(())
    }
}

/// `A(F) = {g in A : g U_j ⊆ U_j for all j}`.
pub fn flag_subalgebra(
    a: &SemisimpleAlgebraModel,
    flag: &FlagData,
) -> Result<FiniteAlgebra<BlockMatrixAmbient>> {
    flag.validate(a)?;
    let f = &a.field;
    let mut rows = Vec::new();
    for (i, chain) in flag.chains.iter().enumerate() {
        let basis = a.factor_basis(i);
        let mats: Vec<Matrix> = basis.iter().map(|x| a.ambient.block(x, i)).collect();
        let mut sol = SubspaceBasis::full(basis.len());
        for u in &chain[1..chain.len() - 1] {
            let t =
                crate::exactfield::transporter(f, u, u, basis.len(), |v, j| mats[j].mul_vec(f, v))?;
            sol = sol.intersect(f, &t)?;
        }
        for c in sol.rows() {
            let mut v = vec![0; a.ambient.dim()];
            for (coef, b) in c.iter().zip(&basis) {
                if *coef != 0 {
                    for (x, &y) in v.iter_mut().zip(b) {
                        *x = f.mul_add(*x, *coef, y);
                    }
                }
            }
            rows.push(v);
        }
    }
    let basis = SubspaceBasis::span(f, a.ambient.dim(), rows);
    FiniteAlgebra::new(a.ambient.clone(), basis)
}

/// Refines `flag` to a maximal `b`-invariant flag of `K`-subspaces.
pub fn refine_to_dense_flag(
    b: &FiniteAlgebra<BlockMatrixAmbient>,
    a: &SemisimpleAlgebraModel,
    flag: &FlagData,
) -> Result<FlagData> {
    a.check_sub(b)?;
    let af = flag_subalgebra(a, flag)?;
    if !af.contains_algebra(b) {
        return Err(CmError::pre("b is not contained in the flag subalgebra"));
    }
    let f = &a.field;
    let mut chains = Vec::with_capacity(flag.chains.len());
    for (i, chain) in flag.chains.iter().enumerate() {
        let dim = a.factors[i].module_dim();
        let ops = a.operators(b, i);
        let mut chain = chain.clone();
        let mut j = 0;
        while j + 1 < chain.len() {
            match intermediate_stable(f, dim, &ops, &chain[j + 1], &chain[j])? {
                Some(w) => chain.insert(j + 1, w),
                None => j += 1,
            }
        }
        chains.push(chain);
    }
    Ok(FlagData { chains })
}

/// Density of `b` in the flag subalgebra `A(F)`: every composition factor
/// `U_j / U_{j+1}` is simple under `b` and the scalars.
pub fn is_dense_in_flag(
    b: &FiniteAlgebra<BlockMatrixAmbient>,
    a: &SemisimpleAlgebraModel,
    flag: &FlagData,
) -> Result<bool> {
    a.check_sub(b)?;
    if !flag_subalgebra(a, flag)?.contains_algebra(b) {
        return Err(CmError::pre("b is not contained in the flag subalgebra"));
    }
    let f = &a.field;
    for (i, chain) in flag.chains.iter().enumerate() {
        let dim = a.factors[i].module_dim();
        let ops = a.operators(b, i);
        for w in chain.windows(2) {
            if intermediate_stable(f, dim, &ops, &w[1], &w[0])?.is_some() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests;
