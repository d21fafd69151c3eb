use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{is_dense, BlockMatrixAmbient, SemisimpleAlgebraModel};
use crate::algcore::{AlgebraAmbient, FiniteAlgebra};
use crate::error::{CmError, Result};
use crate::exactfield::{left_kernel, Elem, Field, FieldEmbedding, Matrix, SubspaceBasis};

/// Number of scalar tuples tried by the combination sweep.
pub const SWEEP_BUDGET: u64 = 1 << 16;

/// Largest extension degree tried by automatic escalation.
pub const MAX_ESCALATION_DEGREE: u32 = 8;

fn too_small(f: &Field, reason: String) -> CmError {
    CmError::FieldTooSmall {
        reason,
        suggested_degree: (2 * f.degree()).min(MAX_ESCALATION_DEGREE),
    }
}

/// Runs `attempt` over `f`, then over the suggested extensions while it
/// reports `FieldTooSmall`. Returns the value and the field it was found
/// over; the last error once the degree cannot grow further.
pub fn with_escalation<T>(
    f: &Field,
    mut attempt: impl FnMut(Option<&FieldEmbedding>) -> Result<T>,
) -> Result<(T, Field)> {
    let mut emb: Option<FieldEmbedding> = None;
    loop {
        let current = emb.as_ref().map_or(f, |e| e.target()).clone();
        match attempt(emb.as_ref()) {
            Ok(v) => return Ok((v, current)),
            Err(CmError::FieldTooSmall {
                reason,
                suggested_degree,
            }) => {
                if suggested_degree <= current.degree() || suggested_degree % f.degree() != 0 {
                    return Err(CmError::FieldTooSmall {
                        reason: format!("{reason}; escalation stopped at {current:?}"),
                        suggested_degree,
                    });
                }
                let big = Field::new(f.characteristic(), suggested_degree)?;
                emb = Some(FieldEmbedding::new(f, &big)?);
            }
            Err(e) => return Err(e),
        }
    }
}

fn base_change_space(v: &SubspaceBasis, e: &FieldEmbedding) -> SubspaceBasis {
    SubspaceBasis::span(
        e.target(),
        v.ambient_dim(),
        v.rows().iter().map(|r| e.map_vec(r)),
    )
}

fn base_change_algebra(
    b: &FiniteAlgebra<BlockMatrixAmbient>,
    e: &FieldEmbedding,
) -> Result<FiniteAlgebra<BlockMatrixAmbient>> {
    let amb = BlockMatrixAmbient::new(e.target().clone(), b.ambient().sizes().to_vec());
    FiniteAlgebra::new(amb, base_change_space(b.basis(), e))
}

/// [`normalize_submodule`] with automatic field escalation; the result is
/// over the returned field.
pub fn normalize_escalating(
    v: &SubspaceBasis,
    b: &FiniteAlgebra<BlockMatrixAmbient>,
    n: usize,
    m: usize,
    check_density: bool,
) -> Result<(Normalization, Field)> {
    with_escalation(b.field(), |emb| match emb {
        None => normalize_submodule(v, b, n, m, check_density),
        Some(e) => normalize_submodule(
            &base_change_space(v, e),
            &base_change_algebra(b, e)?,
            n,
            m,
            check_density,
        ),
    })
}

/// [`extract_free_basis`] with automatic field escalation.
pub fn extract_free_basis_escalating(
    v: &SubspaceBasis,
    b: &FiniteAlgebra<BlockMatrixAmbient>,
    a: &SemisimpleAlgebraModel,
    n: usize,
    seed: u64,
) -> Result<(Vec<Vec<Elem>>, Field)> {
    with_escalation(a.field(), |emb| match emb {
        None => extract_free_basis(v, b, a, n, seed),
        Some(e) => {
            let sizes: Vec<(usize, usize)> =
                a.factors().iter().map(|fc| (fc.n, fc.degree)).collect();
            let a2 = SemisimpleAlgebraModel::new(e.target().clone(), &sizes)?;
            extract_free_basis(
                &base_change_space(v, e),
                &base_change_algebra(b, e)?,
                &a2,
                n,
                seed,
            )
        }
    })
}

/// Coefficients `c` with `sum c_i rows_i = target`, if any.
pub(crate) fn solve_in_span(f: &Field, rows: &[Vec<Elem>], target: &[Elem]) -> Option<Vec<Elem>> {
    let k = rows.len();
    let mut all = rows.to_vec();
    all.push(target.to_vec());
    let ker = left_kernel(f, &all, target.len());
    let rel = ker.rows().iter().find(|r| r[k] != 0)?;
    let s = f.neg(f.inv(rel[k]));
    Some(rel[..k].iter().map(|&c| f.mul(c, s)).collect())
}

pub(crate) fn combine(f: &Field, rows: &[Vec<Elem>], coeffs: &[Elem], len: usize) -> Vec<Elem> {
    let mut out = vec![0; len];
    for (c, r) in coeffs.iter().zip(rows) {
        if *c != 0 {
            for (x, &y) in out.iter_mut().zip(r) {
                *x = f.mul_add(*x, *c, y);
            }
        }
    }
    out
}

fn lin(f: &Field, g: Elem, x: &Matrix, y: &Matrix) -> Matrix {
    x.scale(f, g).add(f, y)
}

/// An element of the span of `gens` whose columns `cols` have rank
/// `target`, found by repeatedly replacing `X` with `gX + Y`.
fn max_rank(f: &Field, gens: &[Matrix], cols: (usize, usize), target: usize) -> Result<Matrix> {
    let rank = |m: &Matrix| m.columns(cols.0, cols.1).rank(f);
    let mut x = gens
        .iter()
        .max_by_key(|g| rank(g))
        .cloned()
        .ok_or_else(|| CmError::pre("V is zero"))?;
    let mut d = rank(&x);
    'grow: while d < target {
        for y in gens {
            for g in f.elements() {
                let cand = lin(f, g, &x, y);
                let r = rank(&cand);
                if r > d {
                    x = cand;
                    d = r;
                    continue 'grow;
                }
            }
        }
        return Err(too_small(
            f,
            format!("no gamma in the field raises the rank beyond {d} (target {target})"),
        ));
    }
    Ok(x)
}

fn block_matrix(rows: usize, cols: usize, parts: &[(usize, usize, &Matrix)]) -> Matrix {
    let mut out = Matrix::zeros(rows, cols);
    for (r0, c0, m) in parts {
        for i in 0..m.rows {
            for j in 0..m.cols {
                out.set(r0 + i, c0 + j, m.get(i, j));
            }
        }
    }
    out
}

/// Result of the normalization: `sigma(X) = X * sigma` on `M_{n x m}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Normalization {
    pub n: usize,
    pub m: usize,
    pub q: usize,
    pub r: usize,
    #[serde(serialize_with = "ser_matrix")]
    pub sigma: Matrix,
    /// A matrix `(Y_1 ... Y_q Y')` of `sigma(V)`; `Y'` has rank `r`.
    #[serde(serialize_with = "ser_matrix")]
    pub certificate: Matrix,
}

fn ser_matrix<S: serde::Serializer>(m: &Matrix, s: S) -> std::result::Result<S::Ok, S::Error> {
    m.to_rows().serialize(s)
}

impl Normalization {
    /// `E_j`: identity in column block `j` (0-based), zero elsewhere.
    pub fn e(&self, j: usize) -> Matrix {
        let mut out = Matrix::zeros(self.n, self.m);
        for i in 0..self.n {
            out.set(i, j * self.n + i, 1);
        }
        out
    }

    pub fn image(&self, f: &Field, v: &SubspaceBasis) -> SubspaceBasis {
        right_image(f, v, self.n, self.m, &self.sigma)
    }

    /// Direct re-check of every output property against `v`.
    pub fn verify(&self, f: &Field, v: &SubspaceBasis) -> bool {
        if !self.sigma.is_invertible(f) {
            return false;
        }
        let img = self.image(f, v);
        let tail = self.certificate.columns(self.q * self.n, self.m);
        img.dim() == v.dim()
            && (0..self.q).all(|j| img.contains(f, &self.e(j).data))
            && img.contains(f, &self.certificate.data)
            && tail.rank(f) == self.r
    }
}

/// `{X * s : X in v}` for `v` a subspace of `M_{n x m}` (row-major).
pub fn right_image(f: &Field, v: &SubspaceBasis, n: usize, m: usize, s: &Matrix) -> SubspaceBasis {
    SubspaceBasis::span(
        f,
        n * m,
        v.rows()
            .iter()
            .map(|x| Matrix::from_flat(n, m, x.clone()).mul(f, s).data),
    )
}

/// Whether `M_n(k) * v = M_{n x m}(k)`, i.e. the row spaces of the
/// elements of `v` span `k^m`.
pub fn row_space_spans(f: &Field, v: &SubspaceBasis, n: usize, m: usize) -> bool {
    let rows = v
        .rows()
        .iter()
        .flat_map(|x| x.chunks(m).map(|r| r.to_vec()).collect::<Vec<_>>());
    SubspaceBasis::span(f, m, rows).is_full() && v.ambient_dim() == n * m
}

/// Returns `sigma` and the certificate matrix, both relative to `gens`.
fn normalize_rec(f: &Field, gens: &[Matrix], n: usize, m: usize) -> Result<(Matrix, Matrix)> {
    if m <= n {
        let x = max_rank(f, gens, (0, m), m)?;
        if m == n {
            let inv = x.inverse(f).expect("full rank");
            let cert = x.mul(f, &inv);
            return Ok((inv, cert));
        }
        return Ok((Matrix::identity(m), x));
    }
    let x = max_rank(f, gens, (0, n), n)?;
    let x1inv = x.columns(0, n).inverse(f).expect("full rank");
    let xr = x.columns(n, m);
    let corner = x1inv.mul(f, &xr).scale(f, f.neg(1));
    let s1 = block_matrix(
        m,
        m,
        &[
            (0, 0, &x1inv),
            (0, n, &corner),
            (n, n, &Matrix::identity(m - n)),
        ],
    );
    let gens1: Vec<Matrix> = gens.iter().map(|g| g.mul(f, &s1)).collect();
    let tails: Vec<Matrix> = gens1.iter().map(|g| g.columns(n, m)).collect();
    let (s_tail, cert_tail) = normalize_rec(f, &tails, n, m - n)?;
    let s2 = block_matrix(m, m, &[(0, 0, &Matrix::identity(n)), (n, n, &s_tail)]);
    let gens2: Vec<Matrix> = gens1.iter().map(|g| g.mul(f, &s2)).collect();
    let flat_tails: Vec<Vec<Elem>> = gens2.iter().map(|g| g.columns(n, m).data).collect();
    let lift = |target: &Matrix| -> Matrix {
        let c = solve_in_span(f, &flat_tails, &target.data).expect("tail lies in the projection");
        let flat: Vec<Vec<Elem>> = gens2.iter().map(|g| g.data.clone()).collect();
        Matrix::from_flat(n, m, combine(f, &flat, &c, n * m))
    };
    let q_tail = (m - n) / n;
    let mut s3 = Matrix::identity(m);
    for j in 0..q_tail {
        let mut e = Matrix::zeros(n, m - n);
        for i in 0..n {
            e.set(i, j * n + i, 1);
        }
        let xj = lift(&e).columns(0, n);
        for a in 0..n {
            for b in 0..n {
                s3.set(n + j * n + a, b, f.neg(xj.get(a, b)));
            }
        }
    }
    let cert = if (m - n) % n == 0 {
        let mut e1 = Matrix::zeros(n, m);
        for i in 0..n {
            e1.set(i, i, 1);
        }
        e1
    } else {
        lift(&cert_tail).mul(f, &s3)
    };
    Ok((s1.mul(f, &s2).mul(f, &s3), cert))
}

/// Finds `sigma in GL_m(k)` with `V * sigma ⊇ {E_1, ..., E_q}` and a matrix
/// `(Y_1 ... Y_q Y')` with `rank Y' = r`, where `m = nq + r`.
///
/// `b` is a subalgebra of `M_n(k)` acting on the left; `v` must be a
/// `b`-submodule with `M_n(k) v = M_{n x m}(k)`. When `check_density` is
/// set, density of `b` is verified by exhaustive spin first.
pub fn normalize_submodule(
    v: &SubspaceBasis,
    b: &FiniteAlgebra<BlockMatrixAmbient>,
    n: usize,
    m: usize,
    check_density: bool,
) -> Result<Normalization> {
    let f = b.field().clone();
    if n == 0 || m == 0 {
        return Err(CmError::input("n and m must be positive"));
    }
    if b.ambient().sizes() != [n] {
        return Err(CmError::pre("b must be a subalgebra of M_n(k)"));
    }
    if v.ambient_dim() != n * m {
        return Err(CmError::DimensionMismatch {
            expected: n * m,
            got: v.ambient_dim(),
        });
    }
    for a in b.basis().rows() {
        let am = Matrix::from_flat(n, n, a.clone());
        for x in v.rows() {
            let ax = am.mul(&f, &Matrix::from_flat(n, m, x.clone()));
            if !v.contains(&f, &ax.data) {
                return Err(CmError::pre("V is not a b-submodule"));
            }
        }
    }
    if !row_space_spans(&f, v, n, m) {
        return Err(CmError::pre("A V does not span M_{n x m}"));
    }
    if check_density {
        let a = SemisimpleAlgebraModel::matrix_algebra(f.clone(), n)?;
        if !is_dense(b, &a)? {
            return Err(CmError::pre("b is not dense in M_n"));
        }
    }
    let gens: Vec<Matrix> = v
        .rows()
        .iter()
        .map(|x| Matrix::from_flat(n, m, x.clone()))
        .collect();
    let (sigma, certificate) = normalize_rec(&f, &gens, n, m)?;
    Ok(Normalization {
        n,
        m,
        q: m / n,
        r: m % n,
        sigma,
        certificate,
    })
}

/// Projection of an element of `n` copies of the model onto factor `i`,
/// as an `s x (n s)` matrix.
fn project(amb: &BlockMatrixAmbient, x: &[Elem], n: usize, i: usize) -> Matrix {
    let d = amb.dim();
    let s = amb.sizes()[i];
    let blocks: Vec<Matrix> = (0..n)
        .map(|j| amb.block(&x[j * d..(j + 1) * d], i))
        .collect();
    let mut out = Matrix::zeros(s, n * s);
    for (j, blk) in blocks.iter().enumerate() {
        for r in 0..s {
            for c in 0..s {
                out.set(r, j * s + c, blk.get(r, c));
            }
        }
    }
    out
}

/// Whether the rows `es` form an `A`-basis of `nA`: on every factor the
/// stacked `(n s) x (n s)` matrix is invertible.
pub fn is_free_basis(a: &SemisimpleAlgebraModel, es: &[Vec<Elem>], n: usize) -> bool {
    let f = a.field();
    es.len() == n
        && (0..a.factors().len()).all(|i| {
            let rows: Vec<Vec<Elem>> = es
                .iter()
                .flat_map(|e| project(a.ambient(), e, n, i).to_rows())
                .collect();
            Matrix::from_rows(&rows).is_invertible(f)
        })
}

/// `n` elements of `v ⊆ nA` forming a free `A`-basis of `nA`.
pub fn extract_free_basis(
    v: &SubspaceBasis,
    b: &FiniteAlgebra<BlockMatrixAmbient>,
    a: &SemisimpleAlgebraModel,
    n: usize,
    seed: u64,
) -> Result<Vec<Vec<Elem>>> {
    let f = a.field().clone();
    let amb = a.ambient();
    let d = amb.dim();
    if !a.is_split() {
        return Err(CmError::pre(
            "basis extraction needs every factor split over the base field",
        ));
    }
    if v.ambient_dim() != n * d {
        return Err(CmError::DimensionMismatch {
            expected: n * d,
            got: v.ambient_dim(),
        });
    }
    for x in b.basis().rows() {
        for w in v.rows() {
            let img: Vec<Elem> = w.chunks(d).flat_map(|blk| amb.mul(x, blk)).collect();
            if !v.contains(&f, &img) {
                return Err(CmError::pre("v is not a b-submodule"));
            }
        }
    }
    if !is_dense(b, a)? {
        return Err(CmError::pre("b is not dense in a"));
    }
    let s_count = a.factors().len();
    let mut projections = Vec::with_capacity(s_count);
    for i in 0..s_count {
        let s = amb.sizes()[i];
        let gens: Vec<Matrix> = v.rows().iter().map(|x| project(amb, x, n, i)).collect();
        let span = SubspaceBasis::span(&f, s * n * s, gens.iter().map(|g| g.data.clone()));
        if !row_space_spans(&f, &span, s, n * s) {
            return Err(CmError::pre(format!("A v does not cover factor {i} of nA")));
        }
        projections.push(gens);
    }

    let standard: Vec<Vec<Elem>> = (0..n)
        .map(|j| {
            let mut e = vec![0; n * d];
            e[j * d..(j + 1) * d].copy_from_slice(&amb.one());
            e
        })
        .collect();
    if standard.iter().all(|e| v.contains(&f, e)) {
        return Ok(standard);
    }

    // Per factor: a basis of nA_i inside pr_i v, lifted back to v.
    let mut lifted: Vec<Vec<Vec<Elem>>> = Vec::with_capacity(s_count);
    for (i, gens) in projections.iter().enumerate() {
        let s = amb.sizes()[i];
        let (sigma, _) = normalize_rec(&f, gens, s, n * s)?;
        let sinv = sigma.inverse(&f).expect("sigma is invertible");
        let flat: Vec<Vec<Elem>> = gens.iter().map(|g| g.data.clone()).collect();
        let mut per = Vec::with_capacity(n);
        for j in 0..n {
            let mut e = Matrix::zeros(s, n * s);
            for r in 0..s {
                e.set(r, j * s + r, 1);
            }
            let target = e.mul(&f, &sinv);
            let c = solve_in_span(&f, &flat, &target.data).expect("E_j sigma^-1 lies in pr_i v");
            per.push(combine(&f, v.rows(), &c, n * d));
        }
        lifted.push(per);
    }

    let candidate = |lam: &[Elem]| -> Vec<Vec<Elem>> {
        (0..n)
            .map(|j| {
                let rows: Vec<Vec<Elem>> = lifted.iter().map(|per| per[j].clone()).collect();
                combine(&f, &rows, lam, n * d)
            })
            .collect()
    };
    let q = f.order() as u64;
    let ones = vec![1; s_count];
    let es = candidate(&ones);
    if is_free_basis(a, &es, n) {
        return Ok(es);
    }
    let total = (0..s_count)
        .try_fold(1u64, |acc, _| acc.checked_mul(q))
        .unwrap_or(u64::MAX);
    if total <= SWEEP_BUDGET {
        for idx in 0..total {
            let mut r = idx;
            let lam: Vec<Elem> = (0..s_count)
                .map(|_| {
                    let x = (r % q) as Elem;
                    r /= q;
                    x
                })
                .collect();
            let es = candidate(&lam);
            if is_free_basis(a, &es, n) {
                return Ok(es);
            }
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..SWEEP_BUDGET {
            let lam: Vec<Elem> = (0..s_count).map(|_| rng.gen_range(0..f.order())).collect();
            let es = candidate(&lam);
            if is_free_basis(a, &es, n) {
                return Ok(es);
            }
        }
    }
    Err(too_small(
        &f,
        format!("no lambda combination over {s_count} factors yields a basis"),
    ))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FreeRankCompletion {
    pub r: usize,
    pub complement: Vec<usize>,
}

/// Least `r` with `r n_i >= m_i` for all `i`, and the multiplicities
/// `r n_i - m_i` of the complement.
pub fn complete_to_free_rank(n_mult: &[usize], m_mult: &[usize]) -> Result<FreeRankCompletion> {
    if n_mult.len() != m_mult.len() {
        return Err(CmError::DimensionMismatch {
            expected: n_mult.len(),
            got: m_mult.len(),
        });
    }
    if n_mult.iter().any(|&x| x == 0) {
        return Err(CmError::input("multiplicities n_i must be positive"));
    }
    let r = n_mult
        .iter()
        .zip(m_mult)
        .map(|(&n, &m)| m.div_ceil(n))
        .max()
        .unwrap_or(0);
    Ok(FreeRankCompletion {
        r,
        complement: n_mult
            .iter()
            .zip(m_mult)
            .map(|(&n, &m)| r * n - m)
            .collect(),
    })
}
