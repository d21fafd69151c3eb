//! Parametrized curve singularities: certified truncated models, overrings,
//! valuation types and the tameness criterion.

mod builders;
mod classify;
mod spec;

use serde::Serialize;

use crate::algcore::{d_vector, is_module, m_gamma, subalgebra_closure, DVector, FiniteAlgebra};
use crate::branches::AmbientRing;
use crate::error::{CmError, Result};
use crate::exactfield::{Elem, SubspaceBasis};

pub use builders::{build_standard, StandardKind};
pub use classify::{
    admissible, classify_type, normalize_pair, normalized_valuation_type, permutations,
    valuation_type, Parity, TypeClass, ValuationType,
};
pub use spec::{SingularitySpec, Term};

/// Truncation slack kept above the conductor.
pub const MARGIN: usize = 3;

/// `Lambda` together with a conductor certificate `t^c Lambda_0 ⊆ Lambda`.
#[derive(Clone, Debug)]
pub struct CertifiedAlgebra {
    pub spec: SingularitySpec,
    pub ambient: AmbientRing,
    pub lambda: FiniteAlgebra,
    pub conductor_exponent: usize,
    pub margin: usize,
}

pub fn build_singularity(spec: &SingularitySpec) -> Result<CertifiedAlgebra> {
    spec.validate()?;
    let ambient = spec.ambient()?;
    let gens = spec.elements(&ambient)?;
    let lambda = subalgebra_closure(&gens, &ambient)?;
    let n = ambient.truncation();
    let f = ambient.field().clone();
    let fits = |c: usize| -> bool {
        let ideal = ambient.monomial_ideal(c).expect("c <= N");
        lambda.basis().contains_space(&f, &ideal)
    };
    if n < MARGIN || !fits(n - MARGIN) {
        return Err(CmError::TruncationInsufficient(format!(
            "no conductor exponent c <= N - {MARGIN} = {} found at truncation N = {n}; raise the truncation",
            n as i64 - MARGIN as i64
        )));
    }
    let mut c = n - MARGIN;
    while c > 0 && fits(c - 1) {
        c -= 1;
    }
    Ok(CertifiedAlgebra {
        spec: spec.clone(),
        ambient,
        lambda,
        conductor_exponent: c,
        margin: n - c,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OverringKind {
    Lambda0,
    Prime,
    DoublePrime,
    PrimeE,
}

fn algebra_from_rows(base: &CertifiedAlgebra, rows: Vec<Vec<Elem>>) -> Result<FiniteAlgebra> {
    let amb = &base.ambient;
    let f = amb.field();
    let span = SubspaceBasis::span(f, amb.total_dim(), rows);
    let basis = span.sum(f, base.lambda.basis())?;
    FiniteAlgebra::new(amb.clone(), basis)
}

/// `Lambda_0`, `Lambda' = t Lambda_0 + Lambda`, `Lambda'' = t m Lambda_0 +
/// Lambda`, or `Lambda'_e = Lambda' + k e`.
///
/// For `PrimeE` the idempotent is taken from `Lambda_0`: `Lambda'` itself is
/// local, so its only idempotents are 0 and 1.
pub fn derive_overring(
    base: &CertifiedAlgebra,
    kind: OverringKind,
    e: Option<&[Elem]>,
) -> Result<FiniteAlgebra> {
    let amb = &base.ambient;
    match kind {
        OverringKind::Lambda0 => Ok(FiniteAlgebra::full(amb.clone())),
        OverringKind::Prime => algebra_from_rows(base, amb.radical().rows().to_vec()),
        OverringKind::DoublePrime => {
            let gamma = FiniteAlgebra::full(amb.clone());
            let mg = m_gamma(&gamma, &base.lambda)?;
            let t = amb.t_vec();
            let rows = mg.rows().iter().map(|x| amb.mul_vec(&t, x)).collect();
            algebra_from_rows(base, rows)
        }
        OverringKind::PrimeE => {
            let e = e.ok_or_else(|| CmError::input("prime_e overring needs an idempotent"))?;
            if e.len() != amb.total_dim() {
                return Err(CmError::DimensionMismatch {
                    expected: amb.total_dim(),
                    got: e.len(),
                });
            }
            if amb.mul_vec(e, e) != e {
                return Err(CmError::pre("e is not an idempotent"));
            }
            let mut rows = amb.radical().rows().to_vec();
            rows.push(e.to_vec());
            algebra_from_rows(base, rows)
        }
    }
}

/// Idempotents of `Lambda_0`: sums of branch indicators, indexed by the
/// subset of branches (bitmask, including the empty set).
pub fn branch_idempotents(amb: &AmbientRing) -> Vec<(Vec<usize>, Vec<Elem>)> {
    let s = amb.branches();
    (0u32..1 << s)
        .map(|mask| {
            let subset: Vec<usize> = (0..s).filter(|i| mask >> i & 1 == 1).collect();
            let mut e = amb.zero_vec();
            for &i in &subset {
                e[amb.index(i, 0)] = 1;
            }
            (subset, e)
        })
        .collect()
}

pub const INFINITE_TYPE_CAVEAT: &str = "criterion applies to infinite CM type";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    CriterionSatisfied,
    CriterionViolated,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PrimeEEntry {
    /// Branches (1-based) whose indicators sum to `e`.
    pub idempotent: Vec<usize>,
    pub d: DVector,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TamenessReport {
    pub d_lambda0: DVector,
    pub d_lambda_prime: DVector,
    pub d_lambda_double_prime: DVector,
    pub d_lambda_prime_e: Vec<PrimeEEntry>,
    pub cond_a: bool,
    pub cond_b: bool,
    pub cond_c: bool,
    pub verdict: Verdict,
    pub caveat: &'static str,
}

pub fn tameness_report(base: &CertifiedAlgebra) -> Result<TamenessReport> {
    let lam = &base.lambda;
    let l0 = derive_overring(base, OverringKind::Lambda0, None)?;
    let lp = derive_overring(base, OverringKind::Prime, None)?;
    let lpp = derive_overring(base, OverringKind::DoublePrime, None)?;
    let d0 = d_vector(&l0, lam)?;
    let dp = d_vector(&lp, lam)?;
    let dpp = d_vector(&lpp, lam)?;
    let mut d_e = Vec::new();
    for (subset, e) in branch_idempotents(&base.ambient) {
        let le = derive_overring(base, OverringKind::PrimeE, Some(&e))?;
        d_e.push(PrimeEEntry {
            idempotent: subset.iter().map(|i| i + 1).collect(),
            d: d_vector(&le, lam)?,
        });
    }
    let cond_a = d0.total() <= 4 && !d0.is(&[4]) && !d0.is(&[3, 1]) && !d0.is(&[3]);
    let cond_b = dp.total() <= 3 && d_e.iter().all(|x| !x.d.is(&[3, 1]));
    let cond_c = d0.total() != 3 || dpp.total() <= 2;
    let verdict = if cond_a && cond_b && cond_c {
        Verdict::CriterionSatisfied
    } else {
        Verdict::CriterionViolated
    };
    Ok(TamenessReport {
        d_lambda0: d0,
        d_lambda_prime: dp,
        d_lambda_double_prime: dpp,
        d_lambda_prime_e: d_e,
        cond_a,
        cond_b,
        cond_c,
        verdict,
        caveat: INFINITE_TYPE_CAVEAT,
    })
}

/// Sum over branches of the generic rank of the branch projection of `m`
/// (a `Lambda`-submodule of `n` copies of the ambient).
///
/// On each branch the projection generates a `k[t]/t^N`-module `K`; its
/// rank is read off as the dimension of the socle `{v in K : t v = 0}`.
/// The same count must be seen on `t^c K`, otherwise the truncation is too
/// coarse to separate rank from torsion.
pub fn rational_length(m: &SubspaceBasis, n: usize, base: &CertifiedAlgebra) -> Result<usize> {
    let amb = &base.ambient;
    let f = amb.field();
    let big_n = amb.truncation();
    let d = amb.total_dim();
    if m.ambient_dim() != n * d {
        return Err(CmError::DimensionMismatch {
            expected: n * d,
            got: m.ambient_dim(),
        });
    }
    if !is_module(&base.lambda, m) {
        return Err(CmError::pre("m is not a Lambda-submodule"));
    }
    let c = base.conductor_exponent;
    let mut total = 0;
    for br in 0..amb.branches() {
        // Branch projection in (k[t]/t^N)^n, coordinates j*N + exp.
        let proj: Vec<Vec<Elem>> = m
            .rows()
            .iter()
            .map(|v| {
                (0..n)
                    .flat_map(|j| {
                        let start = j * d + br * big_n;
                        v[start..start + big_n].to_vec()
                    })
                    .collect()
            })
            .collect();
        let k = t_closure(f, &proj, n, big_n);
        let socle = socle_dim(f, &k, n, big_n);
        let shifted: Vec<Vec<Elem>> = k.rows().iter().map(|v| shift(v, n, big_n, c)).collect();
        let kc = SubspaceBasis::span(f, n * big_n, shifted);
        if socle_dim(f, &kc, n, big_n) != socle {
            return Err(CmError::TruncationInsufficient(format!(
                "branch {} rank is not stable on the window [{c}, {big_n})",
                br + 1
            )));
        }
        total += socle;
    }
    Ok(total)
}

fn shift(v: &[Elem], n: usize, big_n: usize, by: usize) -> Vec<Elem> {
    let mut out = vec![0; n * big_n];
    for j in 0..n {
        for e in 0..big_n.saturating_sub(by) {
            out[j * big_n + e + by] = v[j * big_n + e];
        }
    }
    out
}

fn t_closure(
    f: &crate::exactfield::Field,
    rows: &[Vec<Elem>],
    n: usize,
    big_n: usize,
) -> SubspaceBasis {
    let mut all = Vec::new();
    for v in rows {
        for s in 0..big_n {
            all.push(shift(v, n, big_n, s));
        }
    }
    SubspaceBasis::span(f, n * big_n, all)
}

fn socle_dim(f: &crate::exactfield::Field, k: &SubspaceBasis, n: usize, big_n: usize) -> usize {
    let top = SubspaceBasis::span(
        f,
        n * big_n,
        (0..n).map(|j| crate::exactfield::unit(n * big_n, j * big_n + big_n - 1)),
    );
    k.intersect(f, &top).expect("same dimension").dim()
}
