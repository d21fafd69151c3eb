use serde::Serialize;

use super::normalize::{combine, extract_free_basis, solve_in_span};
use super::{is_dense, BlockMatrixAmbient, SemisimpleAlgebraModel};
use crate::algcore::{
    closure_in, is_module, module_closure, primitive_idempotents, radical, FiniteAlgebra,
};
use crate::branches::AmbientRing;
use crate::error::{CmError, Result};
use crate::exactfield::{left_kernel, Elem, SubspaceBasis};
use crate::singlab::CertifiedAlgebra;

/// `Gamma / rad Gamma = k^s'` read off at one branch origin per primitive
/// idempotent.
struct ResidueMap {
    origins: Vec<usize>,
    model: SemisimpleAlgebraModel,
}

impl ResidueMap {
    fn new(gamma: &FiniteAlgebra) -> Result<Self> {
        let amb = gamma.ambient();
        let idems = primitive_idempotents(gamma)?;
        let origins = idems
            .iter()
            .map(|e| {
                let br = (0..amb.branches())
                    .find(|&b| e[amb.index(b, 0)] != 0)
                    .expect("nonzero idempotent");
                amb.index(br, 0)
            })
            .collect::<Vec<_>>();
        let model = SemisimpleAlgebraModel::new(amb.field().clone(), &vec![(1, 1); origins.len()])?;
        Ok(ResidueMap { origins, model })
    }

    fn image(&self, x: &[Elem]) -> Vec<Elem> {
        self.origins.iter().map(|&i| x[i]).collect()
    }

    fn image_n(&self, x: &[Elem], d: usize) -> Vec<Elem> {
        x.chunks(d).flat_map(|blk| self.image(blk)).collect()
    }

    fn sub_image(&self, alg: &FiniteAlgebra) -> FiniteAlgebra<BlockMatrixAmbient> {
        let gens: Vec<Vec<Elem>> = alg.basis().rows().iter().map(|x| self.image(x)).collect();
        closure_in(self.model.ambient(), &gens)
    }
}

/// Density of `lambda` in `gamma`, decided on `Gamma / rad Gamma`.
pub fn is_dense_pair(lambda: &FiniteAlgebra, gamma: &FiniteAlgebra) -> Result<bool> {
    if !gamma.contains_algebra(lambda) {
        return Err(CmError::pre("lambda is not contained in gamma"));
    }
    let rm = ResidueMap::new(gamma)?;
    is_dense(&rm.sub_image(lambda), &rm.model)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Sandwich {
    /// `M' = {x in n Gamma : x P in m}`.
    pub module: SubspaceBasis,
    /// Rows `p_j` of the matrix `P`, each in `n` copies of the ambient.
    pub automorphism: Vec<Vec<Elem>>,
    pub identity: bool,
    /// Extra dimension of `M'` over `m`: top-degree coordinates that the
    /// truncation cannot resolve after rescaling.
    pub truncation_loss: usize,
}

fn slot(v: &[Elem], j: usize, d: usize) -> &[Elem] {
    &v[j * d..(j + 1) * d]
}

/// `x P = sum_j x_j p_j` for `x` in `n` copies of the ambient.
fn apply(amb: &AmbientRing, x: &[Elem], p: &[Vec<Elem>]) -> Vec<Elem> {
    let f = amb.field();
    let d = amb.total_dim();
    let n = p.len();
    let mut out = vec![0; n * d];
    for (j, pj) in p.iter().enumerate() {
        let img = amb.act_on_module(slot(x, j, d), pj);
        for (o, v) in out.iter_mut().zip(img) {
            *o = f.add(*o, v);
        }
    }
    out
}

/// `{x in n Gamma : x P in m}`.
fn preimage(
    amb: &AmbientRing,
    gamma: &FiniteAlgebra,
    p: &[Vec<Elem>],
    m: &SubspaceBasis,
) -> SubspaceBasis {
    let f = amb.field();
    let d = amb.total_dim();
    let n = p.len();
    let mut basis = Vec::new();
    for j in 0..n {
        for g in gamma.basis().rows() {
            let mut v = vec![0; n * d];
            v[j * d..(j + 1) * d].copy_from_slice(g);
            basis.push(v);
        }
    }
    let free = m.free_columns();
    let rows: Vec<Vec<Elem>> = basis
        .iter()
        .map(|x| {
            let r = m.reduce(f, &apply(amb, x, p));
            free.iter().map(|&c| r[c]).collect()
        })
        .collect();
    let ker = left_kernel(f, &rows, free.len());
    SubspaceBasis::span(
        f,
        n * d,
        ker.rows().iter().map(|c| combine(f, &basis, c, n * d)),
    )
}

fn standard_basis(amb: &AmbientRing, n: usize) -> Vec<Vec<Elem>> {
    let d = amb.total_dim();
    (0..n)
        .map(|j| {
            let mut e = vec![0; n * d];
            e[j * d..(j + 1) * d].copy_from_slice(&amb.one_vec());
            e
        })
        .collect()
}

/// An isomorphic copy `M'` of `m` with `n Lambda ⊆ M' ⊆ n Gamma`.
pub fn sandwich_form(
    m: &SubspaceBasis,
    base: &CertifiedAlgebra,
    gamma: &FiniteAlgebra,
    n: usize,
    seed: u64,
) -> Result<Sandwich> {
    let amb = &base.ambient;
    let f = amb.field();
    let d = amb.total_dim();
    let lambda = &base.lambda;
    if m.ambient_dim() != n * d {
        return Err(CmError::DimensionMismatch {
            expected: n * d,
            got: m.ambient_dim(),
        });
    }
    if gamma.ambient() != amb || !gamma.contains_algebra(lambda) {
        return Err(CmError::pre("gamma is not an overring of lambda"));
    }
    if !is_module(lambda, m) {
        return Err(CmError::pre("m is not a Lambda-submodule"));
    }
    let std = standard_basis(amb, n);
    let n_gamma = module_closure(gamma, &std, n)?;
    if n_gamma.contains_space(f, m) && std.iter().all(|e| m.contains(f, e)) {
        return Ok(Sandwich {
            module: m.clone(),
            automorphism: std,
            identity: true,
            truncation_loss: 0,
        });
    }

    // Gamma-basis f_1..f_n of Gamma m, one residue direction per idempotent.
    let g = module_closure(gamma, m.rows(), n)?;
    let rad = radical(gamma);
    let rad_g = SubspaceBasis::span(
        f,
        n * d,
        rad.rows()
            .iter()
            .flat_map(|r| g.rows().iter().map(move |x| amb.act_on_module(r, x))),
    );
    let mut fs = vec![vec![0; n * d]; n];
    for e in primitive_idempotents(gamma)? {
        let eg: Vec<Vec<Elem>> = g.rows().iter().map(|x| amb.act_on_module(&e, x)).collect();
        let mut acc = rad_g.clone();
        let mut picked = Vec::new();
        for x in eg {
            if !acc.contains(f, &x) {
                acc = acc.sum(f, &SubspaceBasis::span(f, n * d, [x.clone()]))?;
                picked.push(x);
            }
        }
        if picked.len() != n {
            return Err(CmError::pre(format!(
                "Gamma m is not free of rank {n} (local rank {})",
                picked.len()
            )));
        }
        for (fj, x) in fs.iter_mut().zip(picked) {
            for (a, b) in fj.iter_mut().zip(x) {
                *a = f.add(*a, b);
            }
        }
    }
    if module_closure(gamma, &fs, n)? != g {
        return Err(CmError::pre("Gamma m is not generated by n elements"));
    }
    let m1 = preimage(amb, gamma, &fs, m);

    // Basis of n Gamma inside m1, through the residue algebra.
    let rm = ResidueMap::new(gamma)?;
    let b = rm.sub_image(lambda);
    let images: Vec<Vec<Elem>> = m1.rows().iter().map(|x| rm.image_n(x, d)).collect();
    let s = rm.origins.len();
    let v_bar = SubspaceBasis::span(f, n * s, images.clone());
    let bar_basis = extract_free_basis(&v_bar, &b, &rm.model, n, seed)?;
    let es: Vec<Vec<Elem>> = bar_basis
        .iter()
        .map(|t| {
            let c = solve_in_span(f, &images, t).expect("basis lies in the residue image");
            combine(f, m1.rows(), &c, n * d)
        })
        .collect();

    let p: Vec<Vec<Elem>> = es.iter().map(|e| apply(amb, e, &fs)).collect();
    let module = preimage(amb, gamma, &p, m);
    debug_assert!(is_module(lambda, &module));
    if !std.iter().all(|e| module.contains(f, e)) {
        return Err(CmError::pre("rescaled module does not contain n Lambda"));
    }
    let truncation_loss = module.dim().saturating_sub(m.dim());
    Ok(Sandwich {
        module,
        automorphism: p,
        identity: false,
        truncation_loss,
    })
}
