//! Finite-dimensional algebras inside an ambient algebra: closures,
//! radicals, quotients, primitive idempotents and d-vectors.

mod idempotents;
mod quotient;

use std::fmt;

use serde::Serialize;

use crate::branches::{AmbientRing, MultiBranchElement};
use crate::error::{CmError, Result};
use crate::exactfield::{Elem, Field, SubspaceBasis};

pub use idempotents::{primitive_idempotents, primitive_idempotents_sc};
pub use quotient::{quotient_algebra, quotient_map, QuotientAlgebra, QuotientMap};

/// An associative unital algebra with a fixed coordinate basis.
pub trait AlgebraAmbient: Clone {
    fn field(&self) -> &Field;
    fn dim(&self) -> usize;
    fn mul(&self, a: &[Elem], b: &[Elem]) -> Vec<Elem>;
    fn one(&self) -> Vec<Elem>;
}

impl AlgebraAmbient for AmbientRing {
    fn field(&self) -> &Field {
        AmbientRing::field(self)
    }

    fn dim(&self) -> usize {
        self.total_dim()
    }

    fn mul(&self, a: &[Elem], b: &[Elem]) -> Vec<Elem> {
        self.mul_vec(a, b)
    }

    fn one(&self) -> Vec<Elem> {
        self.one_vec()
    }
}

/// A multiplicatively closed subspace of an ambient algebra.
#[derive(Clone, Debug)]
pub struct FiniteAlgebra<A: AlgebraAmbient = AmbientRing> {
    ambient: A,
    basis: SubspaceBasis,
    contains_one: bool,
}

impl<A: AlgebraAmbient> PartialEq for FiniteAlgebra<A> {
    fn eq(&self, other: &Self) -> bool {
        self.basis == other.basis
    }
}

impl<A: AlgebraAmbient> FiniteAlgebra<A> {
    /// Wraps `basis` after checking closure under multiplication.
    pub fn new(ambient: A, basis: SubspaceBasis) -> Result<Self> {
        let f = ambient.field().clone();
        if basis.ambient_dim() != ambient.dim() {
            return Err(CmError::AmbientMismatch);
        }
        for a in basis.rows() {
            for b in basis.rows() {
                if !basis.contains(&f, &ambient.mul(a, b)) {
                    return Err(CmError::pre("subspace is not closed under multiplication"));
                }
            }
        }
        let contains_one = basis.contains(&f, &ambient.one());
        Ok(FiniteAlgebra {
            ambient,
            basis,
            contains_one,
        })
    }

    pub fn full(ambient: A) -> Self {
        let basis = SubspaceBasis::full(ambient.dim());
        FiniteAlgebra {
            ambient,
            basis,
            contains_one: true,
        }
    }

    pub fn ambient(&self) -> &A {
        &self.ambient
    }

    pub fn field(&self) -> &Field {
        self.ambient.field()
    }

    pub fn basis(&self) -> &SubspaceBasis {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn contains_one(&self) -> bool {
        self.contains_one
    }

    pub fn contains(&self, x: &[Elem]) -> bool {
        self.basis.contains(self.field(), x)
    }

    pub fn contains_algebra(&self, other: &FiniteAlgebra<A>) -> bool {
        self.basis.contains_space(self.field(), &other.basis)
    }

    /// Structure constants of this algebra in its own basis.
    pub fn structure(&self) -> QuotientAlgebra {
        quotient_algebra(self, &SubspaceBasis::zero(self.ambient.dim()))
            .expect("zero ideal is always admissible")
    }
}

/// Smallest unital subalgebra of `amb` containing `gens`, without any
/// locality requirement.
pub fn closure_in<A: AlgebraAmbient>(amb: &A, gens: &[Vec<Elem>]) -> FiniteAlgebra<A> {
    let f = amb.field().clone();
    let n = amb.dim();
    let mut space = SubspaceBasis::zero(n);
    let mut queue: Vec<Vec<Elem>> = Vec::new();
    let push = |space: &mut SubspaceBasis, queue: &mut Vec<Vec<Elem>>, v: Vec<Elem>| {
        if !space.contains(&f, &v) {
            *space = space
                .sum(&f, &SubspaceBasis::span(&f, n, [v.clone()]))
                .unwrap();
            queue.push(v);
        }
    };
    push(&mut space, &mut queue, amb.one());
    for g in gens {
        push(&mut space, &mut queue, g.clone());
    }
    while let Some(w) = queue.pop() {
        if space.is_full() {
            break;
        }
        for g in gens {
            let prod = amb.mul(&w, g);
            push(&mut space, &mut queue, prod);
        }
    }
    FiniteAlgebra {
        ambient: amb.clone(),
        basis: space,
        contains_one: true,
    }
}

/// The subalgebra generated by local generators (zero constant terms).
pub fn subalgebra_closure(
    gens: &[MultiBranchElement],
    ambient: &AmbientRing,
) -> Result<FiniteAlgebra> {
    let mut raw = Vec::with_capacity(gens.len());
    for (i, g) in gens.iter().enumerate() {
        if g.ambient() != ambient {
            return Err(CmError::AmbientMismatch);
        }
        if (0..ambient.branches()).any(|br| g.branch(br)[0] != 0) {
            return Err(CmError::input(format!(
                "generator {i} has a nonzero constant term; generators must vanish at every branch origin"
            )));
        }
        raw.push(g.coeffs().to_vec());
    }
    Ok(closure_in(ambient, &raw))
}

/// Smallest subspace of `n` copies of the ambient containing `gens` and
/// stable under the algebra acting blockwise from the left.
pub fn module_closure<A: AlgebraAmbient>(
    alg: &FiniteAlgebra<A>,
    gens: &[Vec<Elem>],
    n: usize,
) -> Result<SubspaceBasis> {
    let amb = alg.ambient();
    let f = amb.field().clone();
    let d = amb.dim();
    let total = n * d;
    if let Some(g) = gens.iter().find(|g| g.len() != total) {
        return Err(CmError::DimensionMismatch {
            expected: total,
            got: g.len(),
        });
    }
    let act = |a: &[Elem], v: &[Elem]| -> Vec<Elem> {
        v.chunks(d).flat_map(|blk| amb.mul(a, blk)).collect()
    };
    let mut space = SubspaceBasis::zero(total);
    let mut queue: Vec<Vec<Elem>> = Vec::new();
    for g in gens {
        if !space.contains(&f, g) {
            space = space.sum(&f, &SubspaceBasis::span(&f, total, [g.clone()]))?;
            queue.push(g.clone());
        }
    }
    while let Some(w) = queue.pop() {
        for a in alg.basis().rows() {
            let img = act(a, &w);
            if !space.contains(&f, &img) {
                space = space.sum(&f, &SubspaceBasis::span(&f, total, [img.clone()]))?;
                queue.push(img);
            }
        }
    }
    Ok(space)
}

/// Checks `alg * space ⊆ space` for a subspace of `n` copies of the ambient.
pub fn is_module<A: AlgebraAmbient>(alg: &FiniteAlgebra<A>, space: &SubspaceBasis) -> bool {
    let amb = alg.ambient();
    let d = amb.dim();
    let f = amb.field();
    alg.basis().rows().iter().all(|a| {
        space.rows().iter().all(|v| {
            let img: Vec<Elem> = v.chunks(d).flat_map(|blk| amb.mul(a, blk)).collect();
            space.contains(f, &img)
        })
    })
}

/// Jacobson radical of a subalgebra of the branch ring: its intersection
/// with the ambient radical.
pub fn radical(alg: &FiniteAlgebra) -> SubspaceBasis {
    let amb = alg.ambient();
    alg.basis()
        .intersect(amb.field(), &amb.radical())
        .expect("same ambient")
}

/// Radical of a commutative subalgebra of an arbitrary ambient.
pub fn radical_commutative<A: AlgebraAmbient>(alg: &FiniteAlgebra<A>) -> Result<SubspaceBasis> {
    let qm = quotient_map(alg, &SubspaceBasis::zero(alg.ambient().dim()))?;
    let rad = qm.algebra.radical()?;
    Ok(SubspaceBasis::span(
        alg.field(),
        alg.ambient().dim(),
        rad.rows().iter().map(|r| qm.lift(r)),
    ))
}

/// Sorted multiset of local-factor dimensions.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct DVector {
    parts: Vec<usize>,
    total: usize,
}

impl DVector {
    pub fn new(mut parts: Vec<usize>) -> Self {
        parts.sort_unstable_by(|a, b| b.cmp(a));
        let total = parts.iter().sum();
        DVector { parts, total }
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    pub fn total(&self) -> usize {
        self.total
    }

    /// Order-insensitive comparison with a literal list of parts.
    pub fn is(&self, parts: &[usize]) -> bool {
        *self == DVector::new(parts.to_vec())
    }
}

impl fmt::Display for DVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.parts.iter().map(|p| p.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

impl fmt::Debug for DVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// `m*Gamma` for the maximal ideal `m` of a local `lambda ⊆ gamma`.
pub fn m_gamma(gamma: &FiniteAlgebra, lambda: &FiniteAlgebra) -> Result<SubspaceBasis> {
    if !gamma.contains_algebra(lambda) {
        return Err(CmError::pre("lambda is not contained in gamma"));
    }
    let amb = gamma.ambient();
    let m = radical(lambda);
    if m.dim() + 1 != lambda.dim() {
        return Err(CmError::pre("lambda is not local"));
    }
    let prods: Vec<Vec<Elem>> = m
        .rows()
        .iter()
        .flat_map(|x| gamma.basis().rows().iter().map(move |g| amb.mul_vec(x, g)))
        .collect();
    module_closure(gamma, &prods, 1)
}

/// Local-factor dimensions of `Gamma / m Gamma`.
pub fn d_vector(gamma: &FiniteAlgebra, lambda: &FiniteAlgebra) -> Result<DVector> {
    let mg = m_gamma(gamma, lambda)?;
    let q = quotient_algebra(gamma, &mg)?;
    let idems = primitive_idempotents_sc(&q)?;
    Ok(DVector::new(idems.iter().map(|e| q.ideal_dim(e)).collect()))
}
