use serde::Serialize;

use super::{AlgebraAmbient, FiniteAlgebra};
use crate::error::{CmError, Result};
use crate::exactfield::{left_kernel, unit, Elem, Field, SubspaceBasis};

/// Associative unital algebra given by structure constants
/// `b_i b_j = sum_k c_{ijk} b_k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QuotientAlgebra {
    #[serde(skip)]
    field: Field,
    dim: usize,
    structure_constants: Vec<Elem>,
    one: Vec<Elem>,
}

impl AlgebraAmbient for QuotientAlgebra {
    fn field(&self) -> &Field {
        &self.field
    }

    fn dim(&self) -> usize {
        self.dim
    }

    fn mul(&self, a: &[Elem], b: &[Elem]) -> Vec<Elem> {
        let d = self.dim;
        let f = &self.field;
        let mut out = vec![0; d];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                if y == 0 {
                    continue;
                }
                let xy = f.mul(x, y);
                let base = (i * d + j) * d;
                for (k, o) in out.iter_mut().enumerate() {
                    let c = self.structure_constants[base + k];
                    if c != 0 {
                        *o = f.mul_add(*o, xy, c);
                    }
                }
            }
        }
        out
    }

    fn one(&self) -> Vec<Elem> {
        self.one.clone()
    }
}

impl QuotientAlgebra {
    /// Validates associativity on all basis triples and the identity.
    pub fn new(
        field: Field,
        dim: usize,
        structure_constants: Vec<Elem>,
        one: Vec<Elem>,
    ) -> Result<Self> {
        if structure_constants.len() != dim * dim * dim {
            return Err(CmError::DimensionMismatch {
                expected: dim * dim * dim,
                got: structure_constants.len(),
            });
        }
        if one.len() != dim {
            return Err(CmError::DimensionMismatch {
                expected: dim,
                got: one.len(),
            });
        }
        let alg = QuotientAlgebra {
            field,
            dim,
            structure_constants,
            one,
        };
        alg.validate()?;
        Ok(alg)
    }

    /// Structure constants of any ambient algebra in its standard basis.
    pub fn from_ambient<A: AlgebraAmbient>(amb: &A) -> Self {
        let d = amb.dim();
        let mut sc = Vec::with_capacity(d * d * d);
        for i in 0..d {
            for j in 0..d {
                sc.extend(amb.mul(&unit(d, i), &unit(d, j)));
            }
        }
        QuotientAlgebra {
            field: amb.field().clone(),
            dim: d,
            structure_constants: sc,
            one: amb.one(),
        }
    }

    fn validate(&self) -> Result<()> {
        let d = self.dim;
        let basis: Vec<Vec<Elem>> = (0..d).map(|i| unit(d, i)).collect();
        for a in &basis {
            if self.mul(&self.one, a) != *a || self.mul(a, &self.one) != *a {
                return Err(CmError::pre("identity vector is not a two-sided unit"));
            }
        }
        for a in &basis {
            for b in &basis {
                let ab = self.mul(a, b);
                for c in &basis {
                    if self.mul(&ab, c) != self.mul(a, &self.mul(b, c)) {
                        return Err(CmError::pre("structure constants are not associative"));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn structure_constants(&self) -> &[Elem] {
        &self.structure_constants
    }

    pub fn is_commutative(&self) -> bool {
        let d = self.dim;
        (0..d).all(|i| {
            (0..d).all(|j| {
                let a = &self.structure_constants[(i * d + j) * d..(i * d + j + 1) * d];
                let b = &self.structure_constants[(j * d + i) * d..(j * d + i + 1) * d];
                a == b
            })
        })
    }

    /// Rank of multiplication by `e`, i.e. `dim e*A`.
    pub fn ideal_dim(&self, e: &[Elem]) -> usize {
        let rows: Vec<Vec<Elem>> = (0..self.dim)
            .map(|i| self.mul(e, &unit(self.dim, i)))
            .collect();
        SubspaceBasis::span(&self.field, self.dim, rows).dim()
    }

    /// Jacobson radical of a commutative algebra, as the kernel of
    /// `x -> x^(p^k)` with `p^k >= dim`.
    pub fn radical(&self) -> Result<SubspaceBasis> {
        if !self.is_commutative() {
            return Err(CmError::pre(
                "radical via Frobenius needs a commutative algebra",
            ));
        }
        let f = &self.field;
        let d = self.dim;
        let p = f.characteristic() as usize;
        let mut k = 0u32;
        let mut pk = 1usize;
        while pk < d {
            pk *= p;
            k += 1;
        }
        let images: Vec<Vec<Elem>> = (0..d).map(|i| self.pow(&unit(d, i), pk as u64)).collect();
        let kernel = left_kernel(f, &images, d);
        let rows = kernel
            .rows()
            .iter()
            .map(|r| r.iter().map(|&c| f.frobenius_inv_pow(c, k)).collect());
        Ok(SubspaceBasis::span(f, d, rows))
    }

    pub fn pow(&self, a: &[Elem], mut n: u64) -> Vec<Elem> {
        let mut base = a.to_vec();
        let mut acc = self.one.clone();
        while n > 0 {
            if n & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            n >>= 1;
        }
        acc
    }
}

/// The projection `alg -> alg/ideal` together with section data.
#[derive(Clone, Debug)]
pub struct QuotientMap<A: AlgebraAmbient> {
    pub algebra: QuotientAlgebra,
    pub ideal: SubspaceBasis,
    /// Ambient representatives of the quotient basis.
    pub reps: Vec<Vec<Elem>>,
    rep_space: SubspaceBasis,
    ambient: A,
}

impl<A: AlgebraAmbient> QuotientMap<A> {
    /// Coordinates of the class of an element of the algebra.
    pub fn project(&self, x: &[Elem]) -> Vec<Elem> {
        let f = self.ambient.field();
        let r = self.ideal.reduce(f, x);
        self.rep_space
            .coordinates(f, &r)
            .expect("element does not lie in the algebra")
    }

    pub fn lift(&self, coords: &[Elem]) -> Vec<Elem> {
        let f = self.ambient.field();
        let mut out = vec![0; self.ambient.dim()];
        for (rep, &c) in self.reps.iter().zip(coords) {
            if c == 0 {
                continue;
            }
            for (o, &r) in out.iter_mut().zip(rep) {
                *o = f.mul_add(*o, c, r);
            }
        }
        out
    }
}

pub fn quotient_map<A: AlgebraAmbient>(
    alg: &FiniteAlgebra<A>,
    ideal: &SubspaceBasis,
) -> Result<QuotientMap<A>> {
    let amb = alg.ambient();
    let f = amb.field();
    if ideal.ambient_dim() != amb.dim() {
        return Err(CmError::AmbientMismatch);
    }
    if !alg.basis().contains_space(f, ideal) {
        return Err(CmError::pre("ideal is not contained in the algebra"));
    }
    for a in alg.basis().rows() {
        for x in ideal.rows() {
            if !ideal.contains(f, &amb.mul(a, x)) || !ideal.contains(f, &amb.mul(x, a)) {
                return Err(CmError::pre("ideal is not stable under the algebra"));
            }
        }
    }
    let rep_space = SubspaceBasis::span(
        f,
        amb.dim(),
        alg.basis().rows().iter().map(|b| ideal.reduce(f, b)),
    );
    let reps = rep_space.rows().to_vec();
    let d = reps.len();
    let mut sc = Vec::with_capacity(d * d * d);
    for a in &reps {
        for b in &reps {
            let prod = ideal.reduce(f, &amb.mul(a, b));
            sc.extend(
                rep_space
                    .coordinates(f, &prod)
                    .expect("algebra is multiplicatively closed"),
            );
        }
    }
    let one_red = ideal.reduce(f, &amb.one());
    let one = rep_space
        .coordinates(f, &one_red)
        .expect("algebra contains one");
    let algebra = QuotientAlgebra::new(f.clone(), d, sc, one)?;
    Ok(QuotientMap {
        algebra,
        ideal: ideal.clone(),
        reps,
        rep_space,
        ambient: amb.clone(),
    })
}

pub fn quotient_algebra<A: AlgebraAmbient>(
    alg: &FiniteAlgebra<A>,
    ideal: &SubspaceBasis,
) -> Result<QuotientAlgebra> {
    Ok(quotient_map(alg, ideal)?.algebra)
}
