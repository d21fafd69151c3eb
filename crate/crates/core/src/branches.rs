//! The truncated multi-branch ring `prod_i k[t_i]/t_i^N`.
//!
//! Elements are flat coefficient vectors of length `s * N`; the coefficient
//! of `t_i^j` sits at index `i * N + j`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{CmError, Result};
use crate::exactfield::{Elem, Field, SubspaceBasis};

#[derive(Clone, PartialEq, Eq)]
pub struct AmbientRing {
    field: Field,
    branches: usize,
    truncation: usize,
}

impl fmt::Debug for AmbientRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Ambient({:?}, s={}, N={})",
            self.field, self.branches, self.truncation
        )
    }
}

impl AmbientRing {
    pub fn new(field: Field, branches: usize, truncation: usize) -> Result<Self> {
        if branches == 0 || truncation == 0 {
            return Err(CmError::input(
                "branch count and truncation must be positive",
            ));
        }
        Ok(AmbientRing {
            field,
            branches,
            truncation,
        })
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn branches(&self) -> usize {
        self.branches
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn total_dim(&self) -> usize {
        self.branches * self.truncation
    }

    /// Same branch layout with a different truncation.
    pub fn with_truncation(&self, truncation: usize) -> Result<Self> {
        AmbientRing::new(self.field.clone(), self.branches, truncation)
    }

    pub fn with_field(&self, field: Field) -> Self {
        AmbientRing {
            field,
            ..self.clone()
        }
    }

    #[inline]
    pub fn index(&self, branch: usize, exp: usize) -> usize {
        branch * self.truncation + exp
    }

    pub fn zero_vec(&self) -> Vec<Elem> {
        vec![0; self.total_dim()]
    }

    pub fn one_vec(&self) -> Vec<Elem> {
        let mut v = self.zero_vec();
        for i in 0..self.branches {
            v[self.index(i, 0)] = 1;
        }
        v
    }

    /// The uniformizer `t = (t_1, ..., t_s)`.
    pub fn t_vec(&self) -> Vec<Elem> {
        let mut v = self.zero_vec();
        if self.truncation > 1 {
            for i in 0..self.branches {
                v[self.index(i, 1)] = 1;
            }
        }
        v
    }

    /// `e_i t_i^j`, zero when `j >= N`.
    pub fn monomial_vec(&self, branch: usize, exp: usize) -> Vec<Elem> {
        let mut v = self.zero_vec();
        if exp < self.truncation {
            v[self.index(branch, exp)] = 1;
        }
        v
    }

    /// Branch indicator `e_i`.
    pub fn indicator_vec(&self, branch: usize) -> Vec<Elem> {
        self.monomial_vec(branch, 0)
    }

    /// Branchwise truncated convolution.
    pub fn mul_vec(&self, a: &[Elem], b: &[Elem]) -> Vec<Elem> {
        let n = self.truncation;
        let f = &self.field;
        let mut out = self.zero_vec();
        for br in 0..self.branches {
            let (ab, bb) = (&a[br * n..(br + 1) * n], &b[br * n..(br + 1) * n]);
            let ob = &mut out[br * n..(br + 1) * n];
            for (i, &x) in ab.iter().enumerate() {
                if x == 0 {
                    continue;
                }
                for (j, &y) in bb[..n - i].iter().enumerate() {
                    if y != 0 {
                        ob[i + j] = f.mul_add(ob[i + j], x, y);
                    }
                }
            }
        }
        out
    }

    pub fn add_vec(&self, a: &[Elem], b: &[Elem]) -> Vec<Elem> {
        a.iter()
            .zip(b)
            .map(|(&x, &y)| self.field.add(x, y))
            .collect()
    }

    pub fn sub_vec(&self, a: &[Elem], b: &[Elem]) -> Vec<Elem> {
        a.iter()
            .zip(b)
            .map(|(&x, &y)| self.field.sub(x, y))
            .collect()
    }

    pub fn scale_vec(&self, a: &[Elem], c: Elem) -> Vec<Elem> {
        a.iter().map(|&x| self.field.mul(x, c)).collect()
    }

    pub fn pow_vec(&self, a: &[Elem], k: usize) -> Vec<Elem> {
        let mut acc = self.one_vec();
        for _ in 0..k {
            acc = self.mul_vec(&acc, a);
        }
        acc
    }

    pub fn valuation_vec(&self, a: &[Elem]) -> ValuationVector {
        let n = self.truncation;
        ValuationVector(
            (0..self.branches)
                .map(|br| a[br * n..(br + 1) * n].iter().position(|&c| c != 0))
                .collect(),
        )
    }

    /// A unit has every constant term nonzero.
    pub fn is_unit_vec(&self, a: &[Elem]) -> bool {
        (0..self.branches).all(|br| a[self.index(br, 0)] != 0)
    }

    /// Inverse of a unit by Newton iteration on each branch.
    pub fn inverse_vec(&self, a: &[Elem]) -> Option<Vec<Elem>> {
        if !self.is_unit_vec(a) {
            return None;
        }
        let n = self.truncation;
        let f = &self.field;
        let mut out = self.zero_vec();
        for br in 0..self.branches {
            let ab = &a[br * n..(br + 1) * n];
            let inv0 = f.inv(ab[0]);
            let ob = &mut out[br * n..(br + 1) * n];
            ob[0] = inv0;
            for k in 1..n {
                let mut s = 0;
                for j in 1..=k {
                    s = f.mul_add(s, ab[j], ob[k - j]);
                }
                ob[k] = f.neg(f.mul(s, inv0));
            }
        }
        Some(out)
    }

    /// Acts by `a` on each of the `n` ambient-sized blocks of `v`.
    pub fn act_on_module(&self, a: &[Elem], v: &[Elem]) -> Vec<Elem> {
        let d = self.total_dim();
        v.chunks(d).flat_map(|blk| self.mul_vec(a, blk)).collect()
    }

    /// Reorders branches: branch `i` of the result is branch `perm[i]` of `a`.
    pub fn permute_vec(&self, a: &[Elem], perm: &[usize]) -> Vec<Elem> {
        let n = self.truncation;
        perm.iter()
            .flat_map(|&src| a[src * n..(src + 1) * n].to_vec())
            .collect()
    }

    /// Re-embeds into a ring with a larger truncation (zero-padding).
    pub fn extend_vec(&self, a: &[Elem], target: &AmbientRing) -> Vec<Elem> {
        let mut out = target.zero_vec();
        let keep = self.truncation.min(target.truncation);
        for br in 0..self.branches {
            for j in 0..keep {
                out[target.index(br, j)] = a[self.index(br, j)];
            }
        }
        out
    }

    pub fn element(&self, coeffs: Vec<Elem>) -> Result<MultiBranchElement> {
        if coeffs.len() != self.total_dim() {
            return Err(CmError::DimensionMismatch {
                expected: self.total_dim(),
                got: coeffs.len(),
            });
        }
        Ok(MultiBranchElement {
            ambient: self.clone(),
            coeffs,
        })
    }

    pub fn one(&self) -> MultiBranchElement {
        MultiBranchElement {
            ambient: self.clone(),
            coeffs: self.one_vec(),
        }
    }

    pub fn zero(&self) -> MultiBranchElement {
        MultiBranchElement {
            ambient: self.clone(),
            coeffs: self.zero_vec(),
        }
    }

    pub fn monomial(&self, branch: usize, exp: usize) -> MultiBranchElement {
        MultiBranchElement {
            ambient: self.clone(),
            coeffs: self.monomial_vec(branch, exp),
        }
    }

    /// Span of `e_i t_i^j` for `c <= j < N`, i.e. `t^c` times the ambient.
    pub fn monomial_ideal(&self, c: usize) -> Result<SubspaceBasis> {
        if c > self.truncation {
            return Err(CmError::input(format!(
                "monomial ideal exponent {c} exceeds truncation {}",
                self.truncation
            )));
        }
        let rows = (0..self.branches)
            .flat_map(|br| (c..self.truncation).map(move |j| (br, j)))
            .map(|(br, j)| self.monomial_vec(br, j));
        Ok(SubspaceBasis::span(&self.field, self.total_dim(), rows))
    }

    /// Radical of the ambient: all constant terms zero.
    pub fn radical(&self) -> SubspaceBasis {
        self.monomial_ideal(1).expect("truncation is positive")
    }
}

/// Element of the truncated ambient ring.
#[derive(Clone, PartialEq, Eq)]
pub struct MultiBranchElement {
    ambient: AmbientRing,
    coeffs: Vec<Elem>,
}

impl fmt::Debug for MultiBranchElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.ambient.truncation;
        let parts: Vec<String> = self.coeffs.chunks(n).map(|c| format!("{c:?}")).collect();
        write!(f, "({})", parts.join(", "))
    }
}

impl MultiBranchElement {
    pub fn ambient(&self) -> &AmbientRing {
        &self.ambient
    }

    pub fn coeffs(&self) -> &[Elem] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Elem> {
        self.coeffs
    }

    pub fn branch(&self, i: usize) -> &[Elem] {
        let n = self.ambient.truncation;
        &self.coeffs[i * n..(i + 1) * n]
    }

    fn same(&self, other: &Self) -> Result<()> {
        if self.ambient != other.ambient {
            return Err(CmError::AmbientMismatch);
        }
        Ok(())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.same(other)?;
        Ok(MultiBranchElement {
            ambient: self.ambient.clone(),
            coeffs: self.ambient.mul_vec(&self.coeffs, &other.coeffs),
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same(other)?;
        Ok(MultiBranchElement {
            ambient: self.ambient.clone(),
            coeffs: self.ambient.add_vec(&self.coeffs, &other.coeffs),
        })
    }

    pub fn scale(&self, c: Elem) -> Self {
        MultiBranchElement {
            ambient: self.ambient.clone(),
            coeffs: self.ambient.scale_vec(&self.coeffs, c),
        }
    }

    pub fn valuation(&self) -> ValuationVector {
        self.ambient.valuation_vec(&self.coeffs)
    }

    pub fn is_unit(&self) -> bool {
        self.ambient.is_unit_vec(&self.coeffs)
    }
}

/// Per-branch order of vanishing; `None` stands for infinity (zero up to
/// the truncation).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ValuationVector(pub Vec<Option<usize>>);

impl ValuationVector {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn entries(&self) -> &[Option<usize>] {
        &self.0
    }

    /// Componentwise sum with infinity absorbing.
    pub fn add(&self, other: &Self) -> Self {
        ValuationVector(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| Some((*a)? + (*b)?))
                .collect(),
        )
    }

    pub fn permuted(&self, perm: &[usize]) -> Self {
        ValuationVector(perm.iter().map(|&i| self.0[i]).collect())
    }
}

impl fmt::Display for ValuationVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|e| e.map_or("∞".to_string(), |v| v.to_string()))
            .collect();
        write!(f, "({})", parts.join(","))
    }
}

impl fmt::Debug for ValuationVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ring(p: u32, s: usize, n: usize) -> AmbientRing {
        AmbientRing::new(Field::new(p, 1).unwrap(), s, n).unwrap()
    }

    #[test]
    fn product_of_axes() {
        let r = ring(3, 2, 4);
        let a = r.monomial(0, 1);
        let b = r.monomial(0, 1).add(&r.monomial(1, 1)).unwrap();
        assert_eq!(a.mul(&b).unwrap(), r.monomial(0, 2));
        assert_eq!(a.mul(&r.one()).unwrap(), a);
    }

    #[test]
    fn schoolbook_convolution() {
        let r = ring(5, 1, 8);
        let a = r.monomial(0, 2).add(&r.monomial(0, 3)).unwrap();
        let b = r.monomial(0, 2);
        let expect = r.monomial(0, 4).add(&r.monomial(0, 5)).unwrap();
        assert_eq!(a.mul(&b).unwrap(), expect);
    }

    #[test]
    fn mismatched_ambients() {
        let a = ring(3, 1, 4).one();
        let b = ring(3, 1, 5).one();
        assert_eq!(a.mul(&b).unwrap_err(), CmError::AmbientMismatch);
    }

    #[test]
    fn valuations() {
        let r = ring(2, 2, 8);
        assert_eq!(r.zero().valuation(), ValuationVector(vec![None, None]));
        assert_eq!(r.one().valuation(), ValuationVector(vec![Some(0), Some(0)]));
        let a = r
            .monomial(0, 2)
            .add(&r.monomial(1, 3))
            .unwrap()
            .add(&r.monomial(1, 5))
            .unwrap();
        assert_eq!(a.valuation(), ValuationVector(vec![Some(2), Some(3)]));
        assert_eq!(a.valuation().to_string(), "(2,3)");
    }

    #[test]
    fn monomial_ideal_dims() {
        let r = ring(2, 2, 8);
        assert_eq!(r.monomial_ideal(0).unwrap().dim(), 16);
        assert!(r.monomial_ideal(8).unwrap().is_zero());
        let i4 = r.monomial_ideal(4).unwrap();
        assert_eq!(i4.dim(), 8);
        for row in i4.rows() {
            assert!(r
                .valuation_vec(row)
                .0
                .iter()
                .all(|v| v.is_none_or(|x| x >= 4)));
        }
        assert!(r.monomial_ideal(9).is_err());
    }

    #[test]
    fn monomial_ideal_is_ideal() {
        let r = ring(3, 2, 6);
        let f = r.field().clone();
        let ideal = r.monomial_ideal(2).unwrap();
        let whole = SubspaceBasis::full(r.total_dim());
        let t = crate::exactfield::transporter(&f, &ideal, &ideal, r.total_dim(), |u, j| {
            r.mul_vec(u, whole.rows()[j].as_slice())
        })
        .unwrap();
        assert!(t.is_full());
    }

    fn elem(p: u32, s: usize, n: usize) -> impl Strategy<Value = Vec<Elem>> {
        prop::collection::vec(0..p, s * n)
    }

    proptest! {
        #[test]
        fn ring_axioms(a in elem(5, 2, 6), b in elem(5, 2, 6), c in elem(5, 2, 6)) {
            let r = ring(5, 2, 6);
            let ab_c = r.mul_vec(&r.mul_vec(&a, &b), &c);
            let a_bc = r.mul_vec(&a, &r.mul_vec(&b, &c));
            prop_assert_eq!(ab_c, a_bc);
            prop_assert_eq!(r.mul_vec(&a, &b), r.mul_vec(&b, &a));
            let lhs = r.mul_vec(&a, &r.add_vec(&b, &c));
            let rhs = r.add_vec(&r.mul_vec(&a, &b), &r.mul_vec(&a, &c));
            prop_assert_eq!(lhs, rhs);
            prop_assert_eq!(r.mul_vec(&a, &r.one_vec()), a);
        }

        #[test]
        fn valuation_is_additive(a in elem(3, 2, 10), b in elem(3, 2, 10)) {
            let r = ring(3, 2, 10);
            let (va, vb) = (r.valuation_vec(&a), r.valuation_vec(&b));
            let sum = va.add(&vb);
            let prod = r.valuation_vec(&r.mul_vec(&a, &b));
            for (i, s) in sum.0.iter().enumerate() {
                match s {
                    Some(x) if *x < 10 => prop_assert_eq!(prod.0[i], Some(*x)),
                    Some(_) => prop_assert_eq!(prod.0[i], None),
                    None => prop_assert_eq!(prod.0[i], None),
                }
            }
        }

        #[test]
        fn valuation_unit_invariant(a in elem(7, 3, 5), u in elem(7, 3, 5)) {
            let r = ring(7, 3, 5);
            let mut u = u;
            for br in 0..3 {
                if u[r.index(br, 0)] == 0 {
                    u[r.index(br, 0)] = 1;
                }
            }
            prop_assert_eq!(r.valuation_vec(&r.mul_vec(&a, &u)), r.valuation_vec(&a));
            let inv = r.inverse_vec(&u).unwrap();
            prop_assert_eq!(r.mul_vec(&u, &inv), r.one_vec());
        }
    }
}
