use serde::Serialize;

use super::field::{Elem, Field};
use super::matrix::{rref_in_place, Matrix};
use crate::error::{CmError, Result};

/// A linear subspace of `F^n` stored by its reduced row echelon basis.
///
/// Equal subspaces have identical rows, so `Eq` and `Hash` are structural.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct SubspaceBasis {
    ambient_dim: usize,
    rows: Vec<Vec<Elem>>,
    #[serde(skip)]
    pivots: Vec<usize>,
}

impl SubspaceBasis {
    pub fn zero(ambient_dim: usize) -> Self {
        SubspaceBasis {
            ambient_dim,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn full(ambient_dim: usize) -> Self {
        SubspaceBasis {
            ambient_dim,
            rows: (0..ambient_dim).map(|i| unit(ambient_dim, i)).collect(),
            pivots: (0..ambient_dim).collect(),
        }
    }

    /// Canonical basis of the span of `rows`; rejects ragged input.
    pub fn from_rows(f: &Field, ambient_dim: usize, rows: Vec<Vec<Elem>>) -> Result<Self> {
        if let Some(bad) = rows.iter().find(|r| r.len() != ambient_dim) {
            return Err(CmError::DimensionMismatch {
                expected: ambient_dim,
                got: bad.len(),
            });
        }
        Ok(Self::span(f, ambient_dim, rows))
    }

    /// Like [`SubspaceBasis::from_rows`] for rows already known to have the
    /// right length.
    pub fn span(f: &Field, ambient_dim: usize, rows: impl IntoIterator<Item = Vec<Elem>>) -> Self {
        let mut rows: Vec<Vec<Elem>> = rows.into_iter().collect();
        debug_assert!(rows.iter().all(|r| r.len() == ambient_dim));
        let pivots = rref_in_place(f, &mut rows, ambient_dim);
        SubspaceBasis {
            ambient_dim,
            rows,
            pivots,
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<Elem>] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn is_zero(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.rows.len() == self.ambient_dim
    }

    pub fn codim(&self) -> usize {
        self.ambient_dim - self.rows.len()
    }

    pub fn to_matrix(&self) -> Matrix {
        if self.rows.is_empty() {
            return Matrix::zeros(0, self.ambient_dim);
        }
        Matrix::from_rows(&self.rows)
    }

    /// Normal form of `v` modulo this subspace: the unique representative
    /// supported on non-pivot columns.
    pub fn reduce(&self, f: &Field, v: &[Elem]) -> Vec<Elem> {
        assert_eq!(v.len(), self.ambient_dim, "vector length");
        let mut out = v.to_vec();
        for (row, &pc) in self.rows.iter().zip(&self.pivots) {
            let c = out[pc];
            if c == 0 {
                continue;
            }
            let nc = f.neg(c);
            for (x, &r) in out.iter_mut().zip(row) {
                if r != 0 {
                    *x = f.mul_add(*x, nc, r);
                }
            }
        }
        out
    }

    pub fn contains(&self, f: &Field, v: &[Elem]) -> bool {
        self.reduce(f, v).iter().all(|&x| x == 0)
    }

    pub fn contains_space(&self, f: &Field, other: &SubspaceBasis) -> bool {
        self.ambient_dim == other.ambient_dim && other.rows.iter().all(|r| self.contains(f, r))
    }

    /// Coefficients of `v` along the basis rows, if `v` lies in the span.
    pub fn coordinates(&self, f: &Field, v: &[Elem]) -> Option<Vec<Elem>> {
        if !self.contains(f, v) {
            return None;
        }
        Some(self.pivots.iter().map(|&pc| v[pc]).collect())
    }

    /// Linear combination of the basis rows.
    pub fn combine(&self, f: &Field, coeffs: &[Elem]) -> Vec<Elem> {
        assert_eq!(coeffs.len(), self.rows.len());
        let mut out = vec![0; self.ambient_dim];
        for (row, &c) in self.rows.iter().zip(coeffs) {
            if c == 0 {
                continue;
            }
            for (x, &r) in out.iter_mut().zip(row) {
                *x = f.mul_add(*x, c, r);
            }
        }
        out
    }

    /// Columns not carrying a pivot; the matching unit vectors span a
    /// complement.
    pub fn free_columns(&self) -> Vec<usize> {
        let mut is_pivot = vec![false; self.ambient_dim];
        for &p in &self.pivots {
            is_pivot[p] = true;
        }
        (0..self.ambient_dim).filter(|&c| !is_pivot[c]).collect()
    }

    pub fn complement(&self) -> SubspaceBasis {
        let free = self.free_columns();
        SubspaceBasis {
            ambient_dim: self.ambient_dim,
            rows: free.iter().map(|&c| unit(self.ambient_dim, c)).collect(),
            pivots: free,
        }
    }

    /// Coordinates of `v + self` in the quotient, read on the free columns.
    pub fn quotient_coords(&self, f: &Field, v: &[Elem]) -> Vec<Elem> {
        let r = self.reduce(f, v);
        self.free_columns().iter().map(|&c| r[c]).collect()
    }

    fn check(&self, other: &SubspaceBasis) -> Result<()> {
        if self.ambient_dim != other.ambient_dim {
            return Err(CmError::AmbientMismatch);
        }
        Ok(())
    }

    pub fn sum(&self, f: &Field, other: &SubspaceBasis) -> Result<SubspaceBasis> {
        self.check(other)?;
        if other.rows.is_empty() {
            return Ok(self.clone());
        }
        let rows = self.rows.iter().chain(&other.rows).cloned();
        Ok(Self::span(f, self.ambient_dim, rows))
    }

    /// Intersection by the Zassenhaus construction.
    pub fn intersect(&self, f: &Field, other: &SubspaceBasis) -> Result<SubspaceBasis> {
        self.check(other)?;
        let n = self.ambient_dim;
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero(n));
        }
        let mut rows: Vec<Vec<Elem>> = self
            .rows
            .iter()
            .map(|r| r.iter().chain(r).copied().collect())
            .chain(other.rows.iter().map(|r| {
                let mut v = r.clone();
                v.resize(2 * n, 0);
                v
            }))
            .collect();
        let pivots = rref_in_place(f, &mut rows, 2 * n);
        let tail = rows
            .into_iter()
            .zip(pivots)
            .filter(|(_, p)| *p >= n)
            .map(|(r, _)| r[n..].to_vec());
        Ok(Self::span(f, n, tail))
    }

    /// Image of this subspace under a linear map given on vectors.
    pub fn image(
        &self,
        f: &Field,
        target_dim: usize,
        map: impl Fn(&[Elem]) -> Vec<Elem>,
    ) -> SubspaceBasis {
        Self::span(f, target_dim, self.rows.iter().map(|r| map(r)))
    }

    /// Every vector of the subspace; intended for small exhaustive checks.
    pub fn elements(&self, f: &Field) -> Vec<Vec<Elem>> {
        let q = f.order() as usize;
        let total = q
            .checked_pow(self.dim() as u32)
            .expect("subspace too large to list");
        let mut out = Vec::with_capacity(total);
        let mut coeffs = vec![0; self.dim()];
        for idx in 0..total {
            let mut r = idx;
            for c in coeffs.iter_mut() {
                *c = (r % q) as Elem;
                r /= q;
            }
            out.push(self.combine(f, &coeffs));
        }
        out
    }
}

pub fn unit(n: usize, i: usize) -> Vec<Elem> {
    let mut v = vec![0; n];
    v[i] = 1;
    v
}

/// Canonical row space of a matrix.
pub fn rref_canonicalize(f: &Field, m: &Matrix) -> SubspaceBasis {
    SubspaceBasis::span(f, m.cols, m.to_rows())
}

/// `{c : sum_i c_i rows[i] = 0}` as a subspace of `F^{rows.len()}`.
pub fn left_kernel(f: &Field, rows: &[Vec<Elem>], ncols: usize) -> SubspaceBasis {
    let k = rows.len();
    let mut aug: Vec<Vec<Elem>> = rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            assert_eq!(r.len(), ncols);
            let mut v = r.clone();
            v.extend(unit(k, i));
            v
        })
        .collect();
    let pivots = rref_in_place(f, &mut aug, ncols + k);
    let kernel = aug
        .into_iter()
        .zip(pivots)
        .filter(|(_, p)| *p >= ncols)
        .map(|(r, _)| r[ncols..].to_vec());
    SubspaceBasis::span(f, k, kernel)
}

/// Solutions `h` (coordinates over `acting_dim` basis elements) of
/// `act(u, h) in V` for every `u in U`, where `act(u, j)` returns `u` acted
/// on by the `j`-th basis element.
pub fn transporter(
    f: &Field,
    u: &SubspaceBasis,
    v: &SubspaceBasis,
    acting_dim: usize,
    act: impl Fn(&[Elem], usize) -> Vec<Elem>,
) -> Result<SubspaceBasis> {
    u.check(v)?;
    if u.is_zero() || v.is_full() {
        return Ok(SubspaceBasis::full(acting_dim));
    }
    let free = v.free_columns();
    let width = free.len() * u.dim();
    let mut rows = Vec::with_capacity(acting_dim);
    for j in 0..acting_dim {
        let mut row = Vec::with_capacity(width);
        for ui in u.rows() {
            let w = act(ui, j);
            if w.len() != v.ambient_dim() {
                return Err(CmError::DimensionMismatch {
                    expected: v.ambient_dim(),
                    got: w.len(),
                });
            }
            let r = v.reduce(f, &w);
            row.extend(free.iter().map(|&c| r[c]));
        }
        rows.push(row);
    }
    Ok(left_kernel(f, &rows, width))
}
