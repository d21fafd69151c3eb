//! Grassmannians of sandwiched modules over finite fields: enumeration of
//! `B(n, d)`, exact orbit dimensions, orbit partitions and parameter counts.

mod estimate;

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algcore::{
    is_module, quotient_map, radical_commutative, AlgebraAmbient, FiniteAlgebra, QuotientAlgebra,
};
use crate::error::{CmError, Result};
use crate::exactfield::{transporter, unit, Elem, Field, Matrix, SubspaceBasis};
use crate::singlab::CertifiedAlgebra;

pub use estimate::{
    b_estimate, estimate_settings, findim_par, fit_dimension, par_estimate, semicont_experiment,
    truncated_polynomial, BReport, DEstimate, EstimateOptions, FamilyMember, FiniteDimSpec,
    IdealChoice, MemberReport, OverringSelector, ParameterEstimate, SemicontReport,
    SemicontVerdict, Violation,
};

/// Default cap on candidate subspaces visited by one enumeration.
pub const ENUMERATION_BUDGET: usize = 1 << 20;
/// Largest transporter (in points) searched exhaustively for a unit.
pub const UNIT_SEARCH_BUDGET: u64 = 1 << 14;
const UNIT_SAMPLES: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SettingKind {
    /// `n Lambda-bar ⊆ V ⊆ n Gamma-bar`, acted on by `GL(n, F)`; only the
    /// part of each orbit inside `B` counts.
    Sandwiched,
    /// Submodules of a ceiling inside `P = nA`, acted on by `Aut_A P`.
    FiniteDim,
}

/// Ambient data shared by all points of one `B(n, d)` family.
///
/// Points are subspaces of `nF`, rows of length `n` with entries in the
/// commutative algebra `F`, stored slot by slot.
#[derive(Clone, Debug)]
pub struct LatticeSetting {
    ring: QuotientAlgebra,
    acting: FiniteAlgebra<QuotientAlgebra>,
    acting_radical: SubspaceBasis,
    local: bool,
    n: usize,
    floor: SubspaceBasis,
    ceiling: SubspaceBasis,
    kind: SettingKind,
    /// Row `i` of `rmul[c]` is `b_i * b_c`.
    rmul: Vec<Matrix>,
}

impl LatticeSetting {
    /// `acting` must be a unital subalgebra of the commutative `ring` whose
    /// simple modules are all one-dimensional.
    pub fn new(
        ring: QuotientAlgebra,
        acting: FiniteAlgebra<QuotientAlgebra>,
        n: usize,
        floor: SubspaceBasis,
        ceiling: SubspaceBasis,
        kind: SettingKind,
    ) -> Result<Self> {
        if n == 0 {
            return Err(CmError::input("rank n must be positive"));
        }
        if !ring.is_commutative() {
            return Err(CmError::pre("the coefficient algebra must be commutative"));
        }
        if acting.ambient() != &ring || !acting.contains_one() {
            return Err(CmError::pre(
                "acting algebra must be a unital subalgebra of the coefficient algebra",
            ));
        }
        let f = ring.field().clone();
        let g = ring.dim();
        for s in [&floor, &ceiling] {
            if s.ambient_dim() != n * g {
                return Err(CmError::DimensionMismatch {
                    expected: n * g,
                    got: s.ambient_dim(),
                });
            }
        }
        if !ceiling.contains_space(&f, &floor) {
            return Err(CmError::pre("floor is not contained in the ceiling"));
        }
        if !is_module(&acting, &floor) || !is_module(&acting, &ceiling) {
            return Err(CmError::pre("floor and ceiling must be submodules"));
        }
        let acting_radical = radical_commutative(&acting)?;
        let q = u64::from(f.order());
        for b in acting.basis().rows() {
            let frob = ring.pow(b, q);
            let diff: Vec<Elem> = frob.iter().zip(b).map(|(&x, &y)| f.sub(x, y)).collect();
            if !acting_radical.contains(&f, &diff) {
                return Err(CmError::pre(
                    "acting algebra has a simple module of dimension > 1 over the base field",
                ));
            }
        }
        let local = acting.dim() - acting_radical.dim() == 1;
        let rmul = (0..g)
            .map(|c| {
                let rows: Vec<Vec<Elem>> =
                    (0..g).map(|i| ring.mul(&unit(g, i), &unit(g, c))).collect();
                Matrix::from_rows(&rows)
            })
            .collect();
        Ok(LatticeSetting {
            ring,
            acting,
            acting_radical,
            local,
            n,
            floor,
            ceiling,
            kind,
            rmul,
        })
    }

    /// `B(n, d; Lambda, Gamma)` inside `n (Gamma / I)` with
    /// `I = t^max(c,1) Lambda_0`, `c` the certified conductor exponent.
    pub fn sandwiched(base: &CertifiedAlgebra, gamma: &FiniteAlgebra, n: usize) -> Result<Self> {
        let amb = &base.ambient;
        let f = amb.field();
        if gamma.ambient() != amb || !gamma.contains_algebra(&base.lambda) {
            return Err(CmError::pre("gamma is not an overring of lambda"));
        }
        let ideal = amb.monomial_ideal(base.conductor_exponent.max(1))?;
        if !base.lambda.basis().contains_space(f, &ideal) {
            return Err(CmError::pre("truncation ideal is not contained in lambda"));
        }
        let qm = quotient_map(gamma, &ideal)?;
        let ring = qm.algebra.clone();
        let g = ring.dim();
        let lambda_bar = SubspaceBasis::span(
            f,
            g,
            base.lambda.basis().rows().iter().map(|x| qm.project(x)),
        );
        let acting = FiniteAlgebra::new(ring.clone(), lambda_bar)?;
        let floor = blocks(f, n, g, acting.basis());
        Self::new(
            ring,
            acting,
            n,
            floor,
            SubspaceBasis::full(n * g),
            SettingKind::Sandwiched,
        )
    }

    /// `B(nA, I, d)`: `A`-submodules of `nI`, codimension taken in `nA`.
    pub fn finite_dim(a: QuotientAlgebra, ideal: &SubspaceBasis, n: usize) -> Result<Self> {
        let f = a.field().clone();
        let g = a.dim();
        if ideal.ambient_dim() != g {
            return Err(CmError::AmbientMismatch);
        }
        let full = FiniteAlgebra::full(a.clone());
        let rad = radical_commutative(&full)?;
        if !rad.contains_space(&f, ideal) {
            return Err(CmError::pre("ideal is not contained in the radical"));
        }
        if !is_module(&full, ideal) {
            return Err(CmError::pre("ideal is not an ideal"));
        }
        let ceiling = blocks(&f, n, g, ideal);
        Self::new(
            a,
            full,
            n,
            SubspaceBasis::zero(n * g),
            ceiling,
            SettingKind::FiniteDim,
        )
    }

    pub fn field(&self) -> &Field {
        self.ring.field()
    }

    pub fn ring(&self) -> &QuotientAlgebra {
        &self.ring
    }

    pub fn acting(&self) -> &FiniteAlgebra<QuotientAlgebra> {
        &self.acting
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> SettingKind {
        self.kind
    }

    /// `dim F`.
    pub fn gamma(&self) -> usize {
        self.ring.dim()
    }

    pub fn module_dim(&self) -> usize {
        self.n * self.ring.dim()
    }

    pub fn floor(&self) -> &SubspaceBasis {
        &self.floor
    }

    pub fn ceiling(&self) -> &SubspaceBasis {
        &self.ceiling
    }

    /// Least codimension a point can have.
    pub fn min_codim(&self) -> usize {
        self.module_dim() - self.ceiling.dim()
    }

    /// Largest codimension a point can have.
    pub fn max_codim(&self) -> usize {
        self.module_dim() - self.floor.dim()
    }

    /// Dimension of the acting group `GL(n, F)`.
    pub fn group_dim(&self) -> usize {
        self.n * self.n * self.gamma()
    }

    fn scalar_act(&self, a: &[Elem], v: &[Elem]) -> Vec<Elem> {
        v.chunks(self.gamma())
            .flat_map(|blk| self.ring.mul(a, blk))
            .collect()
    }

    fn is_stable(&self, v: &SubspaceBasis) -> bool {
        let f = self.field();
        self.acting.basis().rows().iter().all(|a| {
            v.rows()
                .iter()
                .all(|x| v.contains(f, &self.scalar_act(a, x)))
        })
    }

    /// Membership in `B`: between floor and ceiling and stable.
    pub fn contains_point(&self, v: &SubspaceBasis) -> bool {
        let f = self.field();
        v.ambient_dim() == self.module_dim()
            && v.contains_space(f, &self.floor)
            && self.ceiling.contains_space(f, v)
            && self.is_stable(v)
    }

    pub fn point(&self, v: SubspaceBasis) -> Result<ModuleLattice> {
        if !self.contains_point(&v) {
            return Err(CmError::pre("subspace is not a point of B"));
        }
        let codim = self.module_dim() - v.dim();
        Ok(ModuleLattice { basis: v, codim })
    }

    /// `v h` for a row vector `v` and `h` in `M_n(F)` given by coordinates
    /// indexed `(a n + b) gamma + c`.
    pub fn right_mul(&self, v: &[Elem], h: &[Elem]) -> Vec<Elem> {
        let f = self.field();
        let (n, g) = (self.n, self.gamma());
        let mut out = vec![0; n * g];
        for a in 0..n {
            let va = &v[a * g..(a + 1) * g];
            if va.iter().all(|&x| x == 0) {
                continue;
            }
            for b in 0..n {
                let hab = &h[(a * n + b) * g..(a * n + b + 1) * g];
                let prod = self.ring.mul(va, hab);
                for (o, x) in out[b * g..(b + 1) * g].iter_mut().zip(prod) {
                    *o = f.add(*o, x);
                }
            }
        }
        out
    }

    /// Matrix of `v -> v h` on `nF`.
    fn right_matrix(&self, h: &[Elem]) -> Matrix {
        let d = self.module_dim();
        let rows: Vec<Vec<Elem>> = (0..d).map(|i| self.right_mul(&unit(d, i), h)).collect();
        Matrix::from_rows(&rows)
    }

    pub fn is_unit(&self, h: &[Elem]) -> bool {
        self.right_matrix(h).is_invertible(self.field())
    }

    /// `g . V = V g^{-1}`, or `None` when `g` is not invertible.
    pub fn act(&self, g: &[Elem], v: &SubspaceBasis) -> Option<SubspaceBasis> {
        let f = self.field();
        let inv = self.right_matrix(g).inverse(f)?;
        Some(v.image(f, self.module_dim(), |x| inv.vec_mul(f, x)))
    }

    /// Whether every row of `g` lies in `v`, i.e. `g ∈ nV`.
    pub fn rows_in(&self, g: &[Elem], v: &SubspaceBasis) -> bool {
        let (n, g_dim) = (self.n, self.gamma());
        (0..n).all(|a| v.contains(self.field(), &g[a * n * g_dim..(a + 1) * n * g_dim]))
    }

    /// `{h in M_n(F) : u h ⊆ v}` in the coordinates of [`Self::right_mul`].
    pub fn transporter(&self, u: &SubspaceBasis, v: &SubspaceBasis) -> SubspaceBasis {
        let f = self.field();
        let (n, g) = (self.n, self.gamma());
        transporter(f, u, v, self.group_dim(), |x, j| {
            let c = j % g;
            let b = (j / g) % n;
            let a = j / (g * n);
            let mut w = vec![0; n * g];
            let img = self.rmul[c].vec_mul(f, &x[a * g..(a + 1) * g]);
            w[b * g..(b + 1) * g].copy_from_slice(&img);
            w
        })
        .expect("subspaces of nF")
    }

    /// Dimension of the orbit of `v` inside `B`.
    pub fn orbit_dim(&self, v: &ModuleLattice) -> usize {
        let st = self.transporter(&v.basis, &v.basis).dim();
        let total = match self.kind {
            SettingKind::Sandwiched => self.n * v.basis.dim(),
            SettingKind::FiniteDim => self.group_dim(),
        };
        total - st
    }

    /// Hyperplanes `H` of `u` with `floor + rad(acting) u ⊆ H` that are
    /// submodules.
    fn maximal_steps(&self, u: &SubspaceBasis, budget: &mut usize) -> Result<Vec<SubspaceBasis>> {
        let f = self.field();
        let d = self.module_dim();
        let rad_u = self
            .acting_radical
            .rows()
            .iter()
            .flat_map(|a| u.rows().iter().map(move |x| self.scalar_act(a, x)));
        let k = SubspaceBasis::span(f, d, rad_u.chain(self.floor.rows().iter().cloned()));
        let mut acc = k.clone();
        let mut comp = Vec::new();
        for r in u.rows() {
            if !acc.contains(f, r) {
                acc = acc.sum(f, &SubspaceBasis::span(f, d, [r.clone()]))?;
                comp.push(r.clone());
            }
        }
        let r = comp.len();
        if r == 0 {
            return Ok(Vec::new());
        }
        let q = f.order() as usize;
        let count = (0..r).try_fold(0usize, |acc, p| {
            acc.checked_add(q.checked_pow((r - 1 - p) as u32)?)
        });
        match count {
            Some(c) if c <= *budget => *budget -= c,
            _ => {
                return Err(CmError::BudgetExceeded(format!(
                    "enumeration of B needs more candidate subspaces than the budget allows (q = {q}, step rank {r})"
                )))
            }
        }
        let mut out = Vec::new();
        for p in 0..r {
            let tail = r - 1 - p;
            for idx in 0..q.pow(tail as u32) {
                let mut phi = vec![0 as Elem; r];
                phi[p] = 1;
                let mut x = idx;
                for c in phi[p + 1..].iter_mut() {
                    *c = (x % q) as Elem;
                    x /= q;
                }
                let mut rows = k.rows().to_vec();
                for (i, ci) in comp.iter().enumerate() {
                    if i == p {
                        continue;
                    }
                    let s = f.neg(phi[i]);
                    rows.push(
                        ci.iter()
                            .zip(&comp[p])
                            .map(|(&a, &b)| f.mul_add(a, s, b))
                            .collect(),
                    );
                }
                let h = SubspaceBasis::span(f, d, rows);
                if self.local || self.is_stable(&h) {
                    out.push(h);
                }
            }
        }
        Ok(out)
    }

    /// Points of codimension `min_codim..=max`, level by level. Stops early
    /// when the budget runs out; the flag reports whether all requested
    /// levels were completed.
    pub fn enumerate_levels(
        &self,
        max: usize,
        budget: usize,
    ) -> (Vec<Vec<ModuleLattice>>, Option<CmError>) {
        let max = max.min(self.max_codim());
        let mut levels: Vec<Vec<ModuleLattice>> = vec![Vec::new(); max + 1];
        let start = self.min_codim();
        if start > max {
            return (levels, None);
        }
        let mut budget = budget;
        let mut current = vec![self.ceiling.clone()];
        for d in start..=max {
            if d > start {
                let mut next = BTreeSet::new();
                for u in &current {
                    match self.maximal_steps(u, &mut budget) {
                        Ok(hs) => next.extend(hs),
                        Err(e) => {
                            levels.truncate(d);
                            return (levels, Some(e));
                        }
                    }
                }
                current = next.into_iter().collect();
            }
            levels[d] = current
                .iter()
                .map(|b| ModuleLattice {
                    basis: b.clone(),
                    codim: d,
                })
                .collect();
        }
        (levels, None)
    }

    /// All points of `B` of codimension `d`, sorted canonically.
    pub fn enumerate_b(&self, d: usize, budget: usize) -> Result<Vec<ModuleLattice>> {
        if d > self.max_codim() {
            return Ok(Vec::new());
        }
        let (mut levels, err) = self.enumerate_levels(d, budget);
        match err {
            Some(e) => Err(e),
            None => Ok(levels.pop().unwrap_or_default()),
        }
    }

    /// Searches the transporter `u -> v` for an invertible element.
    fn find_unit(&self, t: &SubspaceBasis, rng: &mut ChaCha8Rng, exhaustive: &mut bool) -> bool {
        let f = self.field();
        let q = u64::from(f.order());
        let total = (t.dim() as u32 <= 63)
            .then(|| q.checked_pow(t.dim() as u32))
            .flatten();
        match total {
            Some(total) if total <= UNIT_SEARCH_BUDGET => {
                let mut coeffs = vec![0; t.dim()];
                for idx in 0..total {
                    let mut x = idx;
                    for c in coeffs.iter_mut() {
                        *c = (x % q) as Elem;
                        x /= q;
                    }
                    if self.is_unit(&t.combine(f, &coeffs)) {
                        return true;
                    }
                }
                false
            }
            _ => {
                *exhaustive = false;
                (0..UNIT_SAMPLES).any(|_| {
                    let coeffs: Vec<Elem> =
                        (0..t.dim()).map(|_| rng.gen_range(0..f.order())).collect();
                    self.is_unit(&t.combine(f, &coeffs))
                })
            }
        }
    }

    /// Partition of `points` into rational orbits: `V ~ W` when some
    /// invertible `h` has `V h = W`.
    pub fn orbit_partition(&self, points: &[ModuleLattice], seed: u64) -> OrbitPartition {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut exhaustive = true;
        let dims: Vec<usize> = points.iter().map(|p| self.orbit_dim(p)).collect();
        let st: Vec<usize> = points
            .iter()
            .map(|p| self.transporter(&p.basis, &p.basis).dim())
            .collect();
        let mut classes: Vec<Vec<usize>> = Vec::new();
        for (i, p) in points.iter().enumerate() {
            let found = classes.iter().position(|cl| {
                let r = cl[0];
                if dims[r] != dims[i] || st[r] != st[i] || points[r].codim != p.codim {
                    return false;
                }
                let t = self.transporter(&points[r].basis, &p.basis);
                t.dim() == st[r] && self.find_unit(&t, &mut rng, &mut exhaustive)
            });
            match found {
                Some(c) => classes[c].push(i),
                None => classes.push(vec![i]),
            }
        }
        let records = classes
            .into_iter()
            .map(|members| OrbitRecord {
                representative: points[members[0]].clone(),
                orbit_dim: dims[members[0]],
                orbit_size_q: members.len(),
                stratum: dims[members[0]],
                members,
            })
            .collect();
        OrbitPartition {
            records,
            exhaustive,
        }
    }
}

/// `n` copies of `s ⊆ F^g` inside `nF`.
fn blocks(f: &Field, n: usize, g: usize, s: &SubspaceBasis) -> SubspaceBasis {
    let rows = (0..n).flat_map(|j| {
        s.rows().iter().map(move |r| {
            let mut v = vec![0; n * g];
            v[j * g..(j + 1) * g].copy_from_slice(r);
            v
        })
    });
    SubspaceBasis::span(f, n * g, rows)
}

/// A point of `B`: a stable subspace of `nF` between floor and ceiling.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct ModuleLattice {
    pub basis: SubspaceBasis,
    /// Codimension in `nF`.
    pub codim: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrbitRecord {
    pub representative: ModuleLattice,
    /// Indices into the partitioned point list.
    pub members: Vec<usize>,
    pub orbit_dim: usize,
    /// Number of rational points of the orbit inside `B`.
    pub orbit_size_q: usize,
    /// Least `i` with the orbit inside `B_i`.
    pub stratum: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrbitPartition {
    pub records: Vec<OrbitRecord>,
    /// False when some unit search fell back to sampling.
    pub exhaustive: bool,
}
