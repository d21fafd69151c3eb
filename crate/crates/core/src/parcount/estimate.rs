use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{LatticeSetting, ENUMERATION_BUDGET};
use crate::algcore::{closure_in, FiniteAlgebra, QuotientAlgebra};
use crate::error::{CmError, Result};
use crate::exactfield::{is_prime, Elem, Field, SubspaceBasis};
use crate::singlab::{
    build_singularity, derive_overring, CertifiedAlgebra, OverringKind, SingularitySpec,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct EstimateOptions {
    pub budget: usize,
    /// Skip codimensions whose enumeration exceeds the budget instead of
    /// failing.
    pub skip_over_budget: bool,
}

impl Default for EstimateOptions {
    fn default() -> Self {
        EstimateOptions {
            budget: ENUMERATION_BUDGET,
            skip_over_budget: false,
        }
    }
}

/// Estimated dimension from point counts `(q, N(q))`: rounded least-squares
/// slope of `ln N` against `ln q`, or `floor(log_q N)` from a single field
/// (flagged low confidence). `None` when every count is zero.
pub fn fit_dimension(counts: &[(u32, usize)]) -> Option<(i64, bool)> {
    let pts: Vec<(u32, usize)> = counts.iter().copied().filter(|&(_, n)| n > 0).collect();
    let mut qs: Vec<u32> = pts.iter().map(|p| p.0).collect();
    qs.sort_unstable();
    qs.dedup();
    match qs.len() {
        0 => None,
        1 => {
            let (q, n) = pts[0];
            let mut k = 0i64;
            let mut pow = 1usize;
            while let Some(next) = pow.checked_mul(q as usize) {
                if next > n {
                    break;
                }
                pow = next;
                k += 1;
            }
            Some((k, true))
        }
        _ => {
            let xs: Vec<f64> = pts.iter().map(|&(q, _)| f64::from(q).ln()).collect();
            let ys: Vec<f64> = pts.iter().map(|&(_, n)| (n as f64).ln()).collect();
            let m = xs.len() as f64;
            let mx = xs.iter().sum::<f64>() / m;
            let my = ys.iter().sum::<f64>() / m;
            let cov: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
            let var: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
            Some(((cov / var).round() as i64, false))
        }
    }
}

/// Counts and fitted dimensions for one codimension `d`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DEstimate {
    pub d: usize,
    /// `q -> [N_0(q), N_1(q), ...]`, `N_i(q) = #{V : orbit_dim(V) <= i}`.
    pub counts: BTreeMap<u32, Vec<usize>>,
    /// Estimated `dim B_i` for every `i` with `B_i` nonempty.
    pub fitted_dims: BTreeMap<usize, i64>,
    /// `max_i(dim B_i - i)`, `None` when `B` is empty.
    pub par: Option<i64>,
    pub low_confidence: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ParameterEstimate {
    pub n: usize,
    pub per_d: Vec<DEstimate>,
    /// `max_d par(n, d)` over the enumerated codimensions.
    pub par: Option<i64>,
    pub exhaustive: bool,
    pub low_confidence: bool,
    pub primes_used: Vec<u32>,
    /// Codimensions dropped because the enumeration budget ran out.
    pub skipped: Vec<usize>,
    pub notes: Vec<String>,
}

impl ParameterEstimate {
    pub fn par_at(&self, d: usize) -> Option<i64> {
        self.per_d.iter().find(|e| e.d == d).and_then(|e| e.par)
    }
}

fn check_primes(primes: &[u32]) -> Result<()> {
    if primes.is_empty() {
        return Err(CmError::input("at least one prime is required"));
    }
    for (i, &p) in primes.iter().enumerate() {
        if !is_prime(u64::from(p)) {
            return Err(CmError::NotPrime(u64::from(p)));
        }
        if primes[..i].contains(&p) {
            return Err(CmError::input(format!("prime {p} listed twice")));
        }
    }
    Ok(())
}

/// Point counts per stratum over several fields, one setting per field.
pub fn estimate_settings(
    settings: &[(u32, LatticeSetting)],
    d_range: Option<&[usize]>,
    opts: EstimateOptions,
) -> Result<ParameterEstimate> {
    let first = &settings
        .first()
        .ok_or_else(|| CmError::input("at least one field is required"))?
        .1;
    let n = first.n();
    let ds: Vec<usize> = match d_range {
        Some(r) => {
            let mut r = r.to_vec();
            r.sort_unstable();
            r.dedup();
            r
        }
        None => (first.min_codim()..=first.max_codim()).collect(),
    };
    let max_d = ds.iter().copied().max().unwrap_or(0);
    let mut counts: BTreeMap<usize, BTreeMap<u32, Vec<usize>>> = BTreeMap::new();
    let mut skipped = Vec::new();
    let mut exhaustive = true;
    for (q, s) in settings {
        let (levels, err) = s.enumerate_levels(max_d, opts.budget);
        if let Some(e) = err {
            if !opts.skip_over_budget {
                return Err(e);
            }
            exhaustive = false;
        }
        for &d in &ds {
            if d >= levels.len() && d <= s.max_codim() {
                skipped.push(d);
                continue;
            }
            let pts = levels.get(d).map(Vec::as_slice).unwrap_or(&[]);
            let dims: Vec<usize> = pts.iter().map(|p| s.orbit_dim(p)).collect();
            let top = dims.iter().copied().max().unwrap_or(0);
            let cum = (0..=top)
                .map(|i| dims.iter().filter(|&&x| x <= i).count())
                .collect();
            counts.entry(d).or_default().insert(*q, cum);
        }
    }
    skipped.sort_unstable();
    skipped.dedup();
    let mut per_d = Vec::new();
    let mut low_confidence = false;
    for &d in &ds {
        if skipped.contains(&d) {
            continue;
        }
        let by_q = counts.remove(&d).unwrap_or_default();
        let top = by_q.values().map(|c| c.len()).max().unwrap_or(0);
        let mut fitted_dims = BTreeMap::new();
        let mut low = false;
        for i in 0..top {
            let pts: Vec<(u32, usize)> = by_q
                .iter()
                .map(|(&q, c)| {
                    (
                        q,
                        c.get(i).copied().unwrap_or_else(|| *c.last().unwrap_or(&0)),
                    )
                })
                .collect();
            if let Some((dim, lc)) = fit_dimension(&pts) {
                fitted_dims.insert(i, dim);
                low |= lc;
            }
        }
        let par = fitted_dims.iter().map(|(&i, &dim)| dim - i as i64).max();
        low_confidence |= low;
        per_d.push(DEstimate {
            d,
            counts: by_q,
            fitted_dims,
            par,
            low_confidence: low,
        });
    }
    let par = per_d.iter().filter_map(|e| e.par).max();
    let mut notes = Vec::new();
    if let Some(p) = par {
        if p <= 0 {
            notes.push(format!(
                "par = {p} <= 0: the enumerated strata carry no continuous parameters"
            ));
        }
    }
    if low_confidence {
        notes.push("single-field dimension estimates are low confidence".to_string());
    }
    notes.push("dimensions are estimated from point counts, not proven".to_string());
    Ok(ParameterEstimate {
        n,
        per_d,
        par,
        exhaustive,
        low_confidence,
        primes_used: settings.iter().map(|(q, _)| *q).collect(),
        skipped,
        notes,
    })
}

/// Overring choice, re-derived for each prime.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OverringSelector {
    /// `Gamma = Lambda`.
    Lambda,
    Lambda0,
    Prime,
    DoublePrime,
    /// `Lambda' + k e` with `e` the indicator of the listed branches (0-based).
    PrimeE {
        branches: Vec<usize>,
    },
    /// The subalgebra generated by `Lambda` and the generators of `spec`.
    Explicit {
        name: String,
        spec: SingularitySpec,
    },
}

impl fmt::Display for OverringSelector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OverringSelector::Lambda => write!(f, "lambda"),
            OverringSelector::Lambda0 => write!(f, "lambda0"),
            OverringSelector::Prime => write!(f, "prime"),
            OverringSelector::DoublePrime => write!(f, "double_prime"),
            OverringSelector::PrimeE { branches } => write!(f, "prime_e{branches:?}"),
            OverringSelector::Explicit { name, .. } => write!(f, "{name}"),
        }
    }
}

impl OverringSelector {
    pub fn instantiate(&self, base: &CertifiedAlgebra) -> Result<FiniteAlgebra> {
        let amb = &base.ambient;
        match self {
            OverringSelector::Lambda => Ok(base.lambda.clone()),
            OverringSelector::Lambda0 => derive_overring(base, OverringKind::Lambda0, None),
            OverringSelector::Prime => derive_overring(base, OverringKind::Prime, None),
            OverringSelector::DoublePrime => derive_overring(base, OverringKind::DoublePrime, None),
            OverringSelector::PrimeE { branches } => {
                let mut e = amb.zero_vec();
                for &b in branches {
                    if b >= amb.branches() {
                        return Err(CmError::input(format!("branch {b} out of range")));
                    }
                    e[amb.index(b, 0)] = 1;
                }
                derive_overring(base, OverringKind::PrimeE, Some(&e))
            }
            OverringSelector::Explicit { spec, .. } => {
                if spec.branches != amb.branches() || spec.truncation != amb.truncation() {
                    return Err(CmError::input(
                        "overring spec must share branches and truncation with lambda",
                    ));
                }
                let spec = spec.reinstantiate(amb.field().characteristic())?;
                spec.validate()?;
                let mut gens: Vec<Vec<Elem>> = base.lambda.basis().rows().to_vec();
                gens.extend(spec.elements(amb)?.into_iter().map(|e| e.into_coeffs()));
                Ok(closure_in(amb, &gens))
            }
        }
    }
}

/// `par(n, d; Lambda, Gamma)` for each `d`, re-instantiating `spec` over
/// every prime field.
pub fn par_estimate(
    spec: &SingularitySpec,
    gamma: &OverringSelector,
    n: usize,
    d_range: Option<&[usize]>,
    primes: &[u32],
    opts: EstimateOptions,
) -> Result<ParameterEstimate> {
    check_primes(primes)?;
    let mut settings = Vec::new();
    for &p in primes {
        let base = build_singularity(&spec.reinstantiate(p)?)?;
        let g = gamma.instantiate(&base)?;
        settings.push((p, LatticeSetting::sandwiched(&base, &g, n)?));
    }
    estimate_settings(&settings, d_range, opts)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BReport {
    /// Maximum of `par(n; Lambda, Gamma)` over the list.
    pub b: Option<i64>,
    pub achieved_by: Option<String>,
    pub breakdown: Vec<(String, ParameterEstimate)>,
}

/// `b(n, Lambda)` restricted to the supplied overrings.
pub fn b_estimate(
    spec: &SingularitySpec,
    overrings: &[OverringSelector],
    n: usize,
    d_range: Option<&[usize]>,
    primes: &[u32],
    opts: EstimateOptions,
) -> Result<BReport> {
    if overrings.is_empty() {
        return Err(CmError::input("at least one overring is required"));
    }
    let mut breakdown = Vec::new();
    for g in overrings {
        breakdown.push((
            g.to_string(),
            par_estimate(spec, g, n, d_range, primes, opts)?,
        ));
    }
    let best = breakdown
        .iter()
        .filter_map(|(name, e)| e.par.map(|p| (p, name)))
        .fold(None::<(i64, &String)>, |acc, (p, name)| match acc {
            Some((bp, _)) if bp >= p => acc,
            _ => Some((p, name)),
        });
    Ok(BReport {
        b: best.map(|b| b.0),
        achieved_by: best.map(|b| b.1.clone()),
        breakdown,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyMember {
    /// Members with parameter 0 are special; all others generic.
    pub parameter: i64,
    pub spec: SingularitySpec,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MemberReport {
    pub parameter: i64,
    pub special: bool,
    pub b: BReport,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub quantity: String,
    pub n: usize,
    pub d: Option<usize>,
    pub primes: Vec<u32>,
    pub special: Option<i64>,
    pub generic: Option<i64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum SemicontVerdict {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SemicontReport {
    pub members: Vec<MemberReport>,
    pub verdict: SemicontVerdict,
    pub violations: Vec<Violation>,
}

/// Checks that every special member weakly dominates every generic member
/// in `par(n, d)`, `par(n)` and `b`, over the shared overring list. Empty
/// `B` counts as minus infinity.
pub fn semicont_experiment(
    family: &[FamilyMember],
    overrings: &[OverringSelector],
    n: usize,
    d_range: Option<&[usize]>,
    primes: &[u32],
    opts: EstimateOptions,
) -> Result<SemicontReport> {
    let first = family
        .first()
        .ok_or_else(|| CmError::input("family is empty"))?;
    if family.iter().any(|m| {
        m.spec.branches != first.spec.branches || m.spec.truncation != first.spec.truncation
    }) {
        return Err(CmError::pre(
            "family members must share branch structure and truncation",
        ));
    }
    let mut members = Vec::new();
    for m in family {
        members.push(MemberReport {
            parameter: m.parameter,
            special: m.parameter == 0,
            b: b_estimate(&m.spec, overrings, n, d_range, primes, opts)?,
        });
    }
    let mut violations = Vec::new();
    for s in members.iter().filter(|m| m.special) {
        for g in members.iter().filter(|m| !m.special) {
            let mut check = |quantity: String, d: Option<usize>, a: Option<i64>, b: Option<i64>| {
                if a < b {
                    violations.push(Violation {
                        quantity,
                        n,
                        d,
                        primes: primes.to_vec(),
                        special: a,
                        generic: b,
                    });
                }
            };
            for ((name, es), (_, eg)) in s.b.breakdown.iter().zip(&g.b.breakdown) {
                for dg in &eg.per_d {
                    if es.skipped.contains(&dg.d) {
                        continue;
                    }
                    check(
                        format!("par(n,d) [{name}]"),
                        Some(dg.d),
                        es.par_at(dg.d),
                        dg.par,
                    );
                }
                check(format!("par(n) [{name}]"), None, es.par, eg.par);
            }
            check("b(n)".to_string(), None, s.b.b, g.b.b);
        }
    }
    let verdict = if violations.is_empty() {
        SemicontVerdict::Pass
    } else {
        SemicontVerdict::Fail
    };
    Ok(SemicontReport {
        members,
        verdict,
        violations,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IdealChoice {
    Radical,
    /// Integer coordinate rows spanning the ideal.
    Rows(Vec<Vec<i64>>),
}

/// A finite-dimensional commutative algebra by integer structure
/// constants `b_i b_j = sum_k c[(i d + j) d + k] b_k`, readable over any
/// prime field.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FiniteDimSpec {
    pub dim: usize,
    pub structure_constants: Vec<i64>,
    pub one: Vec<i64>,
    pub ideal: IdealChoice,
}

impl FiniteDimSpec {
    pub fn instantiate(&self, p: u32) -> Result<(QuotientAlgebra, SubspaceBasis)> {
        let f = Field::new(p, 1)?;
        let conv = |v: &[i64]| -> Vec<Elem> { v.iter().map(|&c| f.from_int(c)).collect() };
        let a = QuotientAlgebra::new(
            f.clone(),
            self.dim,
            conv(&self.structure_constants),
            conv(&self.one),
        )?;
        let ideal = match &self.ideal {
            IdealChoice::Radical => a.radical()?,
            IdealChoice::Rows(rows) => {
                SubspaceBasis::from_rows(&f, self.dim, rows.iter().map(|r| conv(r)).collect())?
            }
        };
        Ok((a, ideal))
    }
}

/// `k[x_1..x_vars] / (x_1..x_vars)^nilpotency` on the monomial basis,
/// graded lexicographically, with `I` the radical.
pub fn truncated_polynomial(vars: usize, nilpotency: usize) -> Result<FiniteDimSpec> {
    if vars == 0 || nilpotency == 0 {
        return Err(CmError::input("vars and nilpotency must be positive"));
    }
    let mut monos: Vec<Vec<usize>> = vec![vec![0; vars]];
    for deg in 1..nilpotency {
        let prev: Vec<Vec<usize>> = monos
            .iter()
            .filter(|m| m.iter().sum::<usize>() == deg - 1)
            .cloned()
            .collect();
        let mut next: Vec<Vec<usize>> = Vec::new();
        for m in prev {
            for v in 0..vars {
                let mut e = m.clone();
                e[v] += 1;
                if !next.contains(&e) {
                    next.push(e);
                }
            }
        }
        next.sort_unstable_by(|a, b| b.cmp(a));
        monos.extend(next);
    }
    let d = monos.len();
    let mut sc = vec![0i64; d * d * d];
    for (i, a) in monos.iter().enumerate() {
        for (j, b) in monos.iter().enumerate() {
            let prod: Vec<usize> = a.iter().zip(b).map(|(x, y)| x + y).collect();
            if let Some(k) = monos.iter().position(|m| *m == prod) {
                sc[(i * d + j) * d + k] = 1;
            }
        }
    }
    let mut one = vec![0; d];
    one[0] = 1;
    Ok(FiniteDimSpec {
        dim: d,
        structure_constants: sc,
        one,
        ideal: IdealChoice::Radical,
    })
}

/// `par(nA, I, d; A)` over every listed prime field.
pub fn findim_par(
    spec: &FiniteDimSpec,
    n: usize,
    d_range: Option<&[usize]>,
    primes: &[u32],
    opts: EstimateOptions,
) -> Result<ParameterEstimate> {
    check_primes(primes)?;
    let mut settings = Vec::new();
    for &p in primes {
        let (a, ideal) = spec.instantiate(p)?;
        settings.push((p, LatticeSetting::finite_dim(a, &ideal, n)?));
    }
    estimate_settings(&settings, d_range, opts)
}
