use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::algcore::{closure_in, is_module, module_closure};
use crate::exactfield::{FieldEmbedding, FieldSpec};
use crate::singlab::{build_singularity, derive_overring, OverringKind, SingularitySpec};

fn fld(p: u32, e: u32) -> Field {
    Field::new(p, e).unwrap()
}

fn mat(rows: &[&[Elem]]) -> Matrix {
    Matrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>())
}

fn sub(a: &SemisimpleAlgebraModel, gens: &[Matrix]) -> FiniteAlgebra<BlockMatrixAmbient> {
    let v: Vec<Vec<Elem>> = gens.iter().map(|m| m.data.clone()).collect();
    a.subalgebra(&v).unwrap()
}

/// The field `F_{q^n}` inside `M_n(F_q)` via a companion matrix.
fn embedded_extension(f: &Field, n: usize) -> Matrix {
    companion(f, &first_irreducible(f, n))
}

fn random_matrix(f: &Field, rng: &mut ChaCha8Rng, r: usize, c: usize) -> Matrix {
    Matrix::from_flat(
        r,
        c,
        (0..r * c).map(|_| rng.gen_range(0..f.order())).collect(),
    )
}

/// `b`-submodule of `M_{n x m}` generated by random matrices, resampled
/// until it spans under `M_n`.
fn random_dense_instance(
    f: &Field,
    rng: &mut ChaCha8Rng,
    n: usize,
    m: usize,
) -> (FiniteAlgebra<BlockMatrixAmbient>, SubspaceBasis) {
    let a = SemisimpleAlgebraModel::matrix_algebra(f.clone(), n).unwrap();
    let b = sub(&a, &[embedded_extension(f, n)]);
    loop {
        let k = m.div_ceil(n) + rng.gen_range(0..=1);
        let gens: Vec<Matrix> = (0..k).map(|_| random_matrix(f, rng, n, m)).collect();
        let mut rows = Vec::new();
        for g in &gens {
            for x in b.basis().rows() {
                rows.push(Matrix::from_flat(n, n, x.clone()).mul(f, g).data);
            }
        }
        let v = SubspaceBasis::span(f, n * m, rows);
        if row_space_spans(f, &v, n, m) {
            return (b, v);
        }
    }
}

#[test]
fn block_ambient_multiplies_blockwise() {
    let f = fld(5, 1);
    let amb = BlockMatrixAmbient::new(f.clone(), vec![2, 1]);
    assert_eq!(amb.dim(), 5);
    let x = vec![1, 2, 3, 4, 2];
    let y = vec![0, 1, 1, 0, 3];
    assert_eq!(amb.mul(&x, &y), vec![2, 1, 4, 3, 1]);
    assert_eq!(amb.mul(&x, &amb.one()), x);
}

#[test]
fn model_dimensions() {
    let a = SemisimpleAlgebraModel::new(fld(2, 1), &[(2, 2), (1, 3), (3, 1)]).unwrap();
    assert_eq!(a.dim(), 2 * 2 * 2 + 3 + 9);
    assert!(!a.is_split());
    assert!(SemisimpleAlgebraModel::new(fld(2, 1), &[(0, 1)]).is_err());
}

#[test]
fn density_examples() {
    let f5 = fld(5, 1);
    let a = SemisimpleAlgebraModel::matrix_algebra(f5.clone(), 2).unwrap();
    assert!(is_dense(a.algebra(), &a).unwrap());
    let upper = sub(&a, &[mat(&[&[1, 0], &[0, 0]]), mat(&[&[0, 1], &[0, 0]])]);
    assert_eq!(upper.dim(), 3);
    assert!(!is_dense(&upper, &a).unwrap());

    // F_16 inside M_2(F_4): irreducible on all 15 nonzero vectors of F_4^2.
    let f4 = fld(2, 2);
    let a = SemisimpleAlgebraModel::matrix_algebra(f4.clone(), 2).unwrap();
    let b = sub(&a, &[embedded_extension(&f4, 2)]);
    assert_eq!(b.dim(), 2);
    assert!(is_dense(&b, &a).unwrap());

    // Scalars are dense in K but not in M_2(K).
    let f2 = fld(2, 1);
    let a = SemisimpleAlgebraModel::new(f2.clone(), &[(1, 2)]).unwrap();
    let k = closure_in(a.ambient(), &[]);
    assert!(is_dense(&k, &a).unwrap());
    let a = SemisimpleAlgebraModel::new(f2, &[(2, 2)]).unwrap();
    let k = closure_in(a.ambient(), &[]);
    assert!(!is_dense(&k, &a).unwrap());
}

#[test]
fn density_spin_oracle() {
    // Brute force over all subsets: no proper nonzero subspace of F_3^2 is
    // invariant under the embedded F_9.
    let f = fld(3, 1);
    let c = embedded_extension(&f, 2);
    let all: Vec<Vec<Elem>> = (0..9)
        .map(|i| vec![i % 3, i / 3])
        .filter(|v| v != &[0, 0])
        .collect();
    for v in &all {
        let line = SubspaceBasis::span(&f, 2, [v.clone()]);
        assert!(!line.contains(&f, &c.mul_vec(&f, v)));
    }
}

#[test]
fn flag_subalgebra_examples() {
    let f = fld(5, 1);
    let a = SemisimpleAlgebraModel::matrix_algebra(f.clone(), 2).unwrap();
    let triv = FlagData::trivial(&a);
    assert_eq!(flag_subalgebra(&a, &triv).unwrap().dim(), 4);
    let full = FlagData {
        chains: vec![vec![
            SubspaceBasis::full(2),
            SubspaceBasis::span(&f, 2, [vec![1, 0]]),
            SubspaceBasis::zero(2),
        ]],
    };
    let af = flag_subalgebra(&a, &full).unwrap();
    assert_eq!(af.dim(), 3);
    assert!(af.contains(&[1, 1, 0, 1]));
    assert!(!af.contains(&[1, 0, 1, 1]));
}

#[test]
fn flag_subalgebra_matches_exhaustive_filter() {
    let f = fld(2, 1);
    let a = SemisimpleAlgebraModel::matrix_algebra(f.clone(), 3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..10 {
        let v1 = random_matrix(&f, &mut rng, 1, 3).data;
        if v1.iter().all(|&x| x == 0) {
            continue;
        }
        let u1 = SubspaceBasis::span(&f, 3, [v1.clone(), random_matrix(&f, &mut rng, 1, 3).data]);
        let u2 = SubspaceBasis::span(&f, 3, [v1]);
        let mut chain = vec![SubspaceBasis::full(3)];
        if u1.dim() == 2 {
            chain.push(u1);
        }
        chain.push(u2);
        chain.push(SubspaceBasis::zero(3));
        let flag = FlagData {
            chains: vec![chain.clone()],
        };
        let af = flag_subalgebra(&a, &flag).unwrap();
        let count = (0u32..512)
            .filter(|bits| {
                let g = Matrix::from_flat(3, 3, (0..9).map(|i| (bits >> i) & 1).collect());
                chain
                    .iter()
                    .all(|u| u.rows().iter().all(|r| u.contains(&f, &g.mul_vec(&f, r))))
            })
            .count();
        assert_eq!(1usize << af.dim(), count);
    }
}

#[test]
fn malformed_flags_are_rejected() {
    let f = fld(3, 1);
    let a = SemisimpleAlgebraModel::matrix_algebra(f.clone(), 2).unwrap();
    let bad = FlagData {
        chains: vec![vec![
            SubspaceBasis::full(2),
            SubspaceBasis::full(2),
            SubspaceBasis::zero(2),
        ]],
    };
    assert!(flag_subalgebra(&a, &bad).is_err());
    let bad = FlagData { chains: vec![] };
    assert!(flag_subalgebra(&a, &bad).is_err());
    // A line of F_4 = K over F_2 that is not a K-subspace.
    let a = SemisimpleAlgebraModel::new(fld(2, 1), &[(1, 2)]).unwrap();
    let bad = FlagData {
        chains: vec![vec![
            SubspaceBasis::full(2),
            SubspaceBasis::span(&fld(2, 1), 2, [vec![1, 0]]),
            SubspaceBasis::zero(2),
        ]],
    };
    assert!(flag_subalgebra(&a, &bad).is_err());
}

#[test]
fn refine_examples() {
    let f = fld(3, 1);
    let a = SemisimpleAlgebraModel::matrix_algebra(f.clone(), 2).unwrap();
    let triv = FlagData::trivial(&a);
    assert_eq!(refine_to_dense_flag(a.algebra(), &a, &triv).unwrap(), triv);

    let diag = sub(&a, &[mat(&[&[1, 0], &[0, 0]])]);
    let refined = refine_to_dense_flag(&diag, &a, &triv).unwrap();
    assert_eq!(refined.chains[0].len(), 3);
    let af = flag_subalgebra(&a, &refined).unwrap();
    assert_eq!(af.dim(), 3);
    assert!(af.contains_algebra(&diag));
    assert!(is_dense_in_flag(&diag, &a, &refined).unwrap());
    assert!(!is_dense_in_flag(&diag, &a, &triv).unwrap());
}

#[test]
fn refine_random_subalgebras_is_dense() {
    let f = fld(2, 1);
    let a = SemisimpleAlgebraModel::new(f.clone(), &[(3, 1), (2, 1)]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..15 {
        let g1 = random_matrix(&f, &mut rng, 3, 3);
        let g2 = random_matrix(&f, &mut rng, 2, 2);
        let b = a.subalgebra(&[a.ambient().from_blocks(&[g1, g2])]).unwrap();
        let flag = refine_to_dense_flag(&b, &a, &FlagData::trivial(&a)).unwrap();
        assert!(flag_subalgebra(&a, &flag).unwrap().contains_algebra(&b));
        assert!(is_dense_in_flag(&b, &a, &flag).unwrap());
    }
}

#[test]
fn normalize_full_space() {
    let f = fld(3, 1);
    let a = SemisimpleAlgebraModel::matrix_algebra(f.clone(), 2).unwrap();
    let v = SubspaceBasis::full(4);
    let nz = normalize_submodule(&v, a.algebra(), 2, 2, true).unwrap();
    assert_eq!((nz.q, nz.r), (1, 0));
    assert!(nz.verify(&f, &v));
}

#[test]
fn normalize_embedded_field() {
    let f = fld(3, 1);
    let a = SemisimpleAlgebraModel::matrix_algebra(f.clone(), 2).unwrap();
    let c = embedded_extension(&f, 2);
    let b = sub(&a, &[c.clone()]);
    let v = SubspaceBasis::span(&f, 4, [Matrix::identity(2).data, c.data.clone()]);
    let nz = normalize_submodule(&v, &b, 2, 2, true).unwrap();
    assert!(nz.verify(&f, &v));
    let img = nz.image(&f, &v);
    assert!(img.contains(&f, &Matrix::identity(2).data));
    assert_eq!(nz.r, 0);
}

#[test]
fn normalize_random_dense_instances() {
    for (p, e) in [(5, 1), (2, 2)] {
        let f = fld(p, e);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for trial in 0..100 {
            let (n, m) = if trial % 2 == 0 {
                (2, 3)
            } else {
                (1 + trial % 3, 1 + trial % 5)
            };
            let (b, v) = random_dense_instance(&f, &mut rng, n, m);
            let nz = normalize_submodule(&v, &b, n, m, false).unwrap();
            assert_eq!(nz.r, m % n);
            assert!(nz.verify(&f, &v), "n={n} m={m}");
        }
    }
}

#[test]
fn normalize_preconditions() {
    let f = fld(2, 1);
    let a = SemisimpleAlgebraModel::matrix_algebra(f.clone(), 2).unwrap();
    let k = closure_in(a.ambient(), &[]);
    // Only the first row is ever used: A V != W.
    let v = SubspaceBasis::span(&f, 4, [vec![1, 0, 0, 0]]);
    assert!(normalize_submodule(&v, &k, 2, 2, false).is_err());
    // Not dense: scalars in M_2.
    let v = SubspaceBasis::span(&f, 4, [vec![1, 0, 0, 0], vec![0, 1, 0, 0]]);
    assert!(matches!(
        normalize_submodule(&v, &k, 2, 2, true),
        Err(CmError::Precondition(_))
    ));
    // Without the density check the rank sweep runs dry.
    match normalize_submodule(&v, &k, 2, 2, false) {
        Err(CmError::FieldTooSmall {
            suggested_degree, ..
        }) => assert_eq!(suggested_degree, 2),
        other => panic!("expected field-too-small, got {other:?}"),
    }
}

#[test]
fn extract_free_basis_examples() {
    let f = fld(3, 1);
    let a = SemisimpleAlgebraModel::new(f.clone(), &[(1, 1), (1, 1)]).unwrap();
    let full = SubspaceBasis::full(2 * 2);
    let es = extract_free_basis(&full, a.algebra(), &a, 2, 0).unwrap();
    assert_eq!(es, vec![vec![1, 1, 0, 0], vec![0, 0, 1, 1]]);

    let v = SubspaceBasis::span(&f, 2, [vec![1, 0], vec![0, 1], vec![1, 1]]);
    let k = closure_in(a.ambient(), &[]);
    let v = module_closure(&k, v.rows(), 1).unwrap();
    let es = extract_free_basis(&v, &k, &a, 1, 0).unwrap();
    assert!(is_free_basis(&a, &es, 1));

    // Only the unit-free line (1, 0): no basis exists.
    let v = SubspaceBasis::span(&f, 2, [vec![1, 0]]);
    assert!(extract_free_basis(&v, &k, &a, 1, 0).is_err());
}

#[test]
fn extract_free_basis_random_over_f4() {
    let f = fld(2, 2);
    let a = SemisimpleAlgebraModel::new(f.clone(), &[(2, 1), (1, 1)]).unwrap();
    let amb = a.ambient().clone();
    let c = embedded_extension(&f, 2);
    let b = a
        .subalgebra(&[amb.from_blocks(&[c, Matrix::zeros(1, 1)])])
        .unwrap();
    assert!(is_dense(&b, &a).unwrap());
    let n = 2;
    let d = amb.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut trials = 0;
    while trials < 100 {
        let gens: Vec<Vec<Elem>> = (0..2)
            .map(|_| (0..n * d).map(|_| rng.gen_range(0..f.order())).collect())
            .collect();
        let v = module_closure(&b, &gens, n).unwrap();
        match extract_free_basis(&v, &b, &a, n, trials) {
            Ok(es) => {
                assert!(is_free_basis(&a, &es, n));
                assert!(es.iter().all(|e| v.contains(&f, e)));
                trials += 1;
            }
            Err(CmError::Precondition(_)) => continue,
            Err(e) => panic!("{e}"),
        }
    }
}

#[test]
fn complete_to_free_rank_examples() {
    let c = complete_to_free_rank(&[1, 2], &[1, 2]).unwrap();
    assert_eq!(c.r, 1);
    let c = complete_to_free_rank(&[1, 2], &[3, 3]).unwrap();
    assert_eq!((c.r, c.complement.clone()), (3, vec![0, 3]));
    assert!(complete_to_free_rank(&[1], &[1, 2]).is_err());
    assert!(complete_to_free_rank(&[0], &[1]).is_err());

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..100 {
        let len = rng.gen_range(1..5);
        let ns: Vec<usize> = (0..len).map(|_| rng.gen_range(1..5)).collect();
        let ms: Vec<usize> = (0..len).map(|_| rng.gen_range(0..12)).collect();
        let c = complete_to_free_rank(&ns, &ms).unwrap();
        let brute = (0..)
            .find(|r| ns.iter().zip(&ms).all(|(n, m)| r * n >= *m))
            .unwrap();
        assert_eq!(c.r, brute);
        assert!(ns.iter().zip(&ms).all(|(n, m)| c.r * n >= *m));
        if c.r > 0 {
            assert!(ns.iter().zip(&ms).any(|(n, m)| (c.r - 1) * n < *m));
        }
    }
}

fn curve(
    branches: usize,
    n: usize,
    gens: &[(&str, Vec<Vec<(usize, Vec<i64>)>>)],
) -> SingularitySpec {
    SingularitySpec {
        field: FieldSpec {
            characteristic: 5,
            degree: 1,
        },
        branches,
        truncation: n,
        generators: gens
            .iter()
            .map(|(k, v)| (k.to_string(), v.clone()))
            .collect(),
    }
}

#[test]
fn sandwich_examples() {
    let cusp = curve(
        1,
        10,
        &[
            ("x", vec![vec![(2, vec![1])]]),
            ("y", vec![vec![(3, vec![1])]]),
        ],
    );
    let base = build_singularity(&cusp).unwrap();
    let amb = &base.ambient;
    let f = amb.field();
    let l0 = derive_overring(&base, OverringKind::Lambda0, None).unwrap();

    let already = sandwich_form(base.lambda.basis(), &base, &l0, 1, 0).unwrap();
    assert!(already.identity);
    assert_eq!(&already.module, base.lambda.basis());

    let mut g = amb.monomial_vec(0, 2);
    g[amb.index(0, 3)] = 1;
    let m = module_closure(&base.lambda, &[g], 1).unwrap();
    let s = sandwich_form(&m, &base, &l0, 1, 0).unwrap();
    assert!(!s.identity);
    assert!(s.module.contains(f, &amb.one_vec()));
    assert!(s.module.contains_space(f, base.lambda.basis()));
    assert!(is_module(&base.lambda, &s.module));

    let node = curve(
        2,
        6,
        &[
            ("x", vec![vec![(1, vec![1])], vec![]]),
            ("y", vec![vec![], vec![(1, vec![1])]]),
        ],
    );
    let base = build_singularity(&node).unwrap();
    let amb = &base.ambient;
    let l0 = derive_overring(&base, OverringKind::Lambda0, None).unwrap();
    let mut g = amb.indicator_vec(0);
    g[amb.index(1, 1)] = 1;
    let m = module_closure(&base.lambda, &[g], 1).unwrap();
    let s = sandwich_form(&m, &base, &l0, 1, 0).unwrap();
    assert!(s.module.contains_space(f, base.lambda.basis()));
    assert!(l0.basis().contains_space(f, &s.module));
    assert!(is_module(&base.lambda, &s.module));
}

#[test]
fn sandwich_rank_two_unit_change() {
    // m = Lambda^2 twisted by an invertible matrix over Lambda_0.
    let cusp = curve(
        1,
        9,
        &[
            ("x", vec![vec![(2, vec![1])]]),
            ("y", vec![vec![(3, vec![1])]]),
        ],
    );
    let base = build_singularity(&cusp).unwrap();
    let amb = &base.ambient;
    let f = amb.field();
    let l0 = derive_overring(&base, OverringKind::Lambda0, None).unwrap();
    let d = amb.total_dim();
    let one = amb.one_vec();
    let t = amb.t_vec();
    let row = |a: &[Elem], b: &[Elem]| -> Vec<Elem> { [a, b].concat() };
    let p = [row(&one, &t), row(&t, &amb.add_vec(&one, &t))];
    let mut gens = Vec::new();
    for x in base.lambda.basis().rows() {
        for pj in &p {
            gens.push(amb.act_on_module(x, pj));
        }
    }
    let m = SubspaceBasis::span(f, 2 * d, gens);
    assert!(is_module(&base.lambda, &m));
    let s = sandwich_form(&m, &base, &l0, 2, 0).unwrap();
    assert_eq!(s.module.dim(), m.dim());
    assert_eq!(s.truncation_loss, 0);
    let nl = module_closure(
        &base.lambda,
        &[row(&one, &amb.zero_vec()), row(&amb.zero_vec(), &one)],
        2,
    )
    .unwrap();
    assert!(s.module.contains_space(f, &nl));
}

#[test]
fn dense_pair_on_branch_rings() {
    let t37 = crate::singlab::build_standard(
        crate::singlab::StandardKind::Tpq,
        3,
        7,
        None,
        FieldSpec {
            characteristic: 5,
            degree: 1,
        },
    )
    .unwrap();
    let base = build_singularity(&t37).unwrap();
    let l0 = derive_overring(&base, OverringKind::Lambda0, None).unwrap();
    assert!(is_dense_pair(&base.lambda, &l0).unwrap());
}

#[test]
fn escalation_recovers_small_field_failures() {
    let f = fld(2, 1);
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut escalated = 0;
    for trial in 0..400 {
        let n = 1 + trial % 3;
        let m = 1 + trial % 5;
        let (b, v) = random_dense_instance(&f, &mut rng, n, m);
        let direct = normalize_submodule(&v, &b, n, m, false);
        let (norm, big) = normalize_escalating(&v, &b, n, m, false).unwrap();
        match direct {
            Ok(d) => {
                assert_eq!(big, f);
                assert_eq!(d, norm);
            }
            Err(CmError::FieldTooSmall { .. }) => {
                assert!(big.degree() > 1);
                let emb = FieldEmbedding::new(&f, &big).unwrap();
                let v_big =
                    SubspaceBasis::span(&big, n * m, v.rows().iter().map(|r| emb.map_vec(r)));
                assert!(norm.verify(&big, &v_big));
                escalated += 1;
            }
            Err(e) => panic!("{e}"),
        }
    }
    assert!(escalated > 0);

    // Scalars in M_2 are not dense: no extension helps, and the error says so.
    let a = SemisimpleAlgebraModel::matrix_algebra(f.clone(), 2).unwrap();
    let k = closure_in(a.ambient(), &[]);
    let v = SubspaceBasis::span(&f, 4, [vec![1, 0, 0, 0], vec![0, 1, 0, 0]]);
    match normalize_escalating(&v, &k, 2, 2, false) {
        Err(CmError::FieldTooSmall {
            suggested_degree,
            reason,
        }) => {
            assert_eq!(suggested_degree, MAX_ESCALATION_DEGREE);
            assert!(reason.contains("F_2^8"));
        }
        other => panic!("expected field-too-small, got {other:?}"),
    }
}
