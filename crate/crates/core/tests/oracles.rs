//! Frozen reference values for small schemes, each checked against an
//! independent computation (brute-force counting, closed forms, or a second
//! algorithm) rather than against the code under test alone.

use bose_mesner::catalog::{build_cyclotomic, build_product, build_schurian, complete_scheme, petersen_scheme, ProductKind};
use bose_mesner::exact::{rat, IntMatrix, Surd};
use bose_mesner::fusion::{
    amorphic_normal_form, bannai_muzychuk_check, enumerate_admissible_partitions, fuse_direct, idempotent_matching,
    is_amorphic, AdmissiblePartition,
};
use bose_mesner::generator::{
    check_theorem_4class, check_theorem_fission, classify_skew_4class, find_generating_unions, generates,
    predict_fission_table, align_tables,
};
use bose_mesner::scheme::{intersection_numbers, symmetrize, verify_axioms, ClassKind, ColorMatrix, Scheme, SchemeError};
use bose_mesner::spectra::{character_table, distinct_eigenvalue_count, intersection_matrices, union_spectrum, SpectralOptions};
use bose_mesner::srg::{connectivity_classification, srg_eigen, srg_params_from_scheme, Connectivity};
use num_complex::Complex64;

const PENTAGON: &str = "5 2\n0 1 2 2 1\n1 0 1 2 2\n2 1 0 1 2\n2 2 1 0 1\n1 2 2 1 0\n";

fn pentagon() -> Scheme {
    verify_axioms(&ColorMatrix::parse(PENTAGON).unwrap()).unwrap()
}

fn qr7() -> Scheme {
    // Nonzero squares mod 7 are {1, 2, 4}.
    verify_axioms(&ColorMatrix::from_fn(7, 2, |x, y| [0, 1, 1, 2, 1, 2, 2][(y + 7 - x) % 7]).unwrap()).unwrap()
}

fn opts() -> SpectralOptions {
    SpectralOptions::default()
}

fn brute_tensor(s: &Scheme) -> Vec<Vec<Vec<u64>>> {
    let (n, d) = (s.n(), s.d());
    let c = s.color();
    let mut t = vec![vec![vec![u64::MAX; d + 1]; d + 1]; d + 1];
    for x in 0..n {
        for y in 0..n {
            let l = c.get(x, y);
            let mut counts = vec![vec![0u64; d + 1]; d + 1];
            for z in 0..n {
                counts[c.get(x, z)][c.get(z, y)] += 1;
            }
            for i in 0..=d {
                for j in 0..=d {
                    if t[i][j][l] == u64::MAX {
                        t[i][j][l] = counts[i][j];
                    }
                    assert_eq!(t[i][j][l], counts[i][j], "p[{i}][{j}]^{l} not constant");
                }
            }
        }
    }
    t
}

fn close(a: Complex64, b: Complex64) -> bool {
    (a - b).norm() < 1e-9
}

#[test]
fn pentagon_file_and_tensor() {
    let c = ColorMatrix::parse(PENTAGON).unwrap();
    assert_eq!((c.n(), c.d()), (5, 2));
    let s = pentagon();
    assert_eq!(s.valencies(), &[1, 2, 2]);
    assert!(s.is_symmetric());
    let t = s.tensor();
    assert_eq!((t.get(1, 1, 2), t.get(1, 1, 1)), (1, 0));
    let b1 = &intersection_matrices(t).unwrap()[1];
    assert_eq!(b1.rows, vec![vec![0, 2, 0], vec![1, 0, 1], vec![0, 1, 1]]);
    let (sym, _) = symmetrize(&s).unwrap();
    assert_eq!(sym.color(), s.color());
}

#[test]
fn parse_rejects_out_of_range_entry() {
    let bad = PENTAGON.replacen("0 1 2 2 1", "0 1 3 2 1", 1);
    assert!(matches!(ColorMatrix::parse(&bad), Err(SchemeError::OutOfRangeEntry { value: 3, d: 2, .. })));
}

#[test]
fn perturbed_pentagon_is_inconsistent() {
    // Flip (0,1) from 1 to 2 and restore symmetry so only the counting axiom can fail.
    let mut rows: Vec<Vec<usize>> = (0..5).map(|x| (0..5).map(|y| pentagon().color().get(x, y)).collect()).collect();
    rows[0][1] = 2;
    rows[1][0] = 2;
    let err = verify_axioms(&ColorMatrix::from_rows(2, &rows).unwrap()).unwrap_err();
    assert!(matches!(err, SchemeError::InconsistentIntersectionNumber { .. }), "{err}");
}

#[test]
fn tournament_on_seven() {
    let s = qr7();
    assert_eq!(s.class_kind(), ClassKind::SkewSymmetric);
    assert_eq!(s.transpose_map(), &[0, 2, 1]);
    let t = brute_tensor(&s);
    for i in 0..3 {
        for j in 0..3 {
            for l in 0..3 {
                assert_eq!(s.tensor().get(i, j, l), t[i][j][l]);
            }
        }
    }
    let (sym, _) = symmetrize(&s).unwrap();
    assert_eq!(sym.d(), 1);
    assert_eq!(sym.valencies(), &[1, 6]);

    let e = character_table(&s, &opts()).unwrap();
    assert_eq!(e.multiplicities, vec![1, 3, 3]);
    let rho = Complex64::new(-0.5, 7f64.sqrt() / 2.0);
    assert_eq!(e.exact[0][1], Some(Surd::from_int(3)));
    let rows: Vec<[Complex64; 2]> = (1..3).map(|j| [e.p[j][1], e.p[j][2]]).collect();
    assert!(rows.iter().any(|r| close(r[0], rho) && close(r[1], rho.conj())));
    assert!(rows.iter().any(|r| close(r[0], rho.conj()) && close(r[1], rho)));
    let exact = e.exact[1][1].as_ref().unwrap();
    assert!(exact.to_string().contains("sqrt(-7)"), "{exact}");
}

#[test]
fn complete_graph_identities() {
    for n in [2usize, 3, 7] {
        let k = complete_scheme(n).unwrap();
        let t = k.tensor();
        assert_eq!((t.get(1, 1, 0), t.get(1, 1, 1)), (n as u64 - 1, n as u64 - 2));
        let b = &intersection_matrices(t).unwrap()[1];
        assert_eq!(b.rows, vec![vec![0, n as i64 - 1], vec![1, n as i64 - 2]]);
        let e = character_table(&k, &opts()).unwrap();
        assert_eq!(e.multiplicities, vec![1, n as u64 - 1]);
        assert_eq!(e.exact[1], vec![Some(Surd::from_int(1)), Some(Surd::from_int(-1))]);
        assert_eq!(distinct_eigenvalue_count(&k, &[1]).unwrap(), 2);
        let spec = union_spectrum(&e, &[1]).unwrap();
        assert_eq!(spec.iter().map(|u| (u.exact.clone().unwrap(), u.multiplicity)).collect::<Vec<_>>(), vec![
            (Surd::from_int(n as i64 - 1), 1),
            (Surd::from_int(-1), n as u64 - 1)
        ]);
        let search = find_generating_unions(&k).unwrap();
        assert_eq!(search.generating, vec![vec![1]]);
    }
}

#[test]
fn petersen_table_and_spectra() {
    let p = petersen_scheme().unwrap();
    let e = character_table(&p, &opts()).unwrap();
    assert_eq!(e.multiplicities, vec![1, 5, 4]);
    let want = [[1, 3, 6], [1, 1, -2], [1, -2, 1]];
    for (row, w) in e.exact.iter().zip(want) {
        let got: Vec<Surd> = row.iter().map(|x| x.clone().unwrap()).collect();
        assert_eq!(got, w.iter().map(|&v| Surd::from_int(v)).collect::<Vec<_>>());
    }
    let spec = union_spectrum(&e, &[2]).unwrap();
    let mut pairs: Vec<(String, u64)> = spec.iter().map(|u| (u.exact.clone().unwrap().to_string(), u.multiplicity)).collect();
    pairs.sort();
    assert_eq!(pairs, vec![("-2".to_string(), 5), ("1".to_string(), 4), ("6".to_string(), 1)]);
    let params = srg_params_from_scheme(&p, &[1]).unwrap();
    assert_eq!((params.n, params.k, params.lambda, params.mu), (10, 3, 0, 1));
    let eig = srg_eigen(10, 3, 0, 1).unwrap();
    assert_eq!((eig.r, eig.s, eig.m1, eig.m2), (Surd::from_int(1), Surd::from_int(-2), 5, 4));
    let c = connectivity_classification(&p, &[1], &opts()).unwrap();
    assert_eq!(c.verdict, Connectivity::Connected);
}

#[test]
fn cyclotomic_thirteen_four() {
    let s = build_cyclotomic(13, 4).unwrap();
    assert_eq!(s.n(), 13);
    assert_eq!(s.valencies(), &[1, 3, 3, 3, 3]);
    assert_eq!(s.class_kind(), ClassKind::SkewSymmetric);
    // Round trip through the file format.
    let again = ColorMatrix::parse(&s.color().to_text()).unwrap();
    assert_eq!(&again, s.color());
    let t = brute_tensor(&s);
    assert_eq!(intersection_numbers(&s), *s.tensor());
    for i in 0..5 {
        for j in 0..5 {
            for l in 0..5 {
                assert_eq!(s.tensor().get(i, j, l), t[i][j][l]);
            }
        }
    }
    let e = character_table(&s, &opts()).unwrap();
    assert_eq!(e.multiplicities, vec![1, 3, 3, 3, 3]);

    // Symmetrization is the Paley graph on 13 points.
    let (sym, _) = symmetrize(&s).unwrap();
    assert_eq!(sym.valencies(), &[1, 6, 6]);
    let p13 = srg_params_from_scheme(&sym, &[1]).unwrap();
    assert_eq!((p13.k, p13.lambda, p13.mu), (6, 2, 3));
    assert!(p13.conference);
    let pi = AdmissiblePartition::new(&s, vec![vec![1, 2], vec![3, 4]]).unwrap();
    let fused = fuse_direct(&s, &pi).unwrap();
    assert_eq!(fused.valencies(), &[1, 6, 6]);
    assert!(bannai_muzychuk_check(&e, &pi).unwrap().is_scheme);

    let c = connectivity_classification(&sym, &[1], &opts()).unwrap();
    assert_eq!(c.verdict, Connectivity::Connected);
    assert!(c.components_match_multiplicity && c.minus_one_matches == Some(true));

    // {1,2} is a transpose pair, so its union is the Paley graph.
    assert_eq!(distinct_eigenvalue_count(&s, &[1, 2]).unwrap(), 3);
    assert_eq!(union_spectrum(&e, &[1, 2]).unwrap().len(), 3);
    // {1,3} crosses both transpose pairs.
    let crossing = distinct_eigenvalue_count(&s, &[1, 3]).unwrap();
    assert!((4..=5).contains(&crossing));
    assert_eq!(union_spectrum(&e, &[1, 3]).unwrap().len(), crossing);
    // A single class sees all five Gauss periods.
    assert_eq!(distinct_eigenvalue_count(&s, &[1]).unwrap(), 5);
    assert_eq!(union_spectrum(&e, &[1]).unwrap().len(), 5);

    let search = find_generating_unions(&s).unwrap();
    assert!(search.generating.iter().any(|l| l.len() <= 2));
    let v = check_theorem_4class(&s).unwrap();
    assert_eq!(v.holds, Some(true));
    assert!([2, 3, 4].contains(&v.evidence["i"].as_u64().unwrap()));
    assert_eq!(v.evidence["eigen_count"], 5);
    let c = classify_skew_4class(&s, &opts()).unwrap();
    assert!((1..=3).contains(&c.skew_type));
    assert!(c.formula_residual < 1e-8);
    assert!(idempotent_matching(&s, &opts()).is_err());
}

#[test]
fn admissible_partition_counts() {
    let brute = |s: &Scheme| {
        let d = s.d();
        let mut count = 0;
        // All set partitions of 1..=d by restricted growth strings.
        let mut a = vec![0usize; d];
        loop {
            let blocks: Vec<Vec<usize>> = (0..=*a.iter().max().unwrap())
                .map(|b| (0..d).filter(|&i| a[i] == b).map(|i| i + 1).collect())
                .collect();
            let closed = blocks.iter().all(|b| {
                let t: Vec<usize> = b.iter().map(|&i| s.transpose_of(i)).collect();
                let mut t = t;
                t.sort();
                blocks.contains(&t)
            });
            count += usize::from(closed);
            let mut i = d - 1;
            loop {
                let prefix_max = a[..i].iter().copied().max().unwrap_or(0);
                if i > 0 && a[i] <= prefix_max {
                    a[i] += 1;
                    for x in a.iter_mut().skip(i + 1) {
                        *x = 0;
                    }
                    break;
                }
                if i == 0 {
                    return count;
                }
                i -= 1;
            }
        }
    };
    assert_eq!(enumerate_admissible_partitions(&pentagon()).unwrap().len(), 2);
    assert_eq!(enumerate_admissible_partitions(&qr7()).unwrap().len(), 2);
    let one_pair = build_product(&build_cyclotomic(5, 2).unwrap(), &build_cyclotomic(3, 2).unwrap(), ProductKind::Wreath).unwrap();
    assert_eq!(one_pair.nonsymmetric_pairs().len(), 1);
    let n = enumerate_admissible_partitions(&one_pair).unwrap().len();
    assert_eq!(n, brute(&one_pair));
    assert!(n < 15);
    let s13 = build_cyclotomic(13, 4).unwrap();
    assert_eq!(enumerate_admissible_partitions(&s13).unwrap().len(), brute(&s13));
}

#[test]
fn amorphic_gf16() {
    let s = build_cyclotomic(16, 3).unwrap();
    assert_eq!(s.valencies(), &[1, 5, 5, 5]);
    assert!(is_amorphic(&s).unwrap().amorphic);
    let nf = amorphic_normal_form(&character_table(&s, &opts()).unwrap()).unwrap();
    assert_eq!(nf.table.len(), 4);
    let search = find_generating_unions(&s).unwrap();
    assert!(search.generating.is_empty());
    for l in [vec![1], vec![1, 2]] {
        assert!(!generates(&s, &l).unwrap().generates);
    }
    // Symmetric 2-class schemes are always amorphic.
    assert!(is_amorphic(&pentagon()).unwrap().amorphic);
    assert!(is_amorphic(&petersen_scheme().unwrap()).unwrap().amorphic);
    let nine = build_cyclotomic(9, 4).unwrap();
    assert!(is_amorphic(&nine).unwrap().amorphic);
    assert!(find_generating_unions(&nine).unwrap().generating.is_empty());
}

#[test]
fn pentagon_generation_and_srg() {
    let s = pentagon();
    let r = generates(&s, &[1]).unwrap();
    assert!(r.generates);
    assert_eq!(r.eigen_count, 3);
    assert_eq!(distinct_eigenvalue_count(&s, &[1]).unwrap(), 3);
    let p = srg_params_from_scheme(&s, &[1]).unwrap();
    assert_eq!((p.n, p.k, p.lambda, p.mu, p.m1, p.m2), (5, 2, 0, 1, 2, 2));
    assert!(p.conference);
    let e = srg_eigen(5, 2, 0, 1).unwrap();
    assert_eq!(e.r.to_complex().re, (5f64.sqrt() - 1.0) / 2.0);
    assert_eq!(e.r, Surd::from_rational(rat(-1) / rat(2)) + Surd::sqrt_of(&rat(5)).unwrap().scale(&(rat(1) / rat(2))));
}

#[test]
fn two_cliques() {
    let s = build_product(&complete_scheme(2).unwrap(), &complete_scheme(5).unwrap(), ProductKind::Wreath).unwrap();
    let within = (1..=2).find(|&i| s.valencies()[i] == 4).unwrap();
    let c = connectivity_classification(&s, &[within], &opts()).unwrap();
    assert_eq!(c.verdict, Connectivity::DisjointCliques { count: 2, size: 5 });
    assert!(c.components_match_multiplicity);
    assert_eq!(c.minus_one_matches, Some(true));
    assert!(c.spectrum_is_k_and_minus_one);
    let p = srg_params_from_scheme(&s, &[within]).unwrap();
    assert!(!p.connected);
    assert_eq!(p.mu, 0);
}

#[test]
fn fission_prediction_for_the_tournament() {
    let s = qr7();
    let m = idempotent_matching(&s, &opts()).unwrap();
    let predicted = predict_fission_table(&m.sym_table, &m.class_map, m.pair, m.split_row, &rat(-7)).unwrap();
    let computed = character_table(&s, &opts()).unwrap();
    let dev = align_tables(&predicted, &computed).unwrap();
    assert!(dev < 1e-8, "deviation {dev}");
    let v = check_theorem_fission(&s, &opts()).unwrap();
    assert_eq!(v.holds, Some(true));
    assert_eq!(v.evidence["a"], "-7");
}

#[test]
fn schurian_examples() {
    let c5 = build_schurian(5, &[vec![1, 2, 3, 4, 0]]).unwrap();
    // The regular action is thin; its symmetrization is the pentagon.
    assert_eq!(c5.d(), 4);
    let (sym, _) = symmetrize(&c5).unwrap();
    assert_eq!(sym.canonicalize().0.color(), pentagon().canonicalize().0.color());
    let d5 = build_schurian(5, &[vec![1, 2, 3, 4, 0], vec![0, 4, 3, 2, 1]]).unwrap();
    assert_eq!(d5.color(), pentagon().canonicalize().0.color());
    let f21 = build_schurian(7, &[(0..7).map(|x| (x + 1) % 7).collect(), (0..7).map(|x| 2 * x % 7).collect()]).unwrap();
    assert_eq!(f21.class_kind(), ClassKind::SkewSymmetric);
    assert_eq!(f21.color(), qr7().canonicalize().0.color());
    let s5 = build_schurian(5, &[vec![1, 2, 3, 4, 0], vec![1, 0, 2, 3, 4]]).unwrap();
    assert_eq!(s5.d(), 1);
}

#[test]
fn integer_matrix_product_matches_tensor() {
    // B_i B_j = Σ_l p_{ij}^l B_l on the 13-point scheme.
    let s = build_cyclotomic(13, 4).unwrap();
    let mats = intersection_matrices(s.tensor()).unwrap();
    let ints: Vec<IntMatrix> = mats.iter().map(|m| m.to_int_matrix()).collect();
    for i in 0..5 {
        for j in 0..5 {
            let prod = ints[i].mul(&ints[j]);
            let mut sum = IntMatrix::zeros(5);
            for l in 0..5 {
                for _ in 0..s.tensor().get(i, j, l) {
                    sum.add_assign(&ints[l]);
                }
            }
            assert_eq!(prod, sum);
            assert_eq!(ints[i].mul(&ints[j]), ints[j].mul(&ints[i]));
        }
    }
}
