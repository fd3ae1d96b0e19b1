//! The nine acceptance criteria. Each prints one PASS/FAIL line; the test
//! fails afterwards if any of them failed.

use bose_mesner::catalog::{build_cyclotomic, build_product, complete_scheme, default_catalog, petersen_scheme, CatalogEntry, ProductKind};
use bose_mesner::exact::{rat, Surd};
use bose_mesner::fusion::{bannai_muzychuk_check, enumerate_admissible_partitions, fuse_direct, idempotent_matching};
use bose_mesner::generator::{
    align_tables, all_unions, check_theorem_4class, check_theorem_skew, classify_skew_4class, generates,
    predict_fission_table, verify_witnesses, WITNESS_CHECK_MAX_POINTS,
};
use bose_mesner::scheme::{verify_axioms, ClassKind, ColorMatrix};
use bose_mesner::spectra::{character_table, SpectralOptions};
use bose_mesner::srg::{connectivity_classification, params_from_eigen, srg_eigen, srg_params_from_scheme, Connectivity};
use std::process::Command;
use std::time::Instant;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn opts() -> SpectralOptions {
    SpectralOptions::default()
}

fn four_class_sweep(catalog: &[CatalogEntry]) -> Outcome {
    let start = Instant::now();
    let mut instances = Vec::new();
    let mut one_pair = 0;
    for e in catalog.iter().filter(|e| e.scheme.d() == 4 && !e.scheme.is_symmetric()) {
        let v = check_theorem_4class(&e.scheme).map_err(|err| format!("{}: {err}", e.id))?;
        ensure(v.applicable && v.holds == Some(true), || format!("{}: {}", e.id, v.evidence))?;
        let i = v.evidence["i"].as_u64().unwrap_or(0);
        ensure((2..=4).contains(&i), || format!("{}: chosen i = {i}", e.id))?;
        ensure(v.evidence["eigen_count"] == 5, || format!("{}: eigen_count {}", e.id, v.evidence["eigen_count"]))?;
        if e.scheme.nonsymmetric_pairs().len() == 1 && e.id.starts_with("wreath") {
            one_pair += 1;
        }
        instances.push(e.id.as_str());
    }
    let elapsed = start.elapsed().as_secs_f64();
    ensure(instances.len() >= 6, || format!("only {} instances", instances.len()))?;
    ensure(instances.contains(&"cyclotomic-13-4"), || "cyclotomic-13-4 missing".into())?;
    ensure(one_pair >= 1, || "no one-pair wreath instance".into())?;
    ensure(elapsed < 10.0, || format!("took {elapsed:.2}s"))?;
    Ok(format!("{} instances ({one_pair} one-pair wreaths), {elapsed:.2}s", instances.len()))
}

fn dual_generation_oracle(catalog: &[CatalogEntry]) -> Outcome {
    let (mut unions, mut witnessed) = (0, 0);
    for e in catalog.iter().filter(|e| e.scheme.d() <= 6) {
        let d = e.scheme.d();
        for lambda in all_unions(d) {
            let r = generates(&e.scheme, &lambda).map_err(|err| format!("{} {lambda:?}: {err}", e.id))?;
            ensure((r.eigen_count == d + 1) == (r.span_rank == d + 1), || {
                format!("{} {lambda:?}: eigen_count {} vs span_rank {}", e.id, r.eigen_count, r.span_rank)
            })?;
            unions += 1;
            if r.generates && e.scheme.n() <= WITNESS_CHECK_MAX_POINTS {
                ensure(verify_witnesses(&e.scheme, &r) == Some(true), || format!("{} {lambda:?}: witness mismatch", e.id))?;
                witnessed += 1;
            }
        }
    }
    Ok(format!("{unions} unions agree, {witnessed} witness sets reproduce A_i"))
}

fn fusion_cross_oracle(catalog: &[CatalogEntry]) -> Outcome {
    let mut checks = 0;
    for e in catalog.iter().filter(|e| e.scheme.d() <= 5) {
        let table = character_table(&e.scheme, &opts()).map_err(|err| format!("{}: {err}", e.id))?;
        for pi in enumerate_admissible_partitions(&e.scheme).map_err(|err| err.to_string())? {
            let bm = bannai_muzychuk_check(&table, &pi).map_err(|err| format!("{}: {err}", e.id))?;
            let direct = fuse_direct(&e.scheme, &pi).is_ok();
            ensure(bm.is_scheme == direct, || format!("{} {:?}: eigenvalue test {} vs direct {direct}", e.id, pi.blocks(), bm.is_scheme))?;
            checks += 1;
        }
    }
    ensure(checks >= 200, || format!("only {checks} partitions"))?;
    Ok(format!("{checks} partitions agree"))
}

fn row_sums(catalog: &[CatalogEntry]) -> Outcome {
    let (mut exact_rows, mut float_rows, mut worst) = (0, 0, 0.0f64);
    for e in catalog {
        let t = character_table(&e.scheme, &opts()).map_err(|err| format!("{}: {err}", e.id))?;
        for j in 1..t.p.len() {
            if t.exact[j].iter().all(|x| x.is_some()) {
                let sum = t.exact[j].iter().fold(Surd::zero(), |acc, x| acc + x.clone().unwrap());
                ensure(sum.is_zero(), || format!("{} row {j}: exact sum {sum}", e.id))?;
                exact_rows += 1;
            } else {
                let (re, im) = t.p[j].iter().fold((0.0, 0.0), |(a, b), z| (a + z.re, b + z.im));
                let norm = re.hypot(im);
                ensure(norm < 1e-8, || format!("{} row {j}: |sum| = {norm:e}", e.id))?;
                worst = worst.max(norm);
                float_rows += 1;
            }
        }
    }
    Ok(format!("{exact_rows} exact rows vanish, {float_rows} floating rows within {worst:.1e}"))
}

fn srg_identities() -> Outcome {
    for (name, (n, k, lambda, mu)) in [("pentagon", (5u64, 2u64, 0u64, 1u64)), ("Petersen", (10, 3, 0, 1))] {
        let eig = srg_eigen(n, k, lambda, mu).map_err(|err| err.to_string())?;
        let (l2, m2) = params_from_eigen(k, &eig.r, &eig.s);
        ensure(l2 == Surd::from_int(lambda as i64) && m2 == Surd::from_int(mu as i64), || format!("{name}: ({l2}, {m2})"))?;
        ensure(eig.m1 + eig.m2 == n - 1, || format!("{name}: multiplicities {} + {}", eig.m1, eig.m2))?;
        let trace = Surd::from_int(k as i64) + eig.r.scale(&rat(eig.m1 as i64)) + eig.s.scale(&rat(eig.m2 as i64));
        ensure(trace.is_zero(), || format!("{name}: trace {trace}"))?;
    }
    let paley5 = build_cyclotomic(5, 2).map_err(|err| err.to_string())?;
    let p = srg_params_from_scheme(&paley5, &[1]).map_err(|err| err.to_string())?;
    ensure(p.conference && p.m1 == 2 && p.m2 == 2, || format!("Paley(5): conference {} m = ({}, {})", p.conference, p.m1, p.m2))?;
    let petersen = petersen_scheme().map_err(|err| err.to_string())?;
    let pp = srg_params_from_scheme(&petersen, &[1]).map_err(|err| err.to_string())?;
    ensure((pp.k, pp.lambda, pp.mu) == (3, 0, 1), || "Petersen parameters from the scheme".into())?;

    let two_k5 = build_product(&complete_scheme(2).unwrap(), &complete_scheme(5).unwrap(), ProductKind::Wreath).map_err(|err| err.to_string())?;
    let within = (1..=2).find(|&i| two_k5.valencies()[i] == 4).ok_or("no valency-4 class")?;
    let c = connectivity_classification(&two_k5, &[within], &opts()).map_err(|err| err.to_string())?;
    let disconnected = matches!(c.verdict, Connectivity::DisjointCliques { count: 2, size: 5 });
    ensure(disconnected && c.has_minus_one && c.spectrum_is_k_and_minus_one && c.components_match_multiplicity, || format!("2xK5: {c:?}"))?;
    Ok("pentagon and Petersen round-trip; Paley(5) conference m = (2, 2); 2xK5 equivalence holds".into())
}

fn fission_prediction() -> Outcome {
    let qr7 = verify_axioms(&ColorMatrix::from_fn(7, 2, |x, y| [0, 1, 1, 2, 1, 2, 2][(y + 7 - x) % 7]).unwrap()).map_err(|err| err.to_string())?;
    let m = idempotent_matching(&qr7, &opts()).map_err(|err| err.to_string())?;
    let predicted = predict_fission_table(&m.sym_table, &m.class_map, m.pair, m.split_row, &rat(-7)).map_err(|err| err.to_string())?;
    let computed = character_table(&qr7, &opts()).map_err(|err| err.to_string())?;
    let dev = align_tables(&predicted, &computed).ok_or("tables do not align")?;
    ensure(dev < 1e-8, || format!("deviation {dev:e}"))?;
    let rho_im = 7f64.sqrt() / 2.0;
    let has_rho = computed.p.iter().any(|row| (row[1].re + 0.5).abs() < 1e-8 && (row[1].im.abs() - rho_im).abs() < 1e-8);
    ensure(has_rho, || "no (-1 ± i√7)/2 entry".into())?;
    Ok(format!("max deviation {dev:.1e}"))
}

fn skew_types(catalog: &[CatalogEntry]) -> Outcome {
    let mut counts = [0usize; 3];
    for e in catalog.iter().filter(|e| e.scheme.d() == 4 && e.scheme.class_kind() == ClassKind::SkewSymmetric) {
        let c = classify_skew_4class(&e.scheme, &opts()).map_err(|err| format!("{}: {err}", e.id))?;
        ensure((1..=3).contains(&c.skew_type), || format!("{}: type {}", e.id, c.skew_type))?;
        if c.skew_type == 3 {
            ensure(c.radicands.iter().all(|&r| r > 0.0), || format!("{}: radicands {:?}", e.id, c.radicands))?;
        } else {
            ensure(c.formula_residual < 1e-8, || format!("{}: residual {:e}", e.id, c.formula_residual))?;
        }
        ensure(c.property_holds, || format!("{}: eigenvalue-count property fails", e.id))?;
        let v = check_theorem_skew(&e.scheme, &opts()).map_err(|err| err.to_string())?;
        ensure(v.holds == Some(true), || format!("{}: {}", e.id, v.evidence))?;
        counts[c.skew_type as usize - 1] += 1;
    }
    ensure(counts.iter().sum::<usize>() > 0, || "no skew 4-class instances".into())?;
    Ok(format!("type counts {counts:?}"))
}

fn multiplicities(catalog: &[CatalogEntry]) -> Outcome {
    let mut worst = 0.0f64;
    for e in catalog {
        let t = character_table(&e.scheme, &opts()).map_err(|err| format!("{}: {err}", e.id))?;
        for (&raw, &m) in t.raw_multiplicities.iter().zip(&t.multiplicities) {
            ensure((raw - m as f64).abs() < 1e-6, || format!("{}: raw {raw} vs {m}", e.id))?;
            worst = worst.max((raw - m as f64).abs());
        }
        ensure(t.multiplicities.iter().sum::<u64>() == e.scheme.n() as u64, || format!("{}: sum != n", e.id))?;
    }
    Ok(format!("{} schemes, worst rounding {worst:.1e}", catalog.len()))
}

fn catalog_run(workers: &str) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_bmscheme"))
        .args(["--seed", "24301", "--precision", "64", "catalog-run", "--workers", workers])
        .output()
        .map_err(|err| err.to_string())?;
    ensure(out.status.code() == Some(0), || format!("exit {:?}: {}", out.status.code(), String::from_utf8_lossy(&out.stderr)))?;
    Ok(out.stdout)
}

fn determinism() -> Outcome {
    let a = catalog_run("1")?;
    let b = catalog_run("1")?;
    let c = catalog_run("4")?;
    ensure(!a.is_empty(), || "empty output".into())?;
    ensure(a == b, || "two identical runs differ".into())?;
    ensure(a == c, || "1 and 4 workers differ".into())?;
    Ok(format!("{} bytes, {} records identical across runs and worker counts", a.len(), a.iter().filter(|&&b| b == b'\n').count()))
}

#[test]
fn acceptance_criteria() {
    let catalog = default_catalog();
    let results: Vec<(&str, Outcome)> = vec![
        ("T1.4 sweep", four_class_sweep(&catalog)),
        ("generation dual oracle", dual_generation_oracle(&catalog)),
        ("fusion cross-oracle", fusion_cross_oracle(&catalog)),
        ("character-table row sums", row_sums(&catalog)),
        ("SRG identities", srg_identities()),
        ("fission prediction", fission_prediction()),
        ("skew 4-class types", skew_types(&catalog)),
        ("multiplicities", multiplicities(&catalog)),
        ("determinism", determinism()),
    ];
    for (i, (name, r)) in results.iter().enumerate() {
        match r {
            Ok(detail) => println!("criterion {} ({name}): PASS  {detail}", i + 1),
            Err(why) => println!("criterion {} ({name}): FAIL  {why}", i + 1),
        }
    }
    let failed: Vec<usize> = results.iter().enumerate().filter(|(_, (_, r))| r.is_err()).map(|(i, _)| i + 1).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
