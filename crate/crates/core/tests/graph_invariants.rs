//! Spectral facts about symmetric relation unions checked against plain
//! breadth-first search on the union graph.

use bose_mesner::catalog::default_catalog;
use bose_mesner::scheme::Scheme;
use bose_mesner::spectra::{character_table, distinct_eigenvalue_count, union_spectrum, SpectralOptions};
use std::collections::VecDeque;

fn symmetric_unions(s: &Scheme) -> Vec<Vec<usize>> {
    let d = s.d();
    (1u32..(1 << d))
        .map(|mask| (1..=d).filter(|i| mask & (1 << (i - 1)) != 0).collect::<Vec<_>>())
        .filter(|l| l.iter().all(|&i| l.contains(&s.transpose_of(i))))
        .collect()
}

fn bfs(s: &Scheme, lambda: &[usize], start: usize) -> Vec<usize> {
    let n = s.n();
    let mut dist = vec![usize::MAX; n];
    dist[start] = 0;
    let mut queue = VecDeque::from([start]);
    while let Some(x) = queue.pop_front() {
        for y in 0..n {
            if dist[y] == usize::MAX && lambda.contains(&s.color().get(x, y)) {
                dist[y] = dist[x] + 1;
                queue.push_back(y);
            }
        }
    }
    dist
}

/// Component count and, when connected, the diameter.
fn components_and_diameter(s: &Scheme, lambda: &[usize]) -> (usize, Option<usize>) {
    let n = s.n();
    let mut seen = vec![false; n];
    let mut components = 0;
    for x in 0..n {
        if !seen[x] {
            components += 1;
            for (y, d) in bfs(s, lambda, x).into_iter().enumerate() {
                if d != usize::MAX {
                    seen[y] = true;
                }
            }
        }
    }
    let diameter = (components == 1).then(|| (0..n).map(|x| *bfs(s, lambda, x).iter().max().unwrap()).max().unwrap());
    (components, diameter)
}

#[test]
fn symmetric_unions_match_graph_search() {
    let mut checked = 0;
    for entry in default_catalog() {
        let s = &entry.scheme;
        if s.d() > 6 {
            continue;
        }
        let e = character_table(s, &SpectralOptions::default()).unwrap();
        for lambda in symmetric_unions(s) {
            let k: u64 = lambda.iter().map(|&i| s.valencies()[i]).sum();
            let spectrum = union_spectrum(&e, &lambda).unwrap();
            for u in &spectrum {
                assert!(u.value.im.abs() < 1e-8, "{}: {lambda:?} has a non-real eigenvalue", entry.id);
                assert!(u.value.re <= k as f64 + 1e-8, "{}: {lambda:?} eigenvalue above valency", entry.id);
            }
            let top: u64 = spectrum.iter().filter(|u| (u.value.re - k as f64).abs() < 1e-8).map(|u| u.multiplicity).sum();
            let (components, diameter) = components_and_diameter(s, &lambda);
            assert_eq!(top as usize, components, "{}: {lambda:?}", entry.id);
            let count = distinct_eigenvalue_count(s, &lambda).unwrap();
            assert_eq!(count, spectrum.len(), "{}: {lambda:?}", entry.id);
            if let Some(diam) = diameter {
                assert!(count > diam, "{}: {lambda:?} has diameter {diam} but {count} eigenvalues", entry.id);
            }
            checked += 1;
        }
    }
    assert!(checked > 100, "only {checked} unions checked");
}
