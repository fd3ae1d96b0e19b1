//! Strongly regular graphs arising as symmetric relation unions.

use serde::Serialize;
use thiserror::Error;

use crate::exact::{rat, Rational, Surd};
use crate::fusion::{fuse_direct, AdmissiblePartition, FusionError};
use crate::graph::{components, union_adjacency};
use crate::scheme::{Scheme, SchemeError};
use crate::spectra::{character_table, check_union, union_spectrum, SpectraError, SpectralOptions};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SrgError {
    #[error(transparent)]
    Scheme(#[from] SchemeError),
    #[error(transparent)]
    Spectra(#[from] SpectraError),
    #[error(transparent)]
    Fusion(#[from] FusionError),
    #[error("union is not closed under transposition")]
    NotSymmetricUnion,
    #[error("union covers every class, giving a complete graph")]
    Complete,
    #[error(
        "not strongly regular: vertices {x} and {y} ({}) have {found} common neighbours, expected {expected}",
        if *adjacent { "adjacent" } else { "non-adjacent" }
    )]
    NotStronglyRegular { x: usize, y: usize, adjacent: bool, expected: usize, found: usize },
    #[error("infeasible parameters: {0}")]
    InfeasibleParameters(String),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SrgParams {
    pub n: u64,
    pub k: u64,
    pub lambda: u64,
    pub mu: u64,
    pub r: Surd,
    pub s: Surd,
    pub m1: u64,
    pub m2: u64,
    pub connected: bool,
    pub conference: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SrgEigen {
    pub r: Surd,
    pub s: Surd,
    pub m1: u64,
    pub m2: u64,
    pub conference: bool,
}

fn to_u64(q: &Rational) -> Option<u64> {
    if q.is_integer() {
        u64::try_from(q.to_integer()).ok()
    } else {
        None
    }
}

/// Restricted eigenvalues and multiplicities of a connected parameter set.
pub fn srg_eigen(n: u64, k: u64, lambda: u64, mu: u64) -> Result<SrgEigen, SrgError> {
    let infeasible = |m: String| Err(SrgError::InfeasibleParameters(m));
    if mu == 0 {
        return infeasible("μ = 0 describes a disconnected graph".into());
    }
    if k == 0 || k + 1 >= n {
        return infeasible(format!("valency {k} on {n} vertices is empty or complete"));
    }
    let (ni, ki, li, mi) = (n as i128, k as i128, lambda as i128, mu as i128);
    if ki * (ki - li - 1) != mi * (ni - ki - 1) {
        return infeasible(format!("k(k−λ−1) = {} but μ(n−k−1) = {}", ki * (ki - li - 1), mi * (ni - ki - 1)));
    }
    let diff = li - mi;
    let disc = diff * diff + 4 * (ki - mi);
    if disc <= 0 {
        return infeasible("zero discriminant".into());
    }
    let root = Surd::sqrt_of(&rat(disc as i64)).ok_or_else(|| SrgError::InfeasibleParameters("discriminant too large".into()))?;
    let half_diff = Surd::from_rational(Rational::new((diff as i64).into(), 2.into()));
    let half_root = root.scale(&Rational::new(1.into(), 2.into()));
    let r = &half_diff + &half_root;
    let s = &half_diff - &half_root;
    let numer = 2 * ki + (ni - 1) * diff;
    let (m1, m2) = match root.as_rational() {
        Some(sq) => {
            let shift = rat(numer as i64) / sq;
            let m1 = (rat(n as i64 - 1) - &shift) / rat(2);
            let m2 = (rat(n as i64 - 1) + &shift) / rat(2);
            match (to_u64(&m1), to_u64(&m2)) {
                (Some(a), Some(b)) => (a, b),
                _ => return infeasible(format!("multiplicities {m1} and {m2} are not integers")),
            }
        }
        None => {
            if numer != 0 || !(n - 1).is_multiple_of(2) {
                return infeasible("irrational eigenvalues outside the conference case".into());
            }
            ((n - 1) / 2, (n - 1) / 2)
        }
    };
    Ok(SrgEigen { r, s, m1, m2, conference: m1 == m2 })
}

/// `(λ, μ) = (k + rs + r + s, k + rs)`.
pub fn params_from_eigen(k: u64, r: &Surd, s: &Surd) -> (Surd, Surd) {
    let mu = Surd::from_int(k as i64) + r * s;
    let lambda = &(&mu + r) + s;
    (lambda, mu)
}

fn common_neighbour_counts(s: &Scheme, lambda: &[usize]) -> Result<(usize, usize), SrgError> {
    let adj = union_adjacency(s, lambda);
    let n = s.n();
    let mut is_adj = vec![false; n * n];
    for (x, out) in adj.iter().enumerate() {
        for &y in out {
            is_adj[x * n + y] = true;
        }
    }
    let mut expected: [Option<usize>; 2] = [None, None];
    for x in 0..n {
        for y in 0..n {
            if x == y {
                continue;
            }
            let a = is_adj[x * n + y];
            let count = adj[x].iter().filter(|&&z| is_adj[z * n + y]).count();
            let slot = &mut expected[usize::from(a)];
            match *slot {
                None => *slot = Some(count),
                Some(e) if e != count => {
                    return Err(SrgError::NotStronglyRegular { x, y, adjacent: a, expected: e, found: count })
                }
                _ => {}
            }
        }
    }
    Ok((expected[1].unwrap_or(0), expected[0].unwrap_or(0)))
}

fn union_partition(s: &Scheme, lambda: &[usize]) -> Result<(AdmissiblePartition, usize), SrgError> {
    check_union(s.d(), lambda)?;
    let mut inside = vec![false; s.d() + 1];
    for &i in lambda {
        inside[i] = true;
    }
    if (1..=s.d()).any(|i| inside[i] != inside[s.transpose_of(i)]) {
        return Err(SrgError::NotSymmetricUnion);
    }
    let ins: Vec<usize> = (1..=s.d()).filter(|&i| inside[i]).collect();
    let outs: Vec<usize> = (1..=s.d()).filter(|&i| !inside[i]).collect();
    if outs.is_empty() {
        return Err(SrgError::Complete);
    }
    let pi = AdmissiblePartition::new(s, vec![ins.clone(), outs])?;
    let block = pi.color_map()[ins[0]];
    Ok((pi, block))
}

/// Parameters of the graph `(X, R_Λ)` for a transpose-closed `Λ`.
pub fn srg_params_from_scheme(s: &Scheme, lambda: &[usize]) -> Result<SrgParams, SrgError> {
    let (pi, block) = union_partition(s, lambda)?;
    let fused = match fuse_direct(s, &pi) {
        Ok(f) => f,
        Err(FusionError::NotAScheme(_)) => {
            common_neighbour_counts(s, lambda)?;
            return Err(SrgError::InfeasibleParameters("fusion failed but common-neighbour counts are constant".into()));
        }
        Err(e) => return Err(e.into()),
    };
    let other = 3 - block;
    let t = fused.tensor();
    let n = s.n() as u64;
    let k = fused.valencies()[block];
    let lam = t.get(block, block, block);
    let mu = t.get(block, block, other);
    if mu == 0 {
        // Disjoint union of cliques K_{k+1}: eigenvalue k gains the extra
        // components, −1 takes the rest.
        let parts = n / (k + 1);
        return Ok(SrgParams {
            n,
            k,
            lambda: lam,
            mu,
            r: Surd::from_int(k as i64),
            s: Surd::from_int(-1),
            m1: parts - 1,
            m2: n - parts,
            connected: false,
            conference: false,
        });
    }
    let e = srg_eigen(n, k, lam, mu)?;
    Ok(SrgParams { n, k, lambda: lam, mu, r: e.r, s: e.s, m1: e.m1, m2: e.m2, connected: true, conference: e.conference })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Connectivity {
    Connected,
    DisjointCliques { count: usize, size: usize },
    Disconnected { count: usize },
}

#[derive(Clone, Debug, Serialize)]
pub struct ConnectivityReport {
    pub verdict: Connectivity,
    pub components: usize,
    /// Multiplicity of the valency as an eigenvalue of the union.
    pub valency_multiplicity: u64,
    pub has_minus_one: bool,
    pub spectrum_is_k_and_minus_one: bool,
    /// Component count agrees with the valency multiplicity.
    pub components_match_multiplicity: bool,
    /// `−1` is an eigenvalue exactly when the graph is disconnected; `None`
    /// when the union is complete and the equivalence does not apply.
    pub minus_one_matches: Option<bool>,
}

pub fn connectivity_classification(s: &Scheme, lambda: &[usize], opts: &SpectralOptions) -> Result<ConnectivityReport, SrgError> {
    check_union(s.d(), lambda)?;
    let adj = union_adjacency(s, lambda);
    let comps = components(&adj);
    let count = comps.len();
    let is_clique = |c: &Vec<usize>| c.iter().all(|&x| adj[x].len() + 1 == c.len() && adj[x].iter().all(|y| c.contains(y)));
    let verdict = if count == 1 {
        Connectivity::Connected
    } else if comps.iter().all(is_clique) && comps.iter().all(|c| c.len() == comps[0].len()) {
        Connectivity::DisjointCliques { count, size: comps[0].len() }
    } else {
        Connectivity::Disconnected { count }
    };
    let table = character_table(s, opts)?;
    let spectrum = union_spectrum(&table, lambda)?;
    let k: u64 = lambda.iter().map(|&i| s.valencies()[i]).sum();
    let is_value = |ev: &crate::spectra::UnionEigenvalue, v: i64| match &ev.exact {
        Some(x) => *x == Surd::from_int(v),
        None => (ev.value.re - v as f64).abs() <= table.tolerance && ev.value.im.abs() <= table.tolerance,
    };
    let valency_multiplicity = spectrum.iter().filter(|ev| is_value(ev, k as i64)).map(|ev| ev.multiplicity).sum();
    let has_minus_one = spectrum.iter().any(|ev| is_value(ev, -1));
    let spectrum_is_k_and_minus_one = spectrum.iter().all(|ev| is_value(ev, k as i64) || is_value(ev, -1));
    let complete = k + 1 == s.n() as u64;
    Ok(ConnectivityReport {
        verdict,
        components: count,
        valency_multiplicity,
        has_minus_one,
        spectrum_is_k_and_minus_one,
        components_match_multiplicity: valency_multiplicity == count as u64,
        minus_one_matches: (!complete).then_some(has_minus_one == (count > 1)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scheme::{verify_axioms, ColorMatrix};

    fn pentagon() -> Scheme {
        verify_axioms(&ColorMatrix::from_fn(5, 2, |x, y| [0, 1, 2, 2, 1][(y + 5 - x) % 5]).unwrap()).unwrap()
    }

    #[test]
    fn pentagon_is_a_conference_graph() {
        let p = srg_params_from_scheme(&pentagon(), &[1]).unwrap();
        assert_eq!((p.n, p.k, p.lambda, p.mu), (5, 2, 0, 1));
        assert_eq!(p.r.to_string(), "-1/2+1/2*sqrt(5)");
        assert_eq!(p.s.to_string(), "-1/2-1/2*sqrt(5)");
        assert_eq!((p.m1, p.m2), (2, 2));
        assert!(p.conference && p.connected);
        let (l, m) = params_from_eigen(p.k, &p.r, &p.s);
        assert_eq!((l, m), (Surd::from_int(0), Surd::from_int(1)));
    }

    #[test]
    fn petersen_parameters() {
        let e = srg_eigen(10, 3, 0, 1).unwrap();
        assert_eq!((e.r.clone(), e.s.clone(), e.m1, e.m2), (Surd::from_int(1), Surd::from_int(-2), 5, 4));
        assert!(!e.conference);
    }

    #[test]
    fn degenerate_parameters_are_rejected() {
        assert!(matches!(srg_eigen(10, 3, 3, 3), Err(SrgError::InfeasibleParameters(_))));
        assert!(matches!(srg_eigen(10, 3, 1, 1), Err(SrgError::InfeasibleParameters(_))));
        // Feasible identity but fractional multiplicities.
        assert!(matches!(srg_eigen(21, 5, 1, 1), Err(SrgError::InfeasibleParameters(_))));
    }

    #[test]
    fn complete_graph_is_rejected() {
        let k4 = verify_axioms(&ColorMatrix::from_fn(4, 1, |x, y| usize::from(x != y)).unwrap()).unwrap();
        assert_eq!(srg_params_from_scheme(&k4, &[1]), Err(SrgError::Complete));
    }

    #[test]
    fn two_cliques() {
        let s = verify_axioms(
            &ColorMatrix::from_fn(10, 2, |x, y| if x == y { 0 } else if x / 5 == y / 5 { 1 } else { 2 }).unwrap(),
        )
        .unwrap();
        let p = srg_params_from_scheme(&s, &[1]).unwrap();
        assert!(!p.connected);
        assert_eq!((p.k, p.lambda, p.mu, p.m1, p.m2), (4, 3, 0, 1, 8));
        let c = connectivity_classification(&s, &[1], &SpectralOptions::default()).unwrap();
        assert_eq!(c.verdict, Connectivity::DisjointCliques { count: 2, size: 5 });
        assert!(c.has_minus_one && c.spectrum_is_k_and_minus_one && c.components_match_multiplicity);
        assert_eq!(c.minus_one_matches, Some(true));
        // The complement K_{5,5} is connected and strongly regular.
        let q = srg_params_from_scheme(&s, &[2]).unwrap();
        assert_eq!((q.k, q.lambda, q.mu), (5, 0, 5));
        assert_eq!((q.r.clone(), q.s.clone()), (Surd::from_int(0), Surd::from_int(-5)));
    }
}
