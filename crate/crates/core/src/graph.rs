//! Graph searches on relation unions.

use std::collections::VecDeque;

use crate::scheme::Scheme;

/// Adjacency lists of the digraph `(X, R_Λ)`.
pub fn union_adjacency(s: &Scheme, lambda: &[usize]) -> Vec<Vec<usize>> {
    let mut member = vec![false; s.d() + 1];
    for &i in lambda {
        member[i] = true;
    }
    let c = s.color();
    (0..s.n()).map(|x| (0..s.n()).filter(|&y| member[c.get(x, y)]).collect()).collect()
}

fn bfs(adj: &[Vec<usize>], start: usize) -> Vec<Option<usize>> {
    let mut dist = vec![None; adj.len()];
    dist[start] = Some(0);
    let mut queue = VecDeque::from([start]);
    while let Some(x) = queue.pop_front() {
        let next = dist[x].unwrap() + 1;
        for &y in &adj[x] {
            if dist[y].is_none() {
                dist[y] = Some(next);
                queue.push_back(y);
            }
        }
    }
    dist
}

/// Connected components, treating arcs as undirected edges.
pub fn components(adj: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let n = adj.len();
    let mut undirected = vec![Vec::new(); n];
    for (x, out) in adj.iter().enumerate() {
        for &y in out {
            undirected[x].push(y);
            undirected[y].push(x);
        }
    }
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let comp: Vec<usize> = bfs(&undirected, start).iter().enumerate().filter_map(|(v, d)| d.map(|_| v)).collect();
        for &v in &comp {
            seen[v] = true;
        }
        out.push(comp);
    }
    out
}

/// Largest directed distance, or `None` when some vertex cannot reach another.
pub fn diameter(adj: &[Vec<usize>]) -> Option<usize> {
    let mut best = 0;
    for x in 0..adj.len() {
        for d in bfs(adj, x) {
            best = best.max(d?);
        }
    }
    Some(best)
}
