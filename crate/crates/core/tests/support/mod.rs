//! Shared test helpers: an unpruned brute-force oracle and random graphs.

#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use vmagic::abelian::{CayleyTable, GroupSpec};
use vmagic::graphcore::Graph;

/// Number of magic labelings, by trying all `(|A|-1)^n` nonzero assignments.
pub fn naive_count(g: &Graph, a: &GroupSpec) -> u64 {
    let t = CayleyTable::new(a).unwrap();
    let n = g.n();
    let k = t.order() as u16;
    let mut labels = vec![1u16; n];
    let mut count = 0;
    loop {
        let weight = |v: usize| {
            g.neighbors(v)
                .iter()
                .fold(0u16, |acc, &w| t.add(acc, labels[w]))
        };
        let mu = weight(0);
        if (1..n).all(|v| weight(v) == mu) {
            count += 1;
        }
        let mut i = 0;
        loop {
            if i == n {
                return count;
            }
            labels[i] += 1;
            if labels[i] < k {
                break;
            }
            labels[i] = 1;
            i += 1;
        }
    }
}

pub fn naive_exists(g: &Graph, a: &GroupSpec) -> bool {
    naive_count(g, a) > 0
}

/// Random connected graph: a random tree plus up to `extra` random edges.
pub fn random_graph(n: usize, extra: usize, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges: Vec<(usize, usize)> = (1..n).map(|v| (rng.gen_range(0..v), v)).collect();
    for _ in 0..extra {
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        let e = (u.min(v), u.max(v));
        if u != v && !edges.iter().any(|&(a, b)| (a.min(b), a.max(b)) == e) {
            edges.push(e);
        }
    }
    Graph::new(n, &edges).unwrap()
}

pub fn random_permutation(n: usize, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(&mut rng);
    p
}

/// The graph with vertex `v` renamed to `perm[v]`.
pub fn relabel(g: &Graph, perm: &[usize]) -> Graph {
    let edges: Vec<(usize, usize)> = g.edges().iter().map(|&(u, v)| (perm[u], perm[v])).collect();
    Graph::new(g.n(), &edges).unwrap()
}
