//! Seeded generators for test inputs: graphs satisfying the invariant's
//! hypotheses, graphs in standard form, and random GL_P-equivalences.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::fk::check_invariant_preconditions;
use crate::graphcore::{Graph, Poset};
use crate::intlin::{int, IntMatrix};
use crate::posetblock::{BlockMatrix, Equivalence};

fn names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("v{i}")).collect()
}

/// Random strict order on `k` elements: `i < j` only when `i < j` as integers.
pub fn random_poset<R: Rng>(rng: &mut R, k: usize, density: f64) -> Poset {
    let mut pairs = Vec::new();
    for j in 0..k {
        for i in 0..j {
            if rng.gen_bool(density) {
                pairs.push((i, j));
            }
        }
    }
    Poset::from_pairs(k, &pairs).expect("upward pairs are acyclic")
}

/// Splits `n` vertices into `k` nonempty consecutive blocks.
fn block_sizes<R: Rng>(rng: &mut R, n: usize, k: usize) -> Vec<usize> {
    let mut sizes = vec![1; k];
    for _ in k..n {
        let j = rng.gen_range(0..k);
        sizes[j] += 1;
    }
    sizes
}

/// A graph with at most `max_n` vertices that has no sinks or sources and
/// satisfies Condition (K). Components are built as strongly connected pieces
/// ordered by a random poset; a few single transient vertices may appear.
pub fn random_graph<R: Rng>(rng: &mut R, max_n: usize) -> Graph {
    loop {
        let n = rng.gen_range(1..=max_n.max(1));
        let k = rng.gen_range(1..=n.min(4));
        let sizes = block_sizes(rng, n, k);
        let mut start = vec![0; k];
        for j in 1..k {
            start[j] = start[j - 1] + sizes[j - 1];
        }
        let members = |j: usize| start[j]..start[j] + sizes[j];
        let poset = random_poset(rng, k, 0.5);
        let transient: Vec<bool> = (0..k).map(|j| sizes[j] == 1 && k > 1 && rng.gen_bool(0.15)).collect();
        let mut a = IntMatrix::zeros(n, n);
        for j in 0..k {
            if transient[j] {
                continue;
            }
            let vs: Vec<usize> = members(j).collect();
            for w in 0..vs.len() {
                let next = vs[(w + 1) % vs.len()];
                a[(vs[w], next)] += int(1);
            }
            let extra = rng.gen_range(1..=2 * vs.len());
            for _ in 0..extra {
                let (x, y) = (*vs.choose(rng).expect("nonempty"), *vs.choose(rng).expect("nonempty"));
                a[(x, y)] += int(1);
            }
        }
        for (lo, hi) in poset.strict_pairs() {
            // hi reaches lo
            let tries = rng.gen_range(0..=2);
            for t in 0..tries.max(usize::from(poset.covers(lo, hi))) {
                let x = start[hi] + rng.gen_range(0..sizes[hi]);
                let y = start[lo] + rng.gen_range(0..sizes[lo]);
                a[(x, y)] += int(1 + i64::from(t > 0 && rng.gen_bool(0.2)));
            }
        }
        let Ok(g) = Graph::new(names(n), a) else { continue };
        if check_invariant_preconditions(&g).is_ok() {
            return g;
        }
    }
}

/// A graph whose B-matrix lies in M_P^+: `k ≤ max_k` components of sizes
/// 3 or 4, every allowed entry of `B` positive, at least two unit invariant
/// factors per diagonal block.
pub fn random_standard_graph<R: Rng>(rng: &mut R, max_k: usize, max_entry: i64) -> Graph {
    loop {
        let k = rng.gen_range(1..=max_k.max(1));
        let sizes: Vec<usize> = (0..k).map(|_| rng.gen_range(3..=4)).collect();
        let n: usize = sizes.iter().sum();
        let mut comp = Vec::with_capacity(n);
        for (j, &s) in sizes.iter().enumerate() {
            comp.extend(std::iter::repeat_n(j, s));
        }
        let poset = random_poset(rng, k, 0.5);
        let mut a = IntMatrix::zeros(n, n);
        for r in 0..n {
            for c in 0..n {
                if poset.leq(comp[c], comp[r]) {
                    a[(r, c)] = int(rng.gen_range(1..=max_entry.max(1)) + i64::from(r == c));
                }
            }
        }
        let Ok(g) = Graph::new(names(n), a) else { continue };
        match BlockMatrix::from_graph(&g) {
            Ok(b) if b.classify().in_mp_plus => return g,
            _ => continue,
        }
    }
}

/// Random element of GL_P for the given square labels, built from elementary
/// operations in allowed positions and sign changes on single coordinates.
pub fn random_glp<R: Rng>(rng: &mut R, poset: &Poset, labels: &[usize], steps: usize, signs: bool) -> IntMatrix {
    let n = labels.len();
    let mut m = IntMatrix::identity(n);
    if n == 0 {
        return m;
    }
    for _ in 0..steps {
        let (r, c) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if r != c && poset.leq(labels[c], labels[r]) {
            m.add_row_multiple(r, c, &int(rng.gen_range(-2..=2)));
        }
    }
    if signs {
        for r in 0..n {
            if rng.gen_bool(0.25) {
                for c in 0..n {
                    m[(r, c)] = -m[(r, c)].clone();
                }
            }
        }
    }
    m
}

/// A random GL_P-equivalence out of `B_g` (unpadded) with its target.
pub fn random_equivalence<R: Rng>(rng: &mut R, g: &Graph, steps: usize) -> Equivalence {
    let b = BlockMatrix::from_graph(g).expect("graph has a condensation");
    let labels = b.row_comp().to_vec();
    let u = random_glp(rng, b.poset(), &labels, steps, true);
    let v = random_glp(rng, b.poset(), &labels, steps, true);
    Equivalence::from_matrices(&b, u, v).expect("GL_P pair over matching labels")
}
