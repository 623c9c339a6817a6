#![allow(dead_code)]

use fkr_core::graphcore::Graph;
use fkr_core::moves::{col_add, edge_expand, relabel, row_add, ChainStep, MoveCertificate};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn step(rng: &mut ChaCha8Rng, g: &Graph) -> Option<(Graph, MoveCertificate)> {
    let n = g.len();
    let (u, v) = (rng.gen_range(0..n), rng.gen_range(0..n));
    let (su, sv) = (g.vertex(u).to_string(), g.vertex(v).to_string());
    match rng.gen_range(0..4) {
        0 => row_add(g, &su, &sv).ok(),
        1 => col_add(g, &su, &sv).ok(),
        2 if n < 9 => edge_expand(g, &su, &sv).ok(),
        _ => {
            let mut order = g.vertices().to_vec();
            order.shuffle(rng);
            relabel(g, &order).ok()
        }
    }
}

pub fn steps(rng: &mut ChaCha8Rng, g: &Graph, len: usize) -> Vec<ChainStep> {
    let mut cur = g.clone();
    let mut out = Vec::new();
    for _ in 0..40 * len {
        if out.len() == len {
            break;
        }
        if let Some((next, c)) = step(rng, &cur) {
            out.push(ChainStep::forward(c));
            cur = next;
        }
    }
    out
}
