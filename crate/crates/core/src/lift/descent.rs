//! Two-sided greedy search for legal additions realizing an SL_P-equivalence.
//!
//! The state is a pair of graphs, one grown from the source and one from the
//! target, with the remaining pair `(X, Y)` satisfying `X·C·Y = D`. Each step
//! shrinks `|X − I| + |Y − I|` where it can; when no step or pair of steps
//! does, the cheapest step into an unvisited state is taken.

use std::collections::HashSet;

use num_traits::ToPrimitive;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::factor::{realize, Transvection};
use crate::graphcore::{condensation, Graph};
use crate::intlin::IntMatrix;
use crate::moves::{relabel, rename, ChainStep};
use crate::posetblock::Equivalence;
use crate::Result;

type Mat = Vec<Vec<i64>>;

/// Entries beyond this mean the search is wandering.
const MAX_ENTRY: i64 = 2000;

/// Iterations allowed without a new lowest defect.
const STALL: u32 = 40;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Op {
    Row,
    Col,
    /// Exchange of two vertices of one component.
    Swap,
}

#[derive(Clone, Copy, Debug)]
struct Step {
    /// Acts on the target-side graph.
    far: bool,
    op: Op,
    s: usize,
    t: usize,
    coeff: i64,
}

fn small(m: &IntMatrix) -> Option<Mat> {
    (0..m.rows()).map(|r| m.row(r).iter().map(ToPrimitive::to_i64).collect()).collect()
}

fn id(r: usize, c: usize) -> i64 {
    i64::from(r == c)
}

fn defect(m: &Mat) -> i64 {
    m.iter().enumerate().map(|(r, row)| row.iter().enumerate().map(|(c, &x)| (x - id(r, c)).abs()).sum::<i64>()).sum()
}

/// `B ← E·B`, `B ← B·E` or `B ← P·B·P`.
fn apply_b(b: &Mat, st: Step) -> Mat {
    let mut m = b.clone();
    let n = m.len();
    match st.op {
        Op::Swap => {
            m.swap(st.s, st.t);
            for row in m.iter_mut() {
                row.swap(st.s, st.t);
            }
        }
        Op::Row => {
            for c in 0..n {
                m[st.s][c] += st.coeff * b[st.t][c];
            }
        }
        Op::Col => {
            for r in 0..n {
                m[r][st.t] += st.coeff * b[r][st.s];
            }
        }
    }
    m
}

/// Keeps `X·C·Y = D` after the step.
fn apply_xy(x: &mut Mat, y: &mut Mat, st: Step) {
    let n = x.len();
    let (s, t, c) = (st.s, st.t, st.coeff);
    match (st.far, st.op) {
        (false, Op::Row) => (0..n).for_each(|r| x[r][t] -= c * x[r][s]),
        (false, Op::Col) => (0..n).for_each(|k| y[s][k] -= c * y[t][k]),
        (true, Op::Row) => (0..n).for_each(|k| x[s][k] += c * x[t][k]),
        (true, Op::Col) => (0..n).for_each(|r| y[r][t] += c * y[r][s]),
        (false, Op::Swap) => {
            x.iter_mut().for_each(|row| row.swap(s, t));
            y.swap(s, t);
        }
        (true, Op::Swap) => {
            x.swap(s, t);
            y.iter_mut().for_each(|row| row.swap(s, t));
        }
    }
}

fn delta(x: &Mat, y: &Mat, st: Step) -> i64 {
    let n = x.len();
    let (s, t, c) = (st.s, st.t, st.coeff);
    let change = |old: i64, new: i64, ideal: i64| (new - ideal).abs() - (old - ideal).abs();
    match (st.far, st.op) {
        (false, Op::Row) => (0..n).map(|r| change(x[r][t], x[r][t] - c * x[r][s], id(r, t))).sum(),
        (false, Op::Col) => (0..n).map(|k| change(y[s][k], y[s][k] - c * y[t][k], id(s, k))).sum(),
        (true, Op::Row) => (0..n).map(|k| change(x[s][k], x[s][k] + c * x[t][k], id(s, k))).sum(),
        (true, Op::Col) => (0..n).map(|r| change(y[r][t], y[r][t] + c * y[r][s], id(r, t))).sum(),
        (far, Op::Swap) => {
            // columns of X and rows of Y trade places on the near side, the reverse on the far side
            let (cols, rows) = if far { (y, x) } else { (x, y) };
            let mut d = 0;
            for k in 0..n {
                d += change(cols[k][s], cols[k][t], id(k, s)) + change(cols[k][t], cols[k][s], id(k, t));
                d += change(rows[s][k], rows[t][k], id(s, k)) + change(rows[t][k], rows[s][k], id(t, k));
            }
            d
        }
    }
}

/// Whether `st` keeps every allowed entry of `B` positive. Between two such
/// matrices an addition is always legal, in either direction.
fn legal(b: &Mat, st: Step, allowed: &dyn Fn(usize, usize) -> bool) -> bool {
    if st.op == Op::Swap || st.coeff > 0 {
        return true;
    }
    let n = b.len();
    match st.op {
        Op::Row => (0..n).all(|c| !allowed(st.s, c) || b[st.s][c] - b[st.t][c] > 0),
        _ => (0..n).all(|r| !allowed(r, st.t) || b[r][st.t] - b[r][st.s] > 0),
    }
}

fn reach(b: &Mat) -> Vec<Vec<bool>> {
    let n = b.len();
    let mut m: Vec<Vec<bool>> = (0..n).map(|r| (0..n).map(|c| b[r][c] + id(r, c) > 0).collect()).collect();
    for k in 0..n {
        for i in 0..n {
            if m[i][k] {
                for j in 0..n {
                    if m[k][j] {
                        m[i][j] = true;
                    }
                }
            }
        }
    }
    m
}

struct Search<'a> {
    allowed: &'a dyn Fn(usize, usize) -> bool,
    near: Mat,
    far: Mat,
    x: Mat,
    y: Mat,
    moves: Vec<Step>,
    seen: HashSet<(Mat, Mat, Mat, Mat)>,
}

impl Search<'_> {
    fn side(&self, st: Step) -> &Mat {
        if st.far {
            &self.far
        } else {
            &self.near
        }
    }

    fn after(&self, st: Step) -> (Mat, Mat, Mat, Mat) {
        let (mut x, mut y) = (self.x.clone(), self.y.clone());
        apply_xy(&mut x, &mut y, st);
        let (near, far) = if st.far { (self.near.clone(), apply_b(&self.far, st)) } else { (apply_b(&self.near, st), self.far.clone()) };
        (near, far, x, y)
    }

    fn visited(&self, st: Step) -> bool {
        self.seen.contains(&self.after(st))
    }

    fn take(&mut self, st: Step) {
        let state = self.after(st);
        (self.near, self.far, self.x, self.y) = state.clone();
        self.seen.insert(state);
        self.moves.push(st);
    }

    /// State after `plan`, if every step of it is legal in turn.
    fn run(&self, plan: &[Step]) -> Option<(Mat, Mat, Mat, Mat)> {
        let (mut near, mut far, mut x, mut y) = (self.near.clone(), self.far.clone(), self.x.clone(), self.y.clone());
        for &st in plan {
            let side = if st.far { &mut far } else { &mut near };
            if !legal(side, st, self.allowed) {
                return None;
            }
            *side = apply_b(side, st);
            apply_xy(&mut x, &mut y, st);
        }
        Some((near, far, x, y))
    }

    /// The cycle that lowers the defect most, if any does.
    fn best_cycle<'p>(&self, cycles: &'p [Vec<Step>]) -> Option<&'p [Step]> {
        let cost = defect(&self.x) + defect(&self.y);
        let mut best: Option<(i64, &[Step])> = None;
        for plan in cycles {
            let Some(state) = self.run(plan) else { continue };
            let d = defect(&state.2) + defect(&state.3) - cost;
            if d < best.map_or(0, |(b, _)| b) && !self.seen.contains(&state) {
                best = Some((d, plan));
            }
        }
        best.map(|(_, p)| p)
    }

    /// Legal steps sorted by their change of the defect.
    fn options(&self, moves: &[Step]) -> Vec<(i64, Step)> {
        let mut out: Vec<(i64, Step)> =
            moves.iter().filter(|&&st| legal(self.side(st), st, self.allowed)).map(|&st| (delta(&self.x, &self.y, st), st)).collect();
        // shrinking steps first among equals
        out.sort_by_key(|&(d, st)| (d, st.coeff));
        out
    }

    fn pair(&self, moves: &[Step], first: &[(i64, Step)]) -> Option<(Step, Step)> {
        let mut best: Option<(i64, Step, Step)> = None;
        for &(d1, a) in first {
            let bound = best.map_or(0, |(d, _, _)| d);
            let (near, far, x, y) = self.after(a);
            let probe = Search { allowed: self.allowed, near, far, x, y, moves: Vec::new(), seen: HashSet::new() };
            for &b in moves {
                let d2 = delta(&probe.x, &probe.y, b);
                if d1 + d2 >= bound || best.is_some_and(|(d, _, _)| d <= d1 + d2) {
                    continue;
                }
                if legal(probe.side(b), b, self.allowed) && !self.seen.contains(&probe.after(b)) {
                    best = Some((d1 + d2, a, b));
                }
            }
        }
        best.map(|(_, a, b)| (a, b))
    }
}

/// Additions cycling three rows (or columns) of one component. Every
/// intermediate row is a nonnegative combination of the original rows, so on a
/// matrix that is positive on its allowed entries each step is legal.
fn cycle(far: bool, op: Op, idx: [usize; 3]) -> Vec<Step> {
    const PATH: [(usize, usize, i64); 6] = [(0, 1, 1), (1, 2, 1), (2, 0, 1), (2, 1, -1), (0, 2, -1), (1, 0, -1)];
    PATH.iter()
        .map(|&(s, t, coeff)| {
            let (s, t) = if op == Op::Row { (idx[s], idx[t]) } else { (idx[t], idx[s]) };
            Step { far, op, s, t, coeff }
        })
        .collect()
}

/// Legal additions, forward or backward, and relabelings whose composite is `e`.
pub(super) fn run_descent(g: &Graph, e: &Equivalence, budget: u64, seed: u64) -> Result<std::result::Result<Vec<ChainStep>, String>> {
    let n = g.len();
    let (Some(near), Some(far), Some(x), Some(y)) =
        (small(&g.b_matrix()), small(e.target.matrix()), small(e.u.matrix()), small(e.v.matrix()))
    else {
        return Ok(Err("entries too large for the descent".into()));
    };
    let labels = condensation(g);
    let allowed = |r: usize, c: usize| labels.poset().leq(labels.component_of(c), labels.component_of(r));
    let mut moves = Vec::new();
    for far in [false, true] {
        for s in 0..n {
            for t in 0..n {
                if s == t || !allowed(s, t) {
                    continue;
                }
                for op in [Op::Row, Op::Col] {
                    for coeff in [1, -1] {
                        moves.push(Step { far, op, s, t, coeff });
                    }
                }
                if s < t && allowed(t, s) {
                    moves.push(Step { far, op: Op::Swap, s, t, coeff: 1 });
                }
            }
        }
    }
    let mut cycles = Vec::new();
    for far in [false, true] {
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let same = allowed(a, b) && allowed(b, a) && allowed(a, c) && allowed(c, a);
                    if a < b && a < c && b != c && same {
                        cycles.push(cycle(far, Op::Row, [a, b, c]));
                        cycles.push(cycle(far, Op::Col, [a, b, c]));
                    }
                }
            }
        }
    }
    if seed > 0 {
        moves.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    }
    let shape = (reach(&near), reach(&far));
    let start = (near.clone(), far.clone(), x.clone(), y.clone());
    let mut search = Search { allowed: &allowed, near, far, x, y, moves: Vec::new(), seen: HashSet::from([start]) };
    let limit = budget.max(64);
    let mut solved = false;
    let (mut best, mut since_best) = (i64::MAX, 0);
    for _ in 0..limit {
        let cost = defect(&search.x) + defect(&search.y);
        if cost == 0 {
            solved = true;
            break;
        }
        if cost < best {
            (best, since_best) = (cost, 0);
        } else {
            since_best += 1;
            if since_best > STALL {
                return Ok(Err(format!("descent stalled at defect {best}")));
            }
        }
        let options = search.options(&moves);
        if let Some(&(_, st)) = options.iter().find(|&&(d, st)| d < 0 && !search.visited(st)) {
            search.take(st);
        } else if let Some(plan) = search.best_cycle(&cycles) {
            for &st in plan {
                search.take(st);
            }
        } else if let Some((a, b)) = search.pair(&moves, &options) {
            search.take(a);
            search.take(b);
        } else if let Some(&(_, st)) = options.iter().find(|&&(_, st)| !search.visited(st)) {
            search.take(st);
        } else {
            return Ok(Err(format!("descent stuck at defect {cost}")));
        }
        if search.near.iter().chain(&search.far).flatten().any(|&v| v > MAX_ENTRY) {
            return Ok(Err(format!("descent left the entry bound at defect {}", defect(&search.x) + defect(&search.y))));
        }
        if (reach(&search.near), reach(&search.far)) != shape {
            return Ok(Err("descent would change the component structure".into()));
        }
    }
    if !solved {
        return Ok(Err(format!("descent budget exhausted at defect {}", defect(&search.x) + defect(&search.y))));
    }
    let Ok(far_start) = Graph::from_b_matrix(g.vertices().to_vec(), e.target.matrix()) else {
        return Ok(Err("target matrix is not a graph".into()));
    };
    let (mut near_g, mut far_g) = (g.clone(), far_start);
    let (mut near_steps, mut far_steps) = (Vec::new(), Vec::new());
    for st in search.moves {
        let cur = if st.far { &far_g } else { &near_g };
        let realized = if st.op == Op::Swap {
            let mut order = cur.vertices().to_vec();
            order.swap(st.s, st.t);
            let (h, cert) = relabel(cur, &order)?;
            Some((h, ChainStep::forward(cert)))
        } else {
            realize(cur, Transvection { row: st.s, col: st.t, coeff: st.coeff }, st.op == Op::Row)?
        };
        let Some((h, step)) = realized else {
            return Ok(Err("descent step could not be realized".into()));
        };
        if st.far {
            far_g = h;
            far_steps.push(step);
        } else {
            near_g = h;
            near_steps.push(step);
        }
    }
    if near_g.vertices() != far_g.vertices() {
        let (h, cert) = rename(&near_g, far_g.vertices())?;
        near_g = h;
        near_steps.push(ChainStep::forward(cert));
    }
    if near_g != far_g {
        return Ok(Err("the two sides of the descent do not meet".into()));
    }
    near_steps.extend(far_steps.into_iter().rev().map(|s| ChainStep { inverse: !s.inverse, ..s }));
    Ok(Ok(near_steps))
}
