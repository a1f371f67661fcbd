use super::{sigmoid, Booster, GbdtError, Hyperparams, TreeNode};
use crate::vectorizer::CountVector;

/// Per-node gradient statistics.
#[derive(Debug, Clone, Copy, Default)]
struct Stats {
    g: f64,
    h: f64,
    n: usize,
}

impl Stats {
    fn add(&mut self, g: f64, h: f64) {
        self.g += g;
        self.h += h;
        self.n += 1;
    }

    fn minus(self, o: Stats) -> Stats {
        Stats {
            g: self.g - o.g,
            h: self.h - o.h,
            n: self.n - o.n,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    gain: f64,
    feature: u32,
    threshold: f64,
}

impl Candidate {
    /// Higher gain wins; ties go to the lower feature, then the lower
    /// threshold.
    fn beats(&self, other: &Option<Candidate>) -> bool {
        match other {
            None => true,
            Some(o) => {
                self.gain > o.gain
                    || (self.gain == o.gain && (self.feature, self.threshold) < (o.feature, o.threshold))
            }
        }
    }
}

enum Arena {
    Leaf(f64),
    Split {
        feature: u32,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

fn score(s: Stats, lambda: f64) -> f64 {
    s.g * s.g / (s.h + lambda)
}

fn to_tree(arena: &[Arena], i: usize) -> TreeNode {
    match arena[i] {
        Arena::Leaf(w) => TreeNode::leaf(w),
        Arena::Split {
            feature,
            threshold,
            left,
            right,
        } => TreeNode::split(feature, threshold, to_tree(arena, left), to_tree(arena, right)),
    }
}

/// Column-major copy of the training matrix: for each feature, its nonzero
/// `(value, example)` pairs in ascending order.
fn columns(examples: &[(CountVector, bool)], dim: usize) -> Vec<Vec<(u32, u32)>> {
    let mut cols: Vec<Vec<(u32, u32)>> = vec![Vec::new(); dim];
    for (i, (v, _)) in examples.iter().enumerate() {
        for &(c, n) in v.entries() {
            cols[c as usize].push((n, i as u32));
        }
    }
    for col in &mut cols {
        col.sort_unstable();
    }
    cols
}

/// Second-order boosting with logistic loss. `on_round` sees the margins
/// after every round (used to audit the training loss).
pub fn train_with_callback(
    examples: &[(CountVector, bool)],
    hp: &Hyperparams,
    mut on_round: impl FnMut(usize, &[f64]),
) -> Result<Booster, GbdtError> {
    hp.validate()?;
    let Some(first) = examples.first() else {
        return Err(GbdtError::SingleClass);
    };
    let dim = first.0.dimension();
    if let Some(bad) = examples.iter().find(|e| e.0.dimension() != dim) {
        return Err(GbdtError::DimensionMismatch {
            expected: dim,
            found: bad.0.dimension(),
        });
    }
    let pos = examples.iter().filter(|e| e.1).count();
    if pos == 0 || pos == examples.len() {
        return Err(GbdtError::SingleClass);
    }

    let cols = columns(examples, dim);
    let labels: Vec<f64> = examples.iter().map(|e| f64::from(u8::from(e.1))).collect();
    let mut margin = vec![hp.base_score; examples.len()];
    let mut trees = Vec::with_capacity(hp.rounds);
    let mut grad = vec![0.0; examples.len()];
    let mut hess = vec![0.0; examples.len()];

    for round in 0..hp.rounds {
        for i in 0..examples.len() {
            let p = sigmoid(margin[i]);
            grad[i] = p - labels[i];
            hess[i] = p * (1.0 - p);
        }
        let (tree, leaf_of) = grow_tree(&cols, &grad, &hess, hp);
        for (m, w) in margin.iter_mut().zip(&leaf_of) {
            *m += hp.learning_rate * w;
        }
        trees.push(tree);
        on_round(round, &margin);
    }
    Ok(Booster {
        trees,
        base_score: hp.base_score,
        learning_rate: hp.learning_rate,
    })
}

pub fn train(examples: &[(CountVector, bool)], hp: &Hyperparams) -> Result<Booster, GbdtError> {
    train_with_callback(examples, hp, |_, _| {})
}

/// Grows one tree level by level. Returns the tree and each example's leaf
/// weight.
fn grow_tree(cols: &[Vec<(u32, u32)>], grad: &[f64], hess: &[f64], hp: &Hyperparams) -> (TreeNode, Vec<f64>) {
    const DONE: usize = usize::MAX;
    let n = grad.len();
    let lambda = hp.l2_lambda;
    let mut arena: Vec<Arena> = vec![Arena::Leaf(0.0)];
    // slot in the current level for each example, or DONE
    let mut slot_of = vec![0usize; n];
    let mut level: Vec<usize> = vec![0]; // arena ids
    let mut weight_of = vec![0.0; n];

    for depth in 0..=hp.max_depth {
        let mut totals = vec![Stats::default(); level.len()];
        for i in 0..n {
            if slot_of[i] != DONE {
                totals[slot_of[i]].add(grad[i], hess[i]);
            }
        }

        let mut best: Vec<Option<Candidate>> = vec![None; level.len()];
        if depth < hp.max_depth {
            // right-side accumulators, scanning values high to low
            let mut acc = vec![Stats::default(); level.len()];
            let mut last = vec![0u32; level.len()];
            for (f, col) in cols.iter().enumerate() {
                if col.is_empty() {
                    continue;
                }
                acc.iter_mut().for_each(|a| *a = Stats::default());
                let consider = |s: usize, right: Stats, threshold: f64, best: &mut Vec<Option<Candidate>>| {
                    let left = totals[s].minus(right);
                    if left.h < hp.min_child_weight || right.h < hp.min_child_weight || left.n == 0 {
                        return;
                    }
                    let gain = 0.5 * (score(left, lambda) + score(right, lambda) - score(totals[s], lambda))
                        - hp.gamma;
                    let cand = Candidate {
                        gain,
                        feature: f as u32,
                        threshold,
                    };
                    if cand.beats(&best[s]) {
                        best[s] = Some(cand);
                    }
                };
                for &(value, ex) in col.iter().rev() {
                    let s = slot_of[ex as usize];
                    if s == DONE {
                        continue;
                    }
                    if acc[s].n > 0 && value != last[s] {
                        let thr = (f64::from(value) + f64::from(last[s])) / 2.0;
                        consider(s, acc[s], thr, &mut best);
                    }
                    acc[s].add(grad[ex as usize], hess[ex as usize]);
                    last[s] = value;
                }
                for s in 0..level.len() {
                    if acc[s].n > 0 && acc[s].n < totals[s].n {
                        consider(s, acc[s], f64::from(last[s]) / 2.0, &mut best);
                    }
                }
            }
        }

        let mut next_level = Vec::new();
        let mut remap = vec![DONE; level.len() * 2];
        for (s, &node) in level.iter().enumerate() {
            match best[s] {
                Some(c) if c.gain > 0.0 => {
                    let left = arena.len();
                    arena.push(Arena::Leaf(0.0));
                    arena.push(Arena::Leaf(0.0));
                    arena[node] = Arena::Split {
                        feature: c.feature,
                        threshold: c.threshold,
                        left,
                        right: left + 1,
                    };
                    remap[2 * s] = next_level.len();
                    next_level.push(left);
                    remap[2 * s + 1] = next_level.len();
                    next_level.push(left + 1);
                }
                _ => {
                    let t = totals[s];
                    arena[node] = Arena::Leaf(-t.g / (t.h + lambda));
                }
            }
        }
        if next_level.is_empty() {
            for i in 0..n {
                if slot_of[i] != DONE {
                    if let Arena::Leaf(w) = arena[level[slot_of[i]]] {
                        weight_of[i] = w;
                    }
                }
            }
            break;
        }
        // route examples to the children
        let mut values = vec![0u32; n];
        for (s, b) in best.iter().enumerate() {
            if let Some(c) = b.filter(|c| c.gain > 0.0) {
                for &(v, ex) in &cols[c.feature as usize] {
                    if slot_of[ex as usize] == s {
                        values[ex as usize] = v;
                    }
                }
            }
        }
        let old_slot = slot_of.clone();
        for i in 0..n {
            let s = old_slot[i];
            if s == DONE {
                continue;
            }
            match &arena[level[s]] {
                Arena::Leaf(w) => {
                    weight_of[i] = *w;
                    slot_of[i] = DONE;
                }
                Arena::Split { threshold, .. } => {
                    let go_left = f64::from(values[i]) < *threshold;
                    slot_of[i] = remap[2 * s + usize::from(!go_left)];
                }
            }
        }
        level = next_level;
    }
    (to_tree(&arena, 0), weight_of)
}
