//! Elementary circuit enumeration (Johnson, 1975).
//!
//! For each start vertex `s`, circuits whose least vertex is `s` are searched
//! in the subgraph induced by `{s, s+1, …}` with the blocking lists that keep
//! the search from revisiting dead ends. Self-loops are circuits of length 1.

use std::ops::ControlFlow;

struct Search<'a, F> {
    succ: &'a [Vec<usize>],
    blocked: Vec<bool>,
    blocked_by: Vec<Vec<usize>>,
    stack: Vec<usize>,
    start: usize,
    visit: F,
}

impl<F> Search<'_, F>
where
    F: FnMut(&[usize]) -> ControlFlow<()>,
{
    fn unblock(&mut self, u: usize) {
        self.blocked[u] = false;
        for w in std::mem::take(&mut self.blocked_by[u]) {
            if self.blocked[w] {
                self.unblock(w);
            }
        }
    }

    fn circuit(&mut self, v: usize) -> ControlFlow<(), bool> {
        let mut found = false;
        self.stack.push(v);
        self.blocked[v] = true;
        let succ = self.succ;
        for &w in &succ[v] {
            if w < self.start {
                continue;
            }
            if w == self.start {
                (self.visit)(&self.stack)?;
                found = true;
            } else if !self.blocked[w] && self.circuit(w)? {
                found = true;
            }
        }
        if found {
            self.unblock(v);
        } else {
            for &w in &succ[v] {
                if w >= self.start && !self.blocked_by[w].contains(&v) {
                    self.blocked_by[w].push(v);
                }
            }
        }
        self.stack.pop();
        ControlFlow::Continue(found)
    }
}

/// Calls `visit` with every elementary circuit of the graph, each listed from
/// its least vertex. Stops early when `visit` breaks; returns whether the
/// enumeration ran to completion.
pub fn visit_simple_cycles<F>(succ: &[Vec<usize>], visit: F) -> bool
where
    F: FnMut(&[usize]) -> ControlFlow<()>,
{
    let n = succ.len();
    let mut search = Search {
        succ,
        blocked: vec![false; n],
        blocked_by: vec![Vec::new(); n],
        stack: Vec::new(),
        start: 0,
        visit,
    };
    for s in 0..n {
        search.start = s;
        search.blocked.iter_mut().for_each(|b| *b = false);
        search.blocked_by.iter_mut().for_each(Vec::clear);
        if search.circuit(s).is_break() {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn collect(succ: &[Vec<usize>]) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        visit_simple_cycles(succ, |c| {
            out.push(c.to_vec());
            ControlFlow::Continue(())
        });
        out.sort();
        out
    }

    /// Brute force: every node sequence with distinct entries, least entry
    /// first, that closes up along edges.
    fn brute(succ: &[Vec<usize>]) -> Vec<Vec<usize>> {
        fn extend(succ: &[Vec<usize>], path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            let last = *path.last().unwrap();
            let start = path[0];
            if succ[last].contains(&start) {
                out.push(path.clone());
            }
            for &w in &succ[last] {
                if w > start && !path.contains(&w) {
                    path.push(w);
                    extend(succ, path, out);
                    path.pop();
                }
            }
        }
        let mut out = Vec::new();
        for s in 0..succ.len() {
            extend(succ, &mut vec![s], &mut out);
        }
        out.sort();
        out
    }

    #[test]
    fn complete_graph_with_loops_counts() {
        for n in 1..=6 {
            let succ: Vec<Vec<usize>> = (0..n).map(|_| (0..n).collect()).collect();
            let cycles = collect(&succ);
            // Σ_k C(n,k)(k−1)!
            let expected: usize = (1..=n)
                .map(|k| {
                    let binom = (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1));
                    binom * (1..k).product::<usize>()
                })
                .sum();
            assert_eq!(cycles.len(), expected, "n = {n}");
        }
    }

    #[test]
    fn agrees_with_brute_force_on_sparse_graphs() {
        let graphs: Vec<Vec<Vec<usize>>> = vec![
            vec![vec![1], vec![2], vec![0, 1]],
            vec![vec![1, 3], vec![2], vec![0, 3], vec![1]],
            vec![vec![0, 1], vec![0], vec![2]],
            vec![vec![1], vec![0, 2], vec![3], vec![1, 4], vec![0]],
        ];
        for g in graphs {
            assert_eq!(collect(&g), brute(&g));
        }
    }

    #[test]
    fn early_stop() {
        let succ: Vec<Vec<usize>> = (0..5).map(|_| (0..5).collect()).collect();
        let mut seen = 0;
        let complete = visit_simple_cycles(&succ, |_| {
            seen += 1;
            if seen == 3 {
                ControlFlow::Break(())
            } else {
                ControlFlow::Continue(())
            }
        });
        assert!(!complete);
        assert_eq!(seen, 3);
    }
}
