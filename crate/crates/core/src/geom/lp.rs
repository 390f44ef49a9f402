//! Dense two-phase simplex over exact rationals.
//!
//! Solves `min cᵀx  s.t.  A x = b, x ≥ 0`. Pivoting follows Bland's rule in
//! both phases, so the method terminates without perturbation. Problem sizes
//! here are small (rows ≤ 2g + 2, columns ≤ a few hundred), so a full tableau
//! is kept.

use num_traits::{One, Signed, Zero};

use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum LpOutcome {
    Optimal {
        x: Vec<Rational>,
        value: Rational,
        /// Original columns that are basic at the optimum.
        basis: Vec<usize>,
    },
    /// Farkas certificate `y`: `yᵀA_j ≤ 0` for every column and `yᵀb > 0`.
    Infeasible(Vec<Rational>),
    Unbounded,
}

struct Tableau {
    rows: Vec<Vec<Rational>>,
    /// Reduced costs; the last entry holds `−z`.
    obj: Vec<Rational>,
    basis: Vec<usize>,
    width: usize,
}

impl Tableau {
    fn rhs(&self) -> usize {
        self.width
    }

    fn pivot(&mut self, r: usize, s: usize) {
        let inv = Rational::one() / &self.rows[r][s];
        for v in self.rows[r].iter_mut() {
            if !v.is_zero() {
                *v *= &inv;
            }
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[s].is_zero() {
                continue;
            }
            let f = row[s].clone();
            for (v, p) in row.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *v -= &f * p;
                }
            }
        }
        if !self.obj[s].is_zero() {
            let f = self.obj[s].clone();
            for (v, p) in self.obj.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *v -= &f * p;
                }
            }
        }
        self.basis[r] = s;
    }

    /// Runs Bland pivots over columns `< allowed`. Returns false when unbounded.
    fn run(&mut self, allowed: usize) -> bool {
        let rhs = self.rhs();
        loop {
            let Some(s) = (0..allowed).find(|&j| self.obj[j].is_negative()) else {
                return true;
            };
            let mut best: Option<(usize, Rational)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if !row[s].is_positive() {
                    continue;
                }
                let ratio = &row[rhs] / &row[s];
                let better = match &best {
                    None => true,
                    Some((bi, br)) => ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi]),
                };
                if better {
                    best = Some((i, ratio));
                }
            }
            match best {
                Some((r, _)) => self.pivot(r, s),
                None => return false,
            }
        }
    }
}

/// Solves the LP; `c = None` asks only for feasibility.
pub(crate) fn solve(a: &[Vec<Rational>], b: &[Rational], c: Option<&[Rational]>) -> LpOutcome {
    let m = a.len();
    debug_assert_eq!(b.len(), m);
    let n = a.first().map_or(c.map_or(0, <[_]>::len), Vec::len);
    let width = n + m;

    let mut signs = Vec::with_capacity(m);
    let mut rows = Vec::with_capacity(m);
    for (i, (row, bi)) in a.iter().zip(b).enumerate() {
        debug_assert_eq!(row.len(), n);
        let neg = bi.is_negative();
        signs.push(neg);
        let mut t = Vec::with_capacity(width + 1);
        t.extend(row.iter().map(|v| if neg { -v } else { v.clone() }));
        t.extend((0..m).map(|k| if k == i { Rational::one() } else { Rational::zero() }));
        t.push(if neg { -bi } else { bi.clone() });
        rows.push(t);
    }

    // Phase one: minimize the sum of artificials.
    let mut obj = vec![Rational::zero(); width + 1];
    for row in &rows {
        for j in 0..n {
            obj[j] -= &row[j];
        }
        obj[width] -= &row[width];
    }
    let mut tab = Tableau {
        rows,
        obj,
        basis: (n..n + m).collect(),
        width,
    };
    tab.run(width);

    let phase_one = -&tab.obj[width];
    if phase_one.is_positive() {
        // Reduced cost of artificial i equals 1 − y_i.
        let y = (0..m)
            .map(|i| {
                let yi = Rational::one() - &tab.obj[n + i];
                if signs[i] {
                    -yi
                } else {
                    yi
                }
            })
            .collect();
        return LpOutcome::Infeasible(y);
    }

    // Drive zero-level artificials out of the basis; drop redundant rows.
    let mut r = 0;
    while r < tab.rows.len() {
        if tab.basis[r] >= n {
            match (0..n).find(|&j| !tab.rows[r][j].is_zero()) {
                Some(j) => tab.pivot(r, j),
                None => {
                    tab.rows.remove(r);
                    tab.basis.remove(r);
                    continue;
                }
            }
        }
        r += 1;
    }

    let value = match c {
        None => Rational::zero(),
        Some(c) => {
            debug_assert_eq!(c.len(), n);
            let mut obj = vec![Rational::zero(); width + 1];
            obj[..n].clone_from_slice(c);
            for (row, &bj) in tab.rows.iter().zip(&tab.basis) {
                let cb = &c[bj];
                if cb.is_zero() {
                    continue;
                }
                for (o, v) in obj.iter_mut().zip(row) {
                    if !v.is_zero() {
                        *o -= cb * v;
                    }
                }
            }
            tab.obj = obj;
            if !tab.run(n) {
                return LpOutcome::Unbounded;
            }
            -&tab.obj[width]
        }
    };

    let mut x = vec![Rational::zero(); n];
    for (row, &bj) in tab.rows.iter().zip(&tab.basis) {
        x[bj] = row[width].clone();
    }
    LpOutcome::Optimal {
        x,
        value,
        basis: tab.basis.clone(),
    }
}
