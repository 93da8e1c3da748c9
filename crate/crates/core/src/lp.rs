//! Dense two-phase simplex over any [`Scalar`].
//!
//! Solves `min c·x` subject to `A x = b`, `x ≥ 0`. Bland's rule keeps the
//! method finite, which matters in exact arithmetic where degenerate pivots
//! are common.

use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome<S> {
    Infeasible,
    Unbounded,
    Optimal { x: Vec<S>, value: S },
}

fn eps<S: Scalar>() -> f64 {
    if S::EXACT {
        0.0
    } else {
        1e-12
    }
}

fn is_neg<S: Scalar>(x: &S) -> bool {
    if S::EXACT {
        x.is_negative()
    } else {
        x.to_f64_lossy() < -eps::<S>()
    }
}

fn is_pos<S: Scalar>(x: &S) -> bool {
    if S::EXACT {
        x.is_positive()
    } else {
        x.to_f64_lossy() > eps::<S>()
    }
}

struct Tableau<S> {
    rows: Vec<Vec<S>>,
    cost: Vec<S>,
    basis: Vec<usize>,
    width: usize,
}

impl<S: Scalar> Tableau<S> {
    fn rhs(&self) -> usize {
        self.width
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c].clone();
        for v in self.rows[r].iter_mut() {
            *v = v.clone() / p.clone();
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = row[c].clone();
                for (v, pv) in row.iter_mut().zip(&pivot_row) {
                    *v = v.clone() - f.clone() * pv.clone();
                }
            }
        }
        if !self.cost[c].is_zero() {
            let f = self.cost[c].clone();
            for (v, pv) in self.cost.iter_mut().zip(&pivot_row) {
                *v = v.clone() - f.clone() * pv.clone();
            }
        }
        self.basis[r] = c;
    }

    /// Runs simplex iterations on columns `< allowed`; `false` when unbounded.
    fn optimize(&mut self, allowed: usize) -> bool {
        loop {
            let Some(c) = (0..allowed).find(|&j| is_neg(&self.cost[j])) else {
                return true;
            };
            let rhs = self.rhs();
            let mut best: Option<(usize, S)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if is_pos(&row[c]) {
                    let ratio = row[rhs].clone() / row[c].clone();
                    let better = match &best {
                        None => true,
                        Some((bi, br)) => ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi]),
                    };
                    if better {
                        best = Some((i, ratio));
                    }
                }
            }
            match best {
                Some((r, _)) => self.pivot(r, c),
                None => return false,
            }
        }
    }
}

/// Row-reduces `[A | b]` and keeps a basis of its rows; `None` when the
/// equations are inconsistent.
pub fn independent_rows<S: Scalar>(a: &[Vec<S>], b: &[S], n: usize) -> Option<(Vec<Vec<S>>, Vec<S>)> {
    let mut rows: Vec<Vec<S>> = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let mut rank = 0;
    for col in 0..n {
        let Some(piv) = (rank..rows.len()).find(|&i| !rows[i][col].is_negligible(eps::<S>())) else {
            continue;
        };
        rows.swap(rank, piv);
        let p = rows[rank][col].clone();
        for v in rows[rank].iter_mut() {
            *v = v.clone() / p.clone();
        }
        let pivot_row = rows[rank].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != rank && !row[col].is_zero() {
                let f = row[col].clone();
                for (v, pv) in row.iter_mut().zip(&pivot_row) {
                    *v = v.clone() - f.clone() * pv.clone();
                }
            }
        }
        rank += 1;
    }
    if rows[rank..].iter().any(|r| !r[n].is_negligible(eps::<S>())) {
        return None;
    }
    rows.truncate(rank);
    let rhs = rows.iter_mut().map(|r| r.pop().expect("augmented row")).collect();
    Some((rows, rhs))
}

/// Minimizes `c·x` over `{x ≥ 0 : A x = b}`.
pub fn minimize<S: Scalar>(a: &[Vec<S>], b: &[S], c: &[S]) -> LpOutcome<S> {
    let n = c.len();
    let Some((a, b)) = independent_rows(a, b, n) else {
        return LpOutcome::Infeasible;
    };
    let m = a.len();
    let width = n + m;
    let mut rows: Vec<Vec<S>> = a
        .iter()
        .zip(b)
        .enumerate()
        .map(|(i, (row, bi))| {
            let flip = bi.is_negative();
            let mut r: Vec<S> = row.iter().map(|v| if flip { -v.clone() } else { v.clone() }).collect();
            r.extend((0..m).map(|k| if k == i { S::one() } else { S::zero() }));
            r.push(if flip { -bi.clone() } else { bi.clone() });
            r
        })
        .collect();

    // Phase I: minimise the sum of artificials, expressed in reduced costs.
    let mut cost = vec![S::zero(); width + 1];
    for row in &rows {
        for j in 0..n {
            cost[j] = cost[j].clone() - row[j].clone();
        }
        cost[width] = cost[width].clone() - row[width].clone();
    }
    let basis = (n..n + m).collect();
    let mut t = Tableau { rows: std::mem::take(&mut rows), cost, basis, width };
    t.optimize(n);
    if is_neg(&t.cost[width]) {
        return LpOutcome::Infeasible;
    }

    // Drive artificials out of the basis; rows where that fails are redundant.
    let mut r = 0;
    while r < t.rows.len() {
        if t.basis[r] >= n {
            match (0..n).find(|&j| !t.rows[r][j].is_negligible(eps::<S>())) {
                Some(j) => {
                    t.pivot(r, j);
                    r += 1;
                }
                None => {
                    t.rows.remove(r);
                    t.basis.remove(r);
                }
            }
        } else {
            r += 1;
        }
    }

    // Phase II.
    let mut cost = vec![S::zero(); width + 1];
    cost[..n].clone_from_slice(c);
    for (row, &bv) in t.rows.iter().zip(&t.basis) {
        let f = cost[bv].clone();
        if !f.is_zero() {
            for (v, rv) in cost.iter_mut().zip(row) {
                *v = v.clone() - f.clone() * rv.clone();
            }
        }
    }
    t.cost = cost;
    if !t.optimize(n) {
        return LpOutcome::Unbounded;
    }
    let mut x = vec![S::zero(); n];
    for (row, &bv) in t.rows.iter().zip(&t.basis) {
        x[bv] = row[width].clone();
    }
    let value = x.iter().zip(c).fold(S::zero(), |acc, (xi, ci)| acc + xi.clone() * ci.clone());
    LpOutcome::Optimal { x, value }
}

/// Some point of `{x ≥ 0 : A x = b}`, if the set is non-empty.
pub fn feasible_point<S: Scalar>(a: &[Vec<S>], b: &[S], n: usize) -> Option<Vec<S>> {
    match minimize(a, b, &vec![S::zero(); n]) {
        LpOutcome::Optimal { x, .. } => Some(x),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratio;
    use num_rational::BigRational;

    fn r(n: i64) -> BigRational {
        ratio(n, 1)
    }

    #[test]
    fn solves_small_program_exactly() {
        // x + 2y = 3, minimise y then maximise y.
        let a = vec![vec![r(1), r(2)]];
        let b = vec![r(3)];
        match minimize(&a, &b, &[r(0), r(1)]) {
            LpOutcome::Optimal { x, value } => {
                assert_eq!(value, r(0));
                assert_eq!(x, vec![r(3), r(0)]);
            }
            o => panic!("{o:?}"),
        }
        match minimize(&a, &b, &[r(0), r(-1)]) {
            LpOutcome::Optimal { x, .. } => assert_eq!(x, vec![r(0), ratio(3, 2)]),
            o => panic!("{o:?}"),
        }
    }

    #[test]
    fn detects_infeasible_and_unbounded() {
        let a = vec![vec![r(1), r(1)], vec![r(1), r(1)]];
        assert_eq!(minimize(&a, &[r(1), r(2)], &[r(0), r(0)]), LpOutcome::Infeasible);
        let a = vec![vec![r(1), r(-1)]];
        assert_eq!(minimize(&a, &[r(1)], &[r(0), r(-1)]), LpOutcome::Unbounded);
        assert_eq!(minimize(&[vec![r(1)]], &[r(-1)], &[r(0)]), LpOutcome::Infeasible);
    }

    #[test]
    fn redundant_rows_are_dropped() {
        let a = vec![vec![r(1), r(1)], vec![r(2), r(2)]];
        let x = feasible_point(&a, &[r(2), r(4)], 2).unwrap();
        assert_eq!(x[0].clone() + x[1].clone(), r(2));
    }

    #[test]
    fn float_mode_agrees() {
        let a: Vec<Vec<f64>> = vec![vec![1.0, 2.0, 0.0], vec![0.0, 1.0, 1.0]];
        match minimize(&a, &[3.0, 1.0], &[1.0, 0.0, 0.0]) {
            LpOutcome::Optimal { value, .. } => assert!((value - 1.0).abs() < 1e-12),
            o => panic!("{o:?}"),
        }
    }
}
