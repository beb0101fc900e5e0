//! Exact rational linear algebra and a Bland-rule simplex method.

use std::collections::BTreeMap;

use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::rational::Q;

/// Sparse vector indexed by coordinate.
pub type SparseVec = BTreeMap<usize, Q>;

fn axpy(target: &mut SparseVec, factor: &Q, v: &SparseVec) {
    for (i, x) in v {
        let e = target.entry(*i).or_insert_with(Q::zero);
        *e += factor * x;
        if e.is_zero() {
            target.remove(i);
        }
    }
}

/// Incremental row echelon form that remembers how each stored row combines the inserted vectors.
#[derive(Clone, Debug, Default)]
pub struct Echelon {
    rows: Vec<(usize, SparseVec, SparseVec)>,
    inserted: usize,
}

impl Echelon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `v`; returns the remainder and the combination `c` with `v = remainder + Σ c_l·vec_l`.
    pub fn reduce(&self, v: &SparseVec) -> (SparseVec, SparseVec) {
        let mut rem = v.clone();
        let mut comb = SparseVec::new();
        for (p, row, rc) in &self.rows {
            if let Some(x) = rem.get(p) {
                let f = x / &row[p];
                let neg = -f.clone();
                axpy(&mut rem, &neg, row);
                axpy(&mut comb, &f, rc);
            }
        }
        (rem, comb)
    }

    /// Inserts vector number `self.inserted`. On dependence returns the combination of earlier
    /// vectors equal to it.
    pub fn insert(&mut self, v: &SparseVec) -> Option<SparseVec> {
        let label = self.inserted;
        self.inserted += 1;
        let (rem, comb) = self.reduce(v);
        if rem.is_empty() {
            return Some(comb);
        }
        let pivot = *rem.keys().next().expect("nonzero remainder");
        let mut rc = comb;
        for x in rc.values_mut() {
            *x = -x.clone();
        }
        rc.insert(label, Q::from_integer(1.into()));
        self.rows.push((pivot, rem, rc));
        None
    }

    /// A combination of inserted vectors equal to `v`, if `v` lies in their span.
    pub fn solve(&self, v: &SparseVec) -> Option<SparseVec> {
        let (rem, comb) = self.reduce(v);
        rem.is_empty().then_some(comb)
    }
}

/// Basis of the kernel of the map sending basis vector j to `columns[j]`.
pub fn kernel(columns: &[SparseVec]) -> Vec<SparseVec> {
    let mut ech = Echelon::new();
    let mut out = Vec::new();
    for (j, col) in columns.iter().enumerate() {
        if let Some(mut comb) = ech.insert(col) {
            for x in comb.values_mut() {
                *x = -x.clone();
            }
            comb.insert(j, Q::from_integer(1.into()));
            out.push(comb);
        }
    }
    out
}

/// Result of a linear program.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LpSolution {
    pub x: Vec<Q>,
    pub value: Q,
    pub pivots: usize,
}

/// Minimizes `c·x` subject to `Ax = b`, `x ≥ 0`, starting from a feasible basis whose columns form
/// the identity (`b ≥ 0`). Bland's rule prevents cycling.
pub fn simplex(rows: &[SparseVec], b: &[Q], c: &[Q], basis: Vec<usize>) -> Result<LpSolution> {
    let m = rows.len();
    let n = c.len();
    if b.len() != m || basis.len() != m {
        return Err(Error::invalid("LP dimensions disagree"));
    }
    if b.iter().any(|x| x.is_negative()) {
        return Err(Error::invalid("LP start is infeasible"));
    }
    let mut t: Vec<Vec<Q>> = rows
        .iter()
        .map(|r| {
            let mut row = vec![Q::zero(); n];
            for (j, x) in r {
                row[*j] = x.clone();
            }
            row
        })
        .collect();
    let mut rhs: Vec<Q> = b.to_vec();
    let mut basis = basis;
    for (i, &j) in basis.iter().enumerate() {
        if t[i][j] != Q::from_integer(1.into()) || (0..m).any(|k| k != i && !t[k][j].is_zero()) {
            return Err(Error::invalid("LP start basis is not an identity"));
        }
    }
    let mut reduced: Vec<Q> = c.to_vec();
    for (i, &j) in basis.iter().enumerate() {
        let cb = c[j].clone();
        if !cb.is_zero() {
            for (k, x) in t[i].iter().enumerate() {
                if !x.is_zero() {
                    reduced[k] -= &cb * x;
                }
            }
        }
    }
    let mut pivots = 0;
    loop {
        let Some(enter) = (0..n).find(|&j| reduced[j].is_negative()) else { break };
        let mut leave: Option<(usize, Q)> = None;
        for i in 0..m {
            if t[i][enter].is_positive() {
                let ratio = &rhs[i] / &t[i][enter];
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && basis[i] < basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let Some((r, _)) = leave else {
            return Err(Error::invalid("LP is unbounded"));
        };
        let piv = t[r][enter].clone();
        for x in t[r].iter_mut() {
            if !x.is_zero() {
                *x /= &piv;
            }
        }
        rhs[r] /= &piv;
        let nz: Vec<usize> = (0..n).filter(|&k| !t[r][k].is_zero()).collect();
        let prow: Vec<(usize, Q)> = nz.iter().map(|&k| (k, t[r][k].clone())).collect();
        let prhs = rhs[r].clone();
        for i in 0..m {
            if i == r || t[i][enter].is_zero() {
                continue;
            }
            let f = t[i][enter].clone();
            for (k, x) in &prow {
                let d = &f * x;
                t[i][*k] -= d;
            }
            rhs[i] -= &f * &prhs;
        }
        if !reduced[enter].is_zero() {
            let f = reduced[enter].clone();
            for (k, x) in &prow {
                reduced[*k] -= &f * x;
            }
        }
        basis[r] = enter;
        pivots += 1;
    }
    let mut x = vec![Q::zero(); n];
    for (i, &j) in basis.iter().enumerate() {
        x[j] = rhs[i].clone();
    }
    let value = x.iter().zip(c).map(|(a, b)| a * b).fold(Q::zero(), |s, v| s + v);
    Ok(LpSolution { x, value, pivots })
}

/// Solves a square dense system exactly; `None` if singular.
pub fn solve_dense(mut a: Vec<Vec<Q>>, mut b: Vec<Q>) -> Option<Vec<Q>> {
    let n = b.len();
    for col in 0..n {
        let p = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, p);
        b.swap(col, p);
        let piv = a[col][col].clone();
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = &a[r][col] / &piv;
                for k in col..n {
                    let d = &f * &a[col][k];
                    a[r][k] -= d;
                }
                let d = &f * &b[col];
                b[r] -= d;
            }
        }
    }
    Some((0..n).map(|i| &b[i] / &a[i][i]).collect())
}

/// Minimum of `c·x` over all basic feasible solutions, by enumeration of column subsets.
/// Only for tiny programs; used as an independent oracle.
pub fn brute_force_lp(rows: &[SparseVec], b: &[Q], c: &[Q]) -> Option<Q> {
    let m = rows.len();
    let n = c.len();
    let mut best: Option<Q> = None;
    let mut idx: Vec<usize> = (0..m).collect();
    if m > n {
        return None;
    }
    loop {
        let a: Vec<Vec<Q>> = rows
            .iter()
            .map(|r| idx.iter().map(|j| r.get(j).cloned().unwrap_or_else(Q::zero)).collect())
            .collect();
        if let Some(xb) = solve_dense(a, b.to_vec()) {
            if xb.iter().all(|x| !x.is_negative()) {
                let v = idx.iter().zip(&xb).map(|(j, x)| &c[*j] * x).fold(Q::zero(), |s, t| s + t);
                if best.as_ref().map_or(true, |bv| v < *bv) {
                    best = Some(v);
                }
            }
        }
        let mut i = m;
        loop {
            if i == 0 {
                return best;
            }
            i -= 1;
            if idx[i] != i + n - m {
                break;
            }
        }
        idx[i] += 1;
        for k in i + 1..m {
            idx[k] = idx[k - 1] + 1;
        }
    }
}

fn to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

fn float_solve(problem: &microlp::Problem) -> Option<microlp::Solution> {
    let sol = problem.solve().ok()?.into_solution().ok()?;
    (sol.status() == microlp::SolutionStatus::Optimal).then_some(sol)
}

/// `min Σ_i |z_i − (Σ_j y_j D_j)_i|` over free `y`, solved in floating point and then certified
/// exactly: `y` and a dual `π` (`Dᵀπ = 0`, `|π| ≤ 1`) are rebuilt over ℚ from the active sets
/// of the float optima, and the result is returned only if both are feasible with equal value.
pub fn l1_fit_certified(columns: &[SparseVec], z: &[Q]) -> Option<(Vec<Q>, Q)> {
    use microlp::{ComparisonOp, OptimizationDirection, Problem};
    const TOL: f64 = 1e-9;
    let m = z.len();
    let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); m];
    for (j, col) in columns.iter().enumerate() {
        for (i, x) in col {
            rows[*i].push((j, to_f64(x)));
        }
    }
    let zf: Vec<f64> = z.iter().map(to_f64).collect();

    let mut primal = Problem::new(OptimizationDirection::Minimize);
    let y: Vec<_> = columns.iter().map(|_| primal.add_var(0.0, (f64::NEG_INFINITY, f64::INFINITY))).collect();
    for (i, row) in rows.iter().enumerate() {
        let u = primal.add_var(1.0, (0.0, f64::INFINITY));
        let v = primal.add_var(1.0, (0.0, f64::INFINITY));
        let mut terms: Vec<(microlp::Variable, f64)> = row.iter().map(|(j, x)| (y[*j], *x)).collect();
        terms.push((u, 1.0));
        terms.push((v, -1.0));
        primal.add_constraint(terms.as_slice(), ComparisonOp::Eq, zf[i]);
    }
    let psol = float_solve(&primal)?;
    let yf: Vec<f64> = y.iter().map(|v| psol[*v]).collect();
    let residual: Vec<f64> = (0..m)
        .map(|i| zf[i] - rows[i].iter().map(|(j, x)| x * yf[*j]).sum::<f64>())
        .collect();
    let support: Vec<usize> = (0..m).filter(|&i| residual[i].abs() > TOL).collect();
    let active: Vec<usize> = (0..columns.len()).filter(|&j| yf[j].abs() > TOL).collect();
    let free_rows: BTreeMap<usize, usize> = (0..m)
        .filter(|i| residual[*i].abs() <= TOL)
        .enumerate()
        .map(|(k, i)| (i, k))
        .collect();
    let mut ech = Echelon::new();
    for &j in &active {
        let v: SparseVec = columns[j]
            .iter()
            .filter_map(|(i, x)| free_rows.get(i).map(|k| (*k, x.clone())))
            .collect();
        ech.insert(&v);
    }
    let rhs: SparseVec = free_rows
        .iter()
        .filter(|(i, _)| !z[**i].is_zero())
        .map(|(i, k)| (*k, z[*i].clone()))
        .collect();
    let comb = ech.solve(&rhs)?;
    let mut yq = vec![Q::zero(); columns.len()];
    for (l, x) in comb {
        yq[active[l]] = x;
    }
    let mut r: Vec<Q> = z.to_vec();
    for (j, col) in columns.iter().enumerate() {
        if !yq[j].is_zero() {
            for (i, x) in col {
                r[*i] -= &yq[j] * x;
            }
        }
    }
    let value: Q = r.iter().map(|x| x.abs()).fold(Q::zero(), |a, b| a + b);

    let mut dual = Problem::new(OptimizationDirection::Maximize);
    let pi: Vec<_> = zf.iter().map(|c| dual.add_var(*c, (-1.0, 1.0))).collect();
    for col in columns {
        let terms: Vec<(microlp::Variable, f64)> = col.iter().map(|(i, x)| (pi[*i], to_f64(x))).collect();
        if !terms.is_empty() {
            dual.add_constraint(terms.as_slice(), ComparisonOp::Eq, 0.0);
        }
    }
    let dsol = float_solve(&dual)?;
    let pf: Vec<f64> = pi.iter().map(|v| dsol[*v]).collect();
    let mut pq: Vec<Q> = vec![Q::zero(); m];
    let mut fixed = vec![false; m];
    for i in 0..m {
        if (pf[i].abs() - 1.0).abs() <= TOL {
            pq[i] = Q::from_integer(if pf[i] > 0.0 { 1 } else { -1 }.into());
            fixed[i] = true;
        }
    }
    for &i in &support {
        let s = if r[i].is_positive() { 1 } else { -1 };
        if !fixed[i] {
            pq[i] = Q::from_integer(s.into());
            fixed[i] = true;
        }
    }
    let free: Vec<usize> = (0..m).filter(|i| !fixed[*i]).collect();
    let mut ech = Echelon::new();
    for &i in &free {
        let v: SparseVec = rows[i].iter().map(|(j, _)| (*j, columns[*j][&i].clone())).collect();
        ech.insert(&v);
    }
    let mut rhs = SparseVec::new();
    for (j, col) in columns.iter().enumerate() {
        let s: Q = col.iter().filter(|(i, _)| fixed[**i]).map(|(i, x)| &pq[*i] * x).fold(Q::zero(), |a, b| a + b);
        if !s.is_zero() {
            rhs.insert(j, -s);
        }
    }
    let comb = ech.solve(&rhs)?;
    for (l, x) in comb {
        pq[free[l]] = x;
    }
    let one = Q::from_integer(1.into());
    if pq.iter().any(|x| x.abs() > one) {
        return None;
    }
    if columns
        .iter()
        .any(|col| !col.iter().map(|(i, x)| &pq[*i] * x).fold(Q::zero(), |a, b| a + b).is_zero())
    {
        return None;
    }
    let dual_value = z.iter().zip(&pq).map(|(a, b)| a * b).fold(Q::zero(), |a, b| a + b);
    (dual_value == value).then_some((yq, value))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qi};

    fn sv(entries: &[(usize, i64)]) -> SparseVec {
        entries.iter().map(|(i, x)| (*i, qi(*x))).collect()
    }

    #[test]
    fn echelon_rank_and_solve() {
        let mut e = Echelon::new();
        assert!(e.insert(&sv(&[(0, 1), (1, 1)])).is_none());
        assert!(e.insert(&sv(&[(1, 1), (2, 1)])).is_none());
        let dep = e.insert(&sv(&[(0, 1), (2, -1)])).unwrap();
        assert_eq!(dep, sv(&[(0, 1), (1, -1)]));
        assert_eq!(e.rank(), 2);
        assert_eq!(e.solve(&sv(&[(0, 2), (1, 3), (2, 1)])), Some(sv(&[(0, 2), (1, 1)])));
        assert_eq!(e.solve(&sv(&[(0, 1)])), None);
    }

    #[test]
    fn kernel_of_cycle_graph() {
        let cols = vec![sv(&[(0, -1), (1, 1)]), sv(&[(1, -1), (2, 1)]), sv(&[(2, -1), (0, 1)])];
        let k = kernel(&cols);
        assert_eq!(k, vec![sv(&[(0, 1), (1, 1), (2, 1)])]);
    }

    /// min |3 − y| + |1 − y| → 2, written with slacks.
    #[test]
    fn simplex_matches_brute_force() {
        let rows = vec![sv(&[(0, 1), (1, -1), (2, 1), (3, -1)]), sv(&[(0, 1), (1, -1), (4, 1), (5, -1)])];
        let b = vec![qi(3), qi(1)];
        let c = vec![qi(0), qi(0), qi(1), qi(1), qi(1), qi(1)];
        let sol = simplex(&rows, &b, &c, vec![2, 4]).unwrap();
        assert_eq!(sol.value, qi(2));
        assert_eq!(brute_force_lp(&rows, &b, &c), Some(qi(2)));
        let rows2 = vec![sv(&[(0, 2), (1, 1), (2, 1)])];
        let sol2 = simplex(&rows2, &[qi(1)], &[qi(-1), qi(-1), qi(0)], vec![2]).unwrap();
        assert_eq!(sol2.value, qi(-1));
        assert_eq!(brute_force_lp(&rows2, &[qi(1)], &[qi(-1), qi(-1), qi(0)]), Some(qi(-1)));
        assert_eq!(solve_dense(vec![vec![qi(2)]], vec![qi(1)]), Some(vec![q(1, 2)]));
    }
}
