//! Strict feasibility of small systems of linear inequalities `Aᵢ·x < bᵢ`.
//!
//! The oracle maximizes the common slack `t` in `Aᵢ·x + ‖Aᵢ‖t ≤ bᵢ`, `t ≤ 1`.
//! The dual problem `min bᵀy + z` subject to `Aᵀy = 0`, `Σ‖Aᵢ‖yᵢ + z = 1`,
//! `y, z ≥ 0` has few enough vertices at these sizes to enumerate outright,
//! which makes the answer exact up to rounding and fully deterministic.
//! An optimal dual vertex with value `t* ≤ margin` is a Farkas certificate.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::minkowski::Wedge;
use crate::tolerances::FEASIBILITY_MARGIN;

/// Outcome of a strict-feasibility query.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Feasibility {
    /// `witness` satisfies every inequality with slack at least `margin`
    /// (normalized by the row norm).
    Feasible { witness: Vec<f64>, margin: f64 },
    /// `y ≥ 0` with `yᵀA = 0` and `yᵀb = value ≤ margin`, so no point beats
    /// the margin on all rows at once.
    Infeasible { certificate: Vec<f64>, value: f64 },
}

impl Feasibility {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Feasibility::Feasible { .. })
    }

    /// The witness point, if any.
    pub fn witness(&self) -> Option<&[f64]> {
        match self {
            Feasibility::Feasible { witness, .. } => Some(witness),
            Feasibility::Infeasible { .. } => None,
        }
    }
}

/// Optimal common slack `t*` together with a primal point and a dual vertex.
#[derive(Clone, Debug, PartialEq)]
pub struct SlackSolution {
    pub slack: f64,
    pub point: Vec<f64>,
    pub dual: Vec<f64>,
}

fn combinations(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] != i + n - k {
                break;
            }
            if i == 0 {
                return;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Maximizes the normalized slack of `rows·x < rhs`, capped at 1.
///
/// Rows with zero norm are dropped when `rhs > 0` and force slack `−∞` otherwise.
pub fn max_slack(rows: &[Vec<f64>], rhs: &[f64]) -> SlackSolution {
    assert_eq!(rows.len(), rhs.len());
    let dim = rows.first().map_or(0, |r| r.len());
    let m = rows.len();

    let mut norms = Vec::with_capacity(m);
    for (i, r) in rows.iter().enumerate() {
        let n = r.iter().map(|c| c * c).sum::<f64>().sqrt();
        if n == 0.0 && rhs[i] <= 0.0 {
            let mut dual = vec![0.0; m];
            dual[i] = 1.0;
            return SlackSolution { slack: f64::NEG_INFINITY, point: vec![0.0; dim], dual };
        }
        norms.push(n);
    }
    let active: Vec<usize> = (0..m).filter(|&i| norms[i] > 0.0).collect();
    if active.is_empty() {
        return SlackSolution { slack: 1.0, point: vec![0.0; dim], dual: vec![0.0; m] };
    }

    // Normalized rows a_i/‖a_i‖ and right-hand sides b_i/‖a_i‖.
    let k = active.len();
    let a = DMatrix::from_fn(k, dim, |r, c| rows[active[r]][c] / norms[active[r]]);
    let b = DVector::from_fn(k, |r, _| rhs[active[r]] / norms[active[r]]);

    // Row-space reduction of Aᵀy = 0.
    let svd = a.transpose().svd(true, false);
    let u = svd.u.expect("left singular vectors requested");
    let smax = svd.singular_values.max();
    let rank = svd.singular_values.iter().filter(|&&s| s > 1e-12 * smax.max(1.0)).count();
    let reduced = u.columns(0, rank).transpose() * a.transpose();

    // Equality system over (y_1..y_k, z): reduced·y = 0, Σ y + z = 1.
    let nvar = k + 1;
    let neq = rank + 1;
    let mut eq = DMatrix::zeros(neq, nvar);
    for r in 0..rank {
        for c in 0..k {
            eq[(r, c)] = reduced[(r, c)];
        }
    }
    for c in 0..nvar {
        eq[(rank, c)] = 1.0;
    }
    let mut rhs_eq = DVector::zeros(neq);
    rhs_eq[rank] = 1.0;
    let cost = DVector::from_fn(nvar, |i, _| if i < k { b[i] } else { 1.0 });

    let mut best: Option<(f64, Vec<usize>, DVector<f64>)> = None;
    combinations(nvar, neq, |basis| {
        let sub = DMatrix::from_fn(neq, neq, |r, c| eq[(r, basis[c])]);
        let lu = sub.clone().lu();
        let Some(sol) = lu.solve(&rhs_eq) else { return };
        if (&sub * &sol - &rhs_eq).amax() > 1e-9 || sol.iter().any(|&s| s < -1e-12) {
            return;
        }
        let val: f64 = basis.iter().zip(sol.iter()).map(|(&j, &s)| cost[j] * s.max(0.0)).sum();
        if best.as_ref().is_none_or(|(bv, _, _)| val < *bv - 1e-14) {
            best = Some((val, basis.to_vec(), sol));
        }
    });
    let (slack, basis, sol) = best.expect("the dual always has a vertex");

    let mut dual = vec![0.0; m];
    for (j, &var) in basis.iter().enumerate() {
        if var < k {
            dual[active[var]] = sol[j].max(0.0) / norms[active[var]];
        }
    }

    // Primal vertex over the row space: x = Q w, variables (w, t).
    let q = svd_rows_basis(&a, rank);
    let aq = &a * &q;
    let nprim = rank + 1;
    let prim_rows = DMatrix::from_fn(k + 1, nprim, |r, c| {
        if r < k {
            if c < rank { aq[(r, c)] } else { 1.0 }
        } else if c < rank {
            0.0
        } else {
            1.0
        }
    });
    let prim_rhs = DVector::from_fn(k + 1, |r, _| if r < k { b[r] } else { 1.0 });
    let mut best_primal: Option<(f64, DVector<f64>)> = None;
    combinations(k + 1, nprim, |basis| {
        let sub = DMatrix::from_fn(nprim, nprim, |r, c| prim_rows[(basis[r], c)]);
        let rhs_b = DVector::from_fn(nprim, |r, _| prim_rhs[basis[r]]);
        let Some(sol) = sub.clone().lu().solve(&rhs_b) else { return };
        if (&sub * &sol - &rhs_b).amax() > 1e-9 {
            return;
        }
        let resid = &prim_rhs - &prim_rows * &sol;
        if resid.iter().any(|&r| r < -1e-9) {
            return;
        }
        let t = sol[rank];
        if best_primal.as_ref().is_none_or(|(bt, _)| t > *bt + 1e-14) {
            best_primal = Some((t, sol));
        }
    });
    let point = match best_primal {
        Some((_, sol)) => {
            let w = sol.rows(0, rank).into_owned();
            (&q * w).iter().copied().collect()
        }
        None => vec![0.0; dim],
    };
    SlackSolution { slack: slack.min(1.0), point, dual }
}

/// Orthonormal basis (columns) of the row space of `a`, of the given rank.
fn svd_rows_basis(a: &DMatrix<f64>, rank: usize) -> DMatrix<f64> {
    let svd = a.clone().svd(false, true);
    let vt = svd.v_t.expect("right singular vectors requested");
    vt.rows(0, rank).transpose()
}

/// Decides whether `{x : rows·x < rhs}` contains a point with slack above
/// [`FEASIBILITY_MARGIN`].
pub fn strict_feasibility(rows: &[Vec<f64>], rhs: &[f64]) -> Feasibility {
    let sol = max_slack(rows, rhs);
    if sol.slack > FEASIBILITY_MARGIN {
        let margin = normalized_margin(rows, rhs, &sol.point);
        Feasibility::Feasible { witness: sol.point, margin }
    } else {
        let value = if sol.slack.is_finite() {
            sol.dual.iter().zip(rhs).map(|(y, b)| y * b).sum()
        } else {
            f64::NEG_INFINITY
        };
        Feasibility::Infeasible { certificate: sol.dual, value }
    }
}

/// `min_i (bᵢ − Aᵢ·x)/‖Aᵢ‖` for a given point.
pub fn normalized_margin(rows: &[Vec<f64>], rhs: &[f64], x: &[f64]) -> f64 {
    rows.iter()
        .zip(rhs)
        .filter_map(|(r, b)| {
            let n = r.iter().map(|c| c * c).sum::<f64>().sqrt();
            (n > 0.0).then(|| (b - r.iter().zip(x).map(|(a, x)| a * x).sum::<f64>()) / n)
        })
        .fold(f64::INFINITY, f64::min)
}

/// Checks a Farkas certificate: `y ≥ 0`, `yᵀA ≈ 0`, `yᵀb ≤ margin`, `y ≠ 0`.
pub fn certificate_is_valid(rows: &[Vec<f64>], rhs: &[f64], y: &[f64], tol: f64) -> bool {
    if y.iter().any(|&c| c < 0.0) || y.iter().all(|&c| c == 0.0) {
        return false;
    }
    let dim = rows.first().map_or(0, |r| r.len());
    let scale: f64 = y.iter().zip(rows).map(|(c, r)| c * r.iter().map(|a| a * a).sum::<f64>().sqrt()).sum();
    let combo = (0..dim).map(|j| y.iter().zip(rows).map(|(c, r)| c * r[j]).sum::<f64>().abs()).fold(0.0, f64::max);
    let value: f64 = y.iter().zip(rhs).map(|(c, b)| c * b).sum();
    combo <= tol * scale.max(1.0) && value <= FEASIBILITY_MARGIN * scale.max(1.0)
}

/// Rows `Aᵢ·x < bᵢ` of the intersection of the given wedges.
pub fn wedge_system(ws: &[Wedge]) -> (Vec<Vec<f64>>, Vec<f64>) {
    let mut rows = Vec::with_capacity(2 * ws.len());
    let mut rhs = Vec::with_capacity(2 * ws.len());
    for w in ws {
        for (r, b) in w.halfspace_rows() {
            rows.push(r.to_vec());
            rhs.push(b);
        }
    }
    (rows, rhs)
}

/// Whether the open wedges share a point, decided by the oracle alone.
pub fn wedges_intersect(ws: &[Wedge]) -> bool {
    let (rows, rhs) = wedge_system(ws);
    strict_feasibility(&rows, &rhs).is_feasible()
}

/// `W̄₁ ∩ W̄₂ = ∅`: the optimal common slack is strictly negative.
pub fn closures_disjoint(w1: &Wedge, w2: &Wedge) -> bool {
    let (rows, rhs) = wedge_system(&[*w1, *w2]);
    max_slack(&rows, &rhs).slack < -FEASIBILITY_MARGIN
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn box_is_feasible() {
        // -1 < x < 1, -1 < y < 1
        let rows = vec![vec![1.0, 0.0], vec![-1.0, 0.0], vec![0.0, 1.0], vec![0.0, -1.0]];
        let rhs = vec![1.0, 1.0, 1.0, 1.0];
        let sol = max_slack(&rows, &rhs);
        assert!((sol.slack - 1.0).abs() < 1e-12);
        match strict_feasibility(&rows, &rhs) {
            Feasibility::Feasible { witness, margin } => {
                assert!(margin > 0.99);
                assert!(witness.iter().all(|c| c.abs() < 1e-9));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn small_box_slack_is_inradius() {
        let r = 0.25;
        let rows = vec![vec![1.0, 0.0, 0.0], vec![-1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, -1.0, 0.0]];
        let rhs = vec![r; 4];
        let sol = max_slack(&rows, &rhs);
        assert!((sol.slack - r).abs() < 1e-12);
    }

    #[test]
    fn contradictory_pair_is_certified() {
        // x < 0 and x > 0
        let rows = vec![vec![1.0, 0.0], vec![-1.0, 0.0]];
        let rhs = vec![0.0, 0.0];
        match strict_feasibility(&rows, &rhs) {
            Feasibility::Infeasible { certificate, value } => {
                assert!(value.abs() < 1e-12);
                assert!(certificate_is_valid(&rows, &rhs, &certificate, 1e-9));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn separated_halfspaces_have_negative_slack() {
        // x < -1 and x > 1
        let rows = vec![vec![1.0], vec![-1.0]];
        let rhs = vec![-1.0, -1.0];
        let sol = max_slack(&rows, &rhs);
        assert!((sol.slack + 1.0).abs() < 1e-12);
    }

    #[test]
    fn unbounded_cone_is_capped() {
        let rows = vec![vec![1.0, 1.0], vec![1.0, -1.0]];
        let rhs = vec![0.0, 0.0];
        let sol = max_slack(&rows, &rhs);
        assert_eq!(sol.slack, 1.0);
        assert!(normalized_margin(&rows, &rhs, &sol.point) >= 1.0 - 1e-9);
    }

    #[test]
    fn zero_rows() {
        let rows = vec![vec![0.0, 0.0], vec![1.0, 0.0]];
        assert!(strict_feasibility(&rows, &[1.0, 0.0]).is_feasible());
        assert!(!strict_feasibility(&rows, &[-1.0, 0.0]).is_feasible());
    }

    #[test]
    fn combinations_count() {
        let mut n = 0;
        combinations(6, 3, |_| n += 1);
        assert_eq!(n, 20);
        let mut n = 0;
        combinations(3, 3, |c| {
            assert_eq!(c, &[0, 1, 2]);
            n += 1
        });
        assert_eq!(n, 1);
    }
}
