//! Dense linear programming and small quadratic projection solvers.
//!
//! A two-phase primal simplex over a dense tableau, with Bland's
//! anti-cycling rule (lowest-index entering column, lowest basic index on
//! ratio ties). Instances here are tiny, so determinism and auditability
//! win over speed: reduced costs are recomputed from scratch each
//! iteration rather than updated incrementally.

use itertools::Itertools;
use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::{Matrix, Vector};

/// Pivot tolerance for the simplex method.
pub const PIVOT_TOL: f64 = 1e-9;

/// Hard iteration cap; exceeding it yields [`LpStatus::DidNotConverge`].
pub const MAX_ITERATIONS: usize = 1_000_000;

/// Feasibility tolerance on reported optima.
pub const FEAS_TOL: f64 = 1e-7;

/// A dense LP: minimize `objective . x` subject to
/// `a_ub x <= b_ub`, `a_eq x = b_eq`, and optional per-variable lower
/// bounds (`None` means the variable is free).
#[derive(Debug, Clone)]
pub struct LinearProgram {
    pub objective: Vector,
    pub a_ub: Matrix,
    pub b_ub: Vector,
    pub a_eq: Matrix,
    pub b_eq: Vector,
    pub lower: Vec<Option<f64>>,
}

impl LinearProgram {
    pub fn minimize(objective: Vector) -> Self {
        let n = objective.len();
        LinearProgram {
            objective,
            a_ub: DMatrix::zeros(0, n),
            b_ub: DVector::zeros(0),
            a_eq: DMatrix::zeros(0, n),
            b_eq: DVector::zeros(0),
            lower: vec![None; n],
        }
    }

    pub fn with_ub(mut self, a: Matrix, b: Vector) -> Self {
        self.a_ub = a;
        self.b_ub = b;
        self
    }

    pub fn with_eq(mut self, a: Matrix, b: Vector) -> Self {
        self.a_eq = a;
        self.b_eq = b;
        self
    }

    /// Set a lower bound on variable `j`.
    pub fn with_lower(mut self, j: usize, bound: f64) -> Self {
        self.lower[j] = Some(bound);
        self
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    fn validate(&self) -> Result<()> {
        let n = self.num_vars();
        if n == 0 {
            return Err(Error::InvalidInput("LP needs at least one variable".into()));
        }
        for (mat, rhs, what) in [(&self.a_ub, &self.b_ub, "ub"), (&self.a_eq, &self.b_eq, "eq")] {
            if mat.nrows() != rhs.len() {
                return Err(Error::DimensionMismatch { expected: mat.nrows(), got: rhs.len() });
            }
            if mat.nrows() > 0 && mat.ncols() != n {
                return Err(Error::DimensionMismatch { expected: n, got: mat.ncols() });
            }
            let _ = what;
        }
        if self.lower.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: self.lower.len() });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    DidNotConverge,
}

/// Solver output. `x` and `value` are present for `Optimal`; `ray` is a
/// certificate direction for `Unbounded` (feasible recession direction of
/// strictly decreasing objective).
#[derive(Debug, Clone)]
pub struct LpSolution {
    pub status: LpStatus,
    pub x: Option<Vector>,
    pub value: Option<f64>,
    pub iterations: usize,
    pub ray: Option<Vector>,
}

/// Map from standardized (nonnegative) columns back to original variables.
struct VarMap {
    /// (original variable index, sign) per standardized column.
    cols: Vec<(usize, f64)>,
    shift: Vec<f64>,
    n_orig: usize,
}

impl VarMap {
    fn to_original(&self, y: &[f64]) -> Vector {
        let mut x = DVector::from_column_slice(&self.shift);
        for (col, &(j, sign)) in self.cols.iter().enumerate() {
            x[j] += sign * y[col];
        }
        let _ = self.n_orig;
        x
    }

    fn direction_to_original(&self, dy: &[f64]) -> Vector {
        let mut d = DVector::zeros(self.n_orig);
        for (col, &(j, sign)) in self.cols.iter().enumerate() {
            d[j] += sign * dy[col];
        }
        d
    }
}

struct Tableau {
    /// m x ncols, the current B^{-1} A.
    rows: Vec<Vec<f64>>,
    /// Right-hand side, kept nonnegative.
    rhs: Vec<f64>,
    basis: Vec<usize>,
    iterations: usize,
}

enum RunOutcome {
    Optimal,
    Unbounded { entering: usize },
    IterationCap,
}

impl Tableau {
    fn ncols(&self) -> usize {
        self.rows.first().map_or(0, |r| r.len())
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let ncols = self.ncols();
        let piv = self.rows[row][col];
        for v in &mut self.rows[row] {
            *v /= piv;
        }
        self.rhs[row] /= piv;
        for i in 0..self.rows.len() {
            if i == row {
                continue;
            }
            let factor = self.rows[i][col];
            if factor != 0.0 {
                for j in 0..ncols {
                    let upd = self.rows[row][j];
                    self.rows[i][j] -= factor * upd;
                }
                self.rhs[i] -= factor * self.rhs[row];
                if self.rhs[i] < 0.0 && self.rhs[i] > -1e-12 {
                    self.rhs[i] = 0.0;
                }
            }
        }
        self.basis[row] = col;
    }

    /// Reduced costs for the cost vector `c` under the current basis.
    fn reduced_costs(&self, c: &[f64]) -> Vec<f64> {
        let ncols = self.ncols();
        let mut r = c.to_vec();
        for (i, &bi) in self.basis.iter().enumerate() {
            let cb = c[bi];
            if cb != 0.0 {
                for j in 0..ncols {
                    r[j] -= cb * self.rows[i][j];
                }
            }
        }
        r
    }

    fn objective_value(&self, c: &[f64]) -> f64 {
        self.basis.iter().enumerate().map(|(i, &bi)| c[bi] * self.rhs[i]).sum()
    }

    /// Primal simplex with Bland's rule. Entering columns are restricted
    /// to indices below `allow_cols`.
    fn run(&mut self, c: &[f64], allow_cols: usize) -> RunOutcome {
        loop {
            if self.iterations > MAX_ITERATIONS {
                return RunOutcome::IterationCap;
            }
            let reduced = self.reduced_costs(c);
            // Bland: lowest index with negative reduced cost.
            let entering = (0..allow_cols).find(|&j| reduced[j] < -PIVOT_TOL);
            let Some(entering) = entering else {
                return RunOutcome::Optimal;
            };
            // Ratio test; ties broken by smallest basic variable index.
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.rows.len() {
                let a = self.rows[i][entering];
                if a > PIVOT_TOL {
                    let ratio = self.rhs[i] / a;
                    match leave {
                        None => leave = Some((i, ratio)),
                        Some((best_i, best_r)) => {
                            if ratio < best_r - PIVOT_TOL
                                || (ratio < best_r + PIVOT_TOL
                                    && self.basis[i] < self.basis[best_i])
                            {
                                leave = Some((i, ratio));
                            }
                        }
                    }
                }
            }
            let Some((row, _)) = leave else {
                return RunOutcome::Unbounded { entering };
            };
            self.pivot(row, entering);
            self.iterations += 1;
        }
    }
}

/// Solve a dense LP by the two-phase primal simplex method.
pub fn solve_lp(p: &LinearProgram) -> Result<LpSolution> {
    p.validate()?;
    let n = p.num_vars();

    // Standardize: shift bounded variables, split free ones.
    let mut cols = Vec::new();
    let mut shift = vec![0.0; n];
    for j in 0..n {
        match p.lower[j] {
            Some(l) => {
                shift[j] = l;
                cols.push((j, 1.0));
            }
            None => {
                cols.push((j, 1.0));
                cols.push((j, -1.0));
            }
        }
    }
    let vmap = VarMap { cols, shift, n_orig: n };
    let nc = vmap.cols.len();
    let m_ub = p.a_ub.nrows();
    let m_eq = p.a_eq.nrows();
    let m = m_ub + m_eq;
    let nslack = m_ub;
    let ncols = nc + nslack;

    // Rows in standardized variables, slacks appended for ub rows.
    let mut rows = vec![vec![0.0; ncols + m]; m];
    let mut rhs = vec![0.0; m];
    for i in 0..m {
        let (mat, vec_b, offset) =
            if i < m_ub { (&p.a_ub, &p.b_ub, i) } else { (&p.a_eq, &p.b_eq, i - m_ub) };
        for (col, &(j, sign)) in vmap.cols.iter().enumerate() {
            rows[i][col] = mat[(offset, j)] * sign;
        }
        let mut r = vec_b[offset];
        for j in 0..n {
            r -= mat[(offset, j)] * vmap.shift[j];
        }
        rhs[i] = r;
        if i < m_ub {
            rows[i][nc + i] = 1.0;
        }
    }
    // Nonnegative right-hand sides.
    for i in 0..m {
        if rhs[i] < 0.0 {
            for v in &mut rows[i] {
                *v = -*v;
            }
            rhs[i] = -rhs[i];
        }
    }
    // Artificial identity block; artificials start basic.
    let mut basis = Vec::with_capacity(m);
    for i in 0..m {
        rows[i][ncols + i] = 1.0;
        basis.push(ncols + i);
    }

    let mut tab = Tableau { rows, rhs, basis, iterations: 0 };

    // Phase 1: minimize the sum of artificials.
    let mut c1 = vec![0.0; ncols + m];
    for v in c1.iter_mut().skip(ncols) {
        *v = 1.0;
    }
    match tab.run(&c1, ncols + m) {
        RunOutcome::IterationCap => {
            return Ok(LpSolution {
                status: LpStatus::DidNotConverge,
                x: None,
                value: None,
                iterations: tab.iterations,
                ray: None,
            })
        }
        RunOutcome::Unbounded { .. } => {
            return Err(Error::Numerical("phase-1 objective cannot be unbounded".into()))
        }
        RunOutcome::Optimal => {}
    }
    if tab.objective_value(&c1) > FEAS_TOL {
        return Ok(LpSolution {
            status: LpStatus::Infeasible,
            x: None,
            value: None,
            iterations: tab.iterations,
            ray: None,
        });
    }

    // Drive artificials out of the basis; drop redundant rows.
    let mut drop_rows = Vec::new();
    for i in 0..tab.basis.len() {
        if tab.basis[i] >= ncols {
            let piv = (0..ncols).find(|&j| tab.rows[i][j].abs() > PIVOT_TOL);
            match piv {
                Some(j) => tab.pivot(i, j),
                None => drop_rows.push(i),
            }
        }
    }
    for &i in drop_rows.iter().rev() {
        tab.rows.remove(i);
        tab.rhs.remove(i);
        tab.basis.remove(i);
    }
    // Artificial columns are no longer needed.
    for row in &mut tab.rows {
        row.truncate(ncols);
    }

    // Phase 2 objective in standardized variables.
    let mut c2 = vec![0.0; ncols];
    for (col, &(j, sign)) in vmap.cols.iter().enumerate() {
        c2[col] = p.objective[j] * sign;
    }

    match tab.run(&c2, ncols) {
        RunOutcome::IterationCap => Ok(LpSolution {
            status: LpStatus::DidNotConverge,
            x: None,
            value: None,
            iterations: tab.iterations,
            ray: None,
        }),
        RunOutcome::Unbounded { entering } => {
            let mut dy = vec![0.0; ncols];
            dy[entering] = 1.0;
            for (i, &bi) in tab.basis.iter().enumerate() {
                dy[bi] = -tab.rows[i][entering];
            }
            let ray = vmap.direction_to_original(&dy);
            Ok(LpSolution {
                status: LpStatus::Unbounded,
                x: None,
                value: None,
                iterations: tab.iterations,
                ray: Some(ray),
            })
        }
        RunOutcome::Optimal => {
            let mut y = vec![0.0; ncols];
            for (i, &bi) in tab.basis.iter().enumerate() {
                y[bi] = tab.rhs[i];
            }
            let x = vmap.to_original(&y);
            let value = p.objective.dot(&x);
            Ok(LpSolution {
                status: LpStatus::Optimal,
                x: Some(x),
                value: Some(value),
                iterations: tab.iterations,
                ray: None,
            })
        }
    }
}

/// Caps for the active-set enumeration QP.
pub const QP_MAX_DIM: usize = 8;
pub const QP_MAX_ROWS: usize = 32;

/// Euclidean projection onto `{w : a w <= b}` by active-set subset
/// enumeration with an equality-constrained least-squares solve per
/// subset. Exact at desk scale; subsets are visited by size then
/// lexicographically, and the first KKT-consistent point is the unique
/// minimizer.
pub fn project_qp_hpoly(a: &Matrix, b: &Vector, x: &Vector) -> Result<Vector> {
    let (m, n) = (a.nrows(), a.ncols());
    if n > QP_MAX_DIM || m > QP_MAX_ROWS {
        return Err(Error::UnsupportedScale(format!(
            "projection QP supports n <= {QP_MAX_DIM}, m <= {QP_MAX_ROWS}; got n = {n}, m = {m}"
        )));
    }
    if x.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: x.len() });
    }
    let scale = 1.0 + x.norm();
    let feasible = |w: &Vector| (a * w - b).iter().all(|&r| r <= FEAS_TOL * scale);
    if feasible(x) {
        return Ok(x.clone());
    }
    for k in 1..=n.min(m) {
        for subset in (0..m).combinations(k) {
            let a_s = Matrix::from_fn(k, n, |r, c| a[(subset[r], c)]);
            let b_s = DVector::from_fn(k, |r, _| b[subset[r]]);
            let gram = &a_s * a_s.transpose();
            let rhs = &a_s * x - &b_s;
            let lu = gram.clone().full_piv_lu();
            let Some(lambda) = lu.solve(&rhs) else { continue };
            if (&gram * &lambda - &rhs).norm() > 1e-8 * scale {
                continue;
            }
            if lambda.iter().any(|&l| l < -1e-9 * scale) {
                continue;
            }
            let w = x - a_s.transpose() * &lambda;
            if feasible(&w) {
                return Ok(w);
            }
        }
    }
    Err(Error::Numerical("active-set enumeration found no KKT point".into()))
}

/// Euclidean projection onto `co(vertices) + cone(rays)` by support-set
/// enumeration. For each candidate support the equality-constrained
/// least-squares system in combination coefficients is solved and the
/// KKT conditions (coefficient nonnegativity plus dual slacks on the
/// excluded generators) are verified.
pub fn project_qp_vpoly(vertices: &[Vector], rays: &[Vector], x: &Vector) -> Result<Vector> {
    let n = x.len();
    let (nv, nr) = (vertices.len(), rays.len());
    if n > QP_MAX_DIM || nv + nr > QP_MAX_ROWS {
        return Err(Error::UnsupportedScale(format!(
            "projection QP supports n <= {QP_MAX_DIM} and <= {QP_MAX_ROWS} generators; \
             got n = {n}, generators = {}",
            nv + nr
        )));
    }
    let scale = 1.0
        + x.norm()
        + vertices.iter().chain(rays.iter()).map(|v| v.norm()).fold(0.0, f64::max);
    let max_vs = nv.min(n + 1);
    let max_rs = nr.min(n);

    let mut best: Option<(f64, Vector)> = None;
    for kv in 1..=max_vs {
        for sv in (0..nv).combinations(kv) {
            for kr in 0..=max_rs {
                for sr in (0..nr).combinations(kr) {
                    if let Some(w) = try_support(vertices, rays, x, &sv, &sr, scale) {
                        let d = (x - &w).norm_squared();
                        if best.as_ref().is_none_or(|(bd, _)| d < *bd - 1e-12) {
                            best = Some((d, w));
                        }
                    }
                }
            }
        }
        // The minimizer's support has at most n+1 generators; once a KKT
        // point is found it is the global optimum.
        if best.is_some() {
            break;
        }
    }
    best.map(|(_, w)| w)
        .ok_or_else(|| Error::Numerical("support enumeration found no KKT point".into()))
}

fn try_support(
    vertices: &[Vector],
    rays: &[Vector],
    x: &Vector,
    sv: &[usize],
    sr: &[usize],
    scale: f64,
) -> Option<Vector> {
    let n = x.len();
    let kv = sv.len();
    let k = kv + sr.len();
    let gen_at = |i: usize| -> &Vector {
        if i < kv {
            &vertices[sv[i]]
        } else {
            &rays[sr[i - kv]]
        }
    };
    // KKT system: [G, -e; e^T, 0] [c; kappa] = [W^T x; 1]
    // where e marks vertex columns.
    let mut sys = DMatrix::zeros(k + 1, k + 1);
    let mut rhs = DVector::zeros(k + 1);
    for i in 0..k {
        for j in 0..k {
            sys[(i, j)] = gen_at(i).dot(gen_at(j));
        }
        if i < kv {
            sys[(i, k)] = -1.0;
            sys[(k, i)] = 1.0;
        }
        rhs[i] = gen_at(i).dot(x);
    }
    rhs[k] = 1.0;
    let lu = sys.clone().full_piv_lu();
    let sol = lu.solve(&rhs)?;
    if (&sys * &sol - &rhs).norm() > 1e-8 * scale {
        return None;
    }
    let kappa = sol[k];
    if sol.iter().take(k).any(|&c| c < -1e-9 * scale) {
        return None;
    }
    let mut w = DVector::zeros(n);
    for i in 0..k {
        w += gen_at(i) * sol[i];
    }
    let g = &w - x;
    // Dual slacks of excluded generators.
    for (j, v) in vertices.iter().enumerate() {
        if !sv.contains(&j) && v.dot(&g) - kappa < -FEAS_TOL * scale {
            return None;
        }
    }
    for (j, r) in rays.iter().enumerate() {
        if !sr.contains(&j) && r.dot(&g) < -FEAS_TOL * scale {
            return None;
        }
    }
    Some(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use nalgebra::{dmatrix, dvector};

    fn box2() -> (Matrix, Vector) {
        (
            dmatrix![1.0, 0.0; -1.0, 0.0; 0.0, 1.0; 0.0, -1.0],
            dvector![1.0, 1.0, 1.0, 1.0],
        )
    }

    #[test]
    fn box_corner_optimum() {
        let (a, b) = box2();
        let p = LinearProgram::minimize(dvector![-1.0, -1.0]).with_ub(a, b);
        let sol = solve_lp(&p).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert_abs_diff_eq!(sol.value.unwrap(), -2.0, epsilon = 1e-9);
        let x = sol.x.unwrap();
        assert_abs_diff_eq!(x[0], 1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(x[1], 1.0, epsilon = 1e-9);
    }

    #[test]
    fn contradictory_bounds_infeasible() {
        // x1 <= -1 and x1 >= 1.
        let a = dmatrix![1.0; -1.0];
        let b = dvector![-1.0, -1.0];
        let p = LinearProgram::minimize(dvector![0.0]).with_ub(a, b);
        assert_eq!(solve_lp(&p).unwrap().status, LpStatus::Infeasible);
    }

    #[test]
    fn free_descent_unbounded() {
        // min -x1 with only x1 >= 0.
        let p = LinearProgram::minimize(dvector![-1.0]).with_lower(0, 0.0);
        let sol = solve_lp(&p).unwrap();
        assert_eq!(sol.status, LpStatus::Unbounded);
        let ray = sol.ray.unwrap();
        assert!(ray[0] > 0.5, "certificate ray must increase x1: {ray}");
    }

    #[test]
    fn equality_block_and_shifted_bounds() {
        // min x1 + x2 s.t. x1 + x2 = 3, x1 >= 1, x2 >= -1.
        let p = LinearProgram::minimize(dvector![1.0, 1.0])
            .with_eq(dmatrix![1.0, 1.0], dvector![3.0])
            .with_lower(0, 1.0)
            .with_lower(1, -1.0);
        let sol = solve_lp(&p).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert_abs_diff_eq!(sol.value.unwrap(), 3.0, epsilon = 1e-9);
    }

    #[test]
    fn optimal_point_is_feasible_and_consistent() {
        let (a, b) = box2();
        let p = LinearProgram::minimize(dvector![2.0, -3.0]).with_ub(a.clone(), b.clone());
        let sol = solve_lp(&p).unwrap();
        let x = sol.x.unwrap();
        for i in 0..a.nrows() {
            assert!(a.row(i).transpose().dot(&x) <= b[i] + FEAS_TOL);
        }
        assert_abs_diff_eq!(sol.value.unwrap(), p.objective.dot(&x), epsilon = 1e-9);
    }

    #[test]
    fn qp_clamps_to_box() {
        let (a, b) = box2();
        let w = project_qp_hpoly(&a, &b, &dvector![3.0, 1.0]).unwrap();
        assert_abs_diff_eq!(w[0], 1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(w[1], 1.0, epsilon = 1e-9);
    }

    #[test]
    fn qp_identity_inside() {
        let (a, b) = box2();
        let x = dvector![0.25, -0.5];
        let w = project_qp_hpoly(&a, &b, &x).unwrap();
        assert_abs_diff_eq!((w - x).norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn qp_halfplane_orthogonal_projection() {
        let a = dmatrix![1.0, 0.0];
        let b = dvector![0.0];
        let w = project_qp_hpoly(&a, &b, &dvector![2.0, 5.0]).unwrap();
        assert_abs_diff_eq!(w[0], 0.0, epsilon = 1e-9);
        assert_abs_diff_eq!(w[1], 5.0, epsilon = 1e-9);
    }

    #[test]
    fn qp_vpoly_segment() {
        let verts = vec![dvector![0.0, 0.0], dvector![1.0, 0.0]];
        let w = project_qp_vpoly(&verts, &[], &dvector![3.0, 2.0]).unwrap();
        assert_abs_diff_eq!(w[0], 1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(w[1], 0.0, epsilon = 1e-9);
    }

    #[test]
    fn qp_vpoly_with_ray() {
        // {(0,0)} + cone{(-1,0)}: the nonpositive x-axis.
        let verts = vec![dvector![0.0, 0.0]];
        let rays = vec![dvector![-1.0, 0.0]];
        let w = project_qp_vpoly(&verts, &rays, &dvector![-5.0, 1.0]).unwrap();
        assert_abs_diff_eq!(w[0], -5.0, epsilon = 1e-9);
        assert_abs_diff_eq!(w[1], 0.0, epsilon = 1e-9);
        let w2 = project_qp_vpoly(&verts, &rays, &dvector![5.0, 1.0]).unwrap();
        assert_abs_diff_eq!(w2[0], 0.0, epsilon = 1e-9);
        assert_abs_diff_eq!(w2[1], 0.0, epsilon = 1e-9);
    }

    #[test]
    fn qp_variational_inequality_on_vertices() {
        let verts = vec![
            dvector![2.0, 0.0],
            dvector![0.0, 2.0],
            dvector![-1.0, -1.0],
        ];
        let x = dvector![4.0, 4.0];
        let p = project_qp_vpoly(&verts, &[], &x).unwrap();
        for v in &verts {
            assert!((&x - &p).dot(&(v - &p)) <= 1e-7);
        }
    }
}
