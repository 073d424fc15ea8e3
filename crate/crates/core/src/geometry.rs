//! Convex set representations in R^n and the basic calculus on them:
//! membership, support functions, normal cones, polars, horizon cones,
//! Euclidean projection, and desk-scale H/V conversions.

use itertools::Itertools;
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lp::{self, LinearProgram, LpStatus};
use crate::{Matrix, Vector, DEFAULT_TOL};

/// Dimension cap for H/V conversions (they enumerate constraint subsets).
pub const CONVERT_MAX_DIM: usize = 4;

const DEDUP_TOL: f64 = 1e-9;

/// `{x : A x <= b}` with nonzero rows and verified nonemptiness.
#[derive(Debug, Clone, PartialEq)]
pub struct HPolyhedron {
    a: Matrix,
    b: Vector,
}

impl HPolyhedron {
    pub fn new(a: Matrix, b: Vector) -> Result<Self> {
        if a.nrows() == 0 {
            return Err(Error::InvalidInput("H-polyhedron needs at least one row".into()));
        }
        if a.nrows() != b.len() {
            return Err(Error::DimensionMismatch { expected: a.nrows(), got: b.len() });
        }
        for i in 0..a.nrows() {
            if a.row(i).norm() < 1e-12 {
                return Err(Error::DegenerateRow { row: i });
            }
        }
        let poly = HPolyhedron { a, b };
        let feas = LinearProgram::minimize(DVector::zeros(poly.dim()))
            .with_ub(poly.a.clone(), poly.b.clone());
        match lp::solve_lp(&feas)?.status {
            LpStatus::Optimal => Ok(poly),
            LpStatus::Infeasible => Err(Error::EmptySet),
            _ => Err(Error::Numerical("feasibility probe failed".into())),
        }
    }

    pub fn dim(&self) -> usize {
        self.a.ncols()
    }

    pub fn num_rows(&self) -> usize {
        self.a.nrows()
    }

    pub fn a(&self) -> &Matrix {
        &self.a
    }

    pub fn b(&self) -> &Vector {
        &self.b
    }

    pub fn row(&self, i: usize) -> (Vector, f64) {
        (self.a.row(i).transpose(), self.b[i])
    }

    pub fn contains(&self, x: &Vector, tol: f64) -> bool {
        (0..self.num_rows()).all(|i| self.a.row(i).transpose().dot(x) <= self.b[i] + tol)
    }

    /// Indices of rows active at `x` within `tol`.
    pub fn active_rows(&self, x: &Vector, tol: f64) -> Vec<usize> {
        (0..self.num_rows())
            .filter(|&i| (self.a.row(i).transpose().dot(x) - self.b[i]).abs() <= tol)
            .collect()
    }

    /// Vertices by basis enumeration; requires `dim <= CONVERT_MAX_DIM`.
    pub fn vertices(&self) -> Result<Vec<Vector>> {
        let n = self.dim();
        if n > CONVERT_MAX_DIM {
            return Err(Error::UnsupportedDimension { dim: n, max: CONVERT_MAX_DIM });
        }
        let m = self.num_rows();
        let mut verts: Vec<Vector> = Vec::new();
        if m < n {
            return Ok(verts);
        }
        for subset in (0..m).combinations(n) {
            let a_s = Matrix::from_fn(n, n, |r, c| self.a[(subset[r], c)]);
            let b_s = DVector::from_fn(n, |r, _| self.b[subset[r]]);
            let lu = a_s.clone().full_piv_lu();
            let Some(x) = lu.solve(&b_s) else { continue };
            if (&a_s * &x - &b_s).norm() > 1e-8 * (1.0 + b_s.norm()) {
                continue;
            }
            if self.contains(&x, DEFAULT_TOL) && !verts.iter().any(|v| (v - &x).norm() < 1e-7) {
                verts.push(x);
            }
        }
        sort_points(&mut verts);
        Ok(verts)
    }

    /// Convert to a V-polytope; fails for non-pointed polyhedra.
    pub fn to_vpolytope(&self) -> Result<VPolytope> {
        let verts = self.vertices()?;
        if verts.is_empty() {
            return Err(Error::NotPointed);
        }
        let cone = cone_extreme_rays(&self.a)?;
        if !cone.lines.is_empty() {
            return Err(Error::NotPointed);
        }
        VPolytope::new(verts, cone.rays)
    }
}

/// `co(vertices) + cone(rays)`.
#[derive(Debug, Clone, PartialEq)]
pub struct VPolytope {
    vertices: Vec<Vector>,
    rays: Vec<Vector>,
}

impl VPolytope {
    pub fn new(vertices: Vec<Vector>, rays: Vec<Vector>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::NoVertices);
        }
        let n = vertices[0].len();
        for v in vertices.iter().chain(rays.iter()) {
            if v.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: v.len() });
            }
        }
        for (i, r) in rays.iter().enumerate() {
            if r.norm() < 1e-12 {
                return Err(Error::DegenerateRow { row: i });
            }
        }
        let mut deduped: Vec<Vector> = Vec::with_capacity(vertices.len());
        for v in vertices {
            if !deduped.iter().any(|u| (u - &v).norm() < DEDUP_TOL) {
                deduped.push(v);
            }
        }
        Ok(VPolytope { vertices: deduped, rays })
    }

    pub fn dim(&self) -> usize {
        self.vertices[0].len()
    }

    pub fn vertices(&self) -> &[Vector] {
        &self.vertices
    }

    pub fn rays(&self) -> &[Vector] {
        &self.rays
    }

    /// Membership as LP feasibility of a convex-plus-conic combination:
    /// the minimal l1 residual of `V lam + R mu = x, sum lam = 1` must not
    /// exceed `tol`.
    pub fn contains(&self, x: &Vector, tol: f64) -> Result<bool> {
        Ok(self.combination_residual(x)? <= tol)
    }

    fn combination_residual(&self, x: &Vector) -> Result<f64> {
        let n = self.dim();
        let (nv, nr) = (self.vertices.len(), self.rays.len());
        // Variables: lam (nv), mu (nr), s+ (n), s- (n).
        let nvar = nv + nr + 2 * n;
        let mut c = DVector::zeros(nvar);
        for j in 0..2 * n {
            c[nv + nr + j] = 1.0;
        }
        let mut a_eq = DMatrix::zeros(n + 1, nvar);
        let mut b_eq = DVector::zeros(n + 1);
        for (j, v) in self.vertices.iter().enumerate() {
            for i in 0..n {
                a_eq[(i, j)] = v[i];
            }
            a_eq[(n, j)] = 1.0;
        }
        for (j, r) in self.rays.iter().enumerate() {
            for i in 0..n {
                a_eq[(i, nv + j)] = r[i];
            }
        }
        for i in 0..n {
            a_eq[(i, nv + nr + i)] = 1.0;
            a_eq[(i, nv + nr + n + i)] = -1.0;
            b_eq[i] = x[i];
        }
        b_eq[n] = 1.0;
        let mut p = LinearProgram::minimize(c).with_eq(a_eq, b_eq);
        for j in 0..nvar {
            p = p.with_lower(j, 0.0);
        }
        let sol = lp::solve_lp(&p)?;
        match sol.status {
            LpStatus::Optimal => Ok(sol.value.unwrap()),
            _ => Err(Error::Numerical("membership LP must be solvable".into())),
        }
    }

    /// Facet representation via the polar cone of the homogenization;
    /// requires `dim <= CONVERT_MAX_DIM`.
    pub fn to_hpolyhedron(&self) -> Result<HPolyhedron> {
        let n = self.dim();
        if n > CONVERT_MAX_DIM {
            return Err(Error::UnsupportedDimension { dim: n, max: CONVERT_MAX_DIM });
        }
        // Rows of the homogenization cone polar: (v_j, 1) and (r_k, 0).
        let m = self.vertices.len() + self.rays.len();
        let mut g = DMatrix::zeros(m, n + 1);
        for (i, v) in self.vertices.iter().enumerate() {
            for c in 0..n {
                g[(i, c)] = v[c];
            }
            g[(i, n)] = 1.0;
        }
        for (k, r) in self.rays.iter().enumerate() {
            for c in 0..n {
                g[(self.vertices.len() + k, c)] = r[c];
            }
        }
        let cone = cone_extreme_rays(&g)?;
        let mut rows: Vec<(Vector, f64)> = Vec::new();
        let mut push = |gen: &Vector| {
            let a = gen.rows(0, n).into_owned();
            let beta = gen[n];
            if a.norm() > 1e-9 {
                rows.push((a, -beta));
            }
        };
        for r in &cone.rays {
            push(r);
        }
        for l in &cone.lines {
            push(l);
            push(&(-l));
        }
        if rows.is_empty() {
            return Err(Error::Numerical("facet enumeration produced no rows".into()));
        }
        let a = Matrix::from_fn(rows.len(), n, |r, c| rows[r].0[c]);
        let b = DVector::from_fn(rows.len(), |r, _| rows[r].1);
        HPolyhedron::new(a, b)
    }
}

/// Closed Euclidean ball.
#[derive(Debug, Clone, PartialEq)]
pub struct Ball {
    center: Vector,
    radius: f64,
}

impl Ball {
    pub fn new(center: Vector, radius: f64) -> Result<Self> {
        if radius <= 0.0 {
            return Err(Error::NonPositiveRadius(radius));
        }
        Ok(Ball { center, radius })
    }

    pub fn unit(n: usize) -> Self {
        Ball { center: DVector::zeros(n), radius: 1.0 }
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn center(&self) -> &Vector {
        &self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn contains(&self, x: &Vector, tol: f64) -> bool {
        (x - &self.center).norm() <= self.radius + tol
    }
}

/// Tagged union of the three supported representations.
#[derive(Debug, Clone, PartialEq)]
pub enum ConvexSet {
    HPoly(HPolyhedron),
    VPoly(VPolytope),
    Ball(Ball),
}

/// Value of a support function together with a certificate: a maximizer
/// when finite, an unbounded feasible direction otherwise.
#[derive(Debug, Clone)]
pub enum Support {
    Finite { value: f64, argmax: Vector },
    Infinite { ray: Vector },
}

impl Support {
    /// Extended-real value; `f64::INFINITY` in the unbounded case.
    pub fn value(&self) -> f64 {
        match self {
            Support::Finite { value, .. } => *value,
            Support::Infinite { .. } => f64::INFINITY,
        }
    }

    pub fn argmax(&self) -> Option<&Vector> {
        match self {
            Support::Finite { argmax, .. } => Some(argmax),
            Support::Infinite { .. } => None,
        }
    }
}

impl ConvexSet {
    pub fn dim(&self) -> usize {
        match self {
            ConvexSet::HPoly(h) => h.dim(),
            ConvexSet::VPoly(v) => v.dim(),
            ConvexSet::Ball(b) => b.dim(),
        }
    }

    fn check_dim(&self, x: &Vector) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: x.len() });
        }
        Ok(())
    }

    /// Membership within `tol` on constraint residuals.
    pub fn contains(&self, x: &Vector, tol: f64) -> Result<bool> {
        self.check_dim(x)?;
        match self {
            ConvexSet::HPoly(h) => Ok(h.contains(x, tol)),
            ConvexSet::VPoly(v) => v.contains(x, tol),
            ConvexSet::Ball(b) => Ok(b.contains(x, tol)),
        }
    }

    /// Support function `sigma_S(d) = sup {<d, x> : x in S}`.
    pub fn support(&self, d: &Vector) -> Result<Support> {
        self.check_dim(d)?;
        match self {
            ConvexSet::HPoly(h) => {
                let p = LinearProgram::minimize(-d.clone()).with_ub(h.a.clone(), h.b.clone());
                let sol = lp::solve_lp(&p)?;
                match sol.status {
                    LpStatus::Optimal => {
                        let x = sol.x.unwrap();
                        Ok(Support::Finite { value: d.dot(&x), argmax: x })
                    }
                    LpStatus::Unbounded => Ok(Support::Infinite { ray: sol.ray.unwrap() }),
                    _ => Err(Error::Numerical("support LP failed".into())),
                }
            }
            ConvexSet::VPoly(v) => {
                let dn = d.norm();
                for r in v.rays() {
                    if d.dot(r) > 1e-9 * dn.max(1.0) * r.norm() {
                        return Ok(Support::Infinite { ray: r.clone() });
                    }
                }
                let (mut best, mut arg) = (f64::NEG_INFINITY, 0usize);
                for (j, vert) in v.vertices().iter().enumerate() {
                    let val = d.dot(vert);
                    if val > best {
                        best = val;
                        arg = j;
                    }
                }
                Ok(Support::Finite { value: best, argmax: v.vertices()[arg].clone() })
            }
            ConvexSet::Ball(b) => {
                let dn = d.norm();
                if dn < 1e-15 {
                    return Ok(Support::Finite { value: 0.0, argmax: b.center.clone() });
                }
                let argmax = &b.center + d * (b.radius / dn);
                Ok(Support::Finite { value: d.dot(&b.center) + b.radius * dn, argmax })
            }
        }
    }

    /// Membership of `v` in the normal cone `N(xbar; S)`, tested as
    /// `sigma_S(v) <= <v, xbar> + tol`. Returns `false` when `xbar` is
    /// not in `S` (the normal cone is empty by convention).
    pub fn normal_cone_contains(&self, xbar: &Vector, v: &Vector, tol: f64) -> Result<bool> {
        self.check_dim(xbar)?;
        self.check_dim(v)?;
        if !self.contains(xbar, tol)? {
            return Ok(false);
        }
        if v.norm() < 1e-15 {
            return Ok(true);
        }
        Ok(self.support(v)?.value() <= v.dot(xbar) + tol)
    }

    /// Horizon (recession) cone.
    pub fn horizon_cone(&self) -> PolyhedralCone {
        match self {
            ConvexSet::HPoly(h) => PolyhedralCone::HForm(h.a.clone()),
            ConvexSet::VPoly(v) => PolyhedralCone::Rays(v.rays().to_vec()),
            ConvexSet::Ball(b) => PolyhedralCone::Rays(Vec::new()).with_dim(b.dim()),
        }
    }

    /// Polar set `{v : <v, x> <= 1 for all x in S}`; requires the origin
    /// in the interior of `S`.
    pub fn polar(&self) -> Result<ConvexSet> {
        self.require_origin_interior()?;
        match self {
            ConvexSet::HPoly(h) => {
                let mut verts = vec![DVector::zeros(h.dim())];
                for i in 0..h.num_rows() {
                    let (a, b) = h.row(i);
                    verts.push(a / b);
                }
                Ok(ConvexSet::VPoly(VPolytope::new(verts, Vec::new())?))
            }
            ConvexSet::VPoly(v) => {
                let n = v.dim();
                let mut rows: Vec<(Vector, f64)> = Vec::new();
                for vert in v.vertices() {
                    if vert.norm() > 1e-9 {
                        rows.push((vert.clone(), 1.0));
                    }
                }
                for r in v.rays() {
                    rows.push((r.clone(), 0.0));
                }
                if rows.is_empty() {
                    return Err(Error::OriginNotInterior("set is a single point".into()));
                }
                let a = Matrix::from_fn(rows.len(), n, |r, c| rows[r].0[c]);
                let b = DVector::from_fn(rows.len(), |r, _| rows[r].1);
                Ok(ConvexSet::HPoly(HPolyhedron::new(a, b)?))
            }
            ConvexSet::Ball(b) => {
                if b.center.norm() > 1e-9 {
                    return Err(Error::UnsupportedCombination(
                        "polar of an off-center ball is not representable here".into(),
                    ));
                }
                Ok(ConvexSet::Ball(Ball::new(DVector::zeros(b.dim()), 1.0 / b.radius)?))
            }
        }
    }

    /// `||S_polar|| = sup {||v|| : v in polar(S)}`; the Lipschitz modulus
    /// of the gauge and the minimal time function.
    pub fn polar_norm(&self) -> Result<f64> {
        self.require_origin_interior()?;
        match self {
            ConvexSet::HPoly(h) => {
                let mut best: f64 = 0.0;
                for i in 0..h.num_rows() {
                    let (a, b) = h.row(i);
                    best = best.max(a.norm() / b);
                }
                Ok(best)
            }
            ConvexSet::Ball(b) => Ok(1.0 / (b.radius - b.center.norm())),
            ConvexSet::VPoly(_) => {
                let polar = self.polar()?;
                let ConvexSet::HPoly(h) = &polar else { unreachable!() };
                let verts = h.vertices()?;
                Ok(verts.iter().map(|v| v.norm()).fold(0.0, f64::max))
            }
        }
    }

    /// The unique nearest point of `S` to `x` in the Euclidean norm.
    pub fn euclidean_project(&self, x: &Vector) -> Result<Vector> {
        self.check_dim(x)?;
        match self {
            ConvexSet::HPoly(h) => lp::project_qp_hpoly(&h.a, &h.b, x),
            ConvexSet::VPoly(v) => lp::project_qp_vpoly(v.vertices(), v.rays(), x),
            ConvexSet::Ball(b) => {
                let d = x - &b.center;
                let dn = d.norm();
                if dn <= b.radius {
                    Ok(x.clone())
                } else {
                    Ok(&b.center + d * (b.radius / dn))
                }
            }
        }
    }

    /// Checks that a ball of a small radius around the origin fits in the
    /// set: `min_i b_i >= 1e-9` for the H-form, membership probes of
    /// `+/- 1e-6 e_i` for the V-form, `||c|| < r` for balls.
    pub fn require_origin_interior(&self) -> Result<()> {
        match self {
            ConvexSet::HPoly(h) => {
                if h.b.iter().any(|&bi| bi < 1e-9) {
                    return Err(Error::OriginNotInterior(
                        "H-form needs b_i >= 1e-9 for every row".into(),
                    ));
                }
                Ok(())
            }
            ConvexSet::VPoly(v) => {
                let n = v.dim();
                for i in 0..n {
                    for sign in [1.0, -1.0] {
                        let mut probe = DVector::zeros(n);
                        probe[i] = sign * 1e-6;
                        if !v.contains(&probe, 1e-9)? {
                            return Err(Error::OriginNotInterior(format!(
                                "probe {probe:?} lies outside the V-polytope"
                            )));
                        }
                    }
                }
                Ok(())
            }
            ConvexSet::Ball(b) => {
                if b.center.norm() >= b.radius - 1e-9 {
                    return Err(Error::OriginNotInterior("||center|| >= radius".into()));
                }
                Ok(())
            }
        }
    }

    /// True when the recession cone is trivial.
    pub fn is_bounded(&self) -> Result<bool> {
        match self {
            ConvexSet::VPoly(v) => Ok(v.rays().is_empty()),
            ConvexSet::Ball(_) => Ok(true),
            ConvexSet::HPoly(h) => {
                let n = h.dim();
                let cube_a = {
                    let mut rows = Vec::new();
                    for i in 0..n {
                        let mut up = vec![0.0; n];
                        up[i] = 1.0;
                        rows.push(up.clone());
                        let mut dn = vec![0.0; n];
                        dn[i] = -1.0;
                        rows.push(dn);
                    }
                    Matrix::from_fn(2 * n, n, |r, c| rows[r][c])
                };
                let cube_b = DVector::from_element(2 * n, 1.0);
                let mut stacked = DMatrix::zeros(h.num_rows() + 2 * n, n);
                stacked.view_mut((0, 0), (h.num_rows(), n)).copy_from(&h.a);
                stacked.view_mut((h.num_rows(), 0), (2 * n, n)).copy_from(&cube_a);
                let mut rhs = DVector::zeros(h.num_rows() + 2 * n);
                rhs.rows_mut(h.num_rows(), 2 * n).copy_from(&cube_b);
                for i in 0..n {
                    for sign in [1.0, -1.0] {
                        let mut c = DVector::zeros(n);
                        c[i] = -sign;
                        let p = LinearProgram::minimize(c).with_ub(stacked.clone(), rhs.clone());
                        let sol = lp::solve_lp(&p)?;
                        if sol.status != LpStatus::Optimal || -sol.value.unwrap() > 1e-7 {
                            return Ok(false);
                        }
                    }
                }
                Ok(true)
            }
        }
    }

    /// True when `S = -S` within `tol`.
    pub fn is_symmetric(&self, tol: f64) -> Result<bool> {
        match self {
            ConvexSet::Ball(b) => Ok(b.center.norm() <= tol),
            ConvexSet::VPoly(v) => {
                for vert in v.vertices() {
                    if !v.contains(&(-vert), tol)? {
                        return Ok(false);
                    }
                }
                let cone = PolyhedralCone::Rays(v.rays().to_vec());
                for r in v.rays() {
                    if !cone.contains(&(-r), tol)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            ConvexSet::HPoly(h) => {
                for i in 0..h.num_rows() {
                    let (a, b) = h.row(i);
                    if self.support(&(-a))?.value() > b + tol {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
        }
    }

    /// Axis-aligned bounding box; fails for unbounded sets.
    pub fn bounding_box(&self) -> Result<(Vector, Vector)> {
        match self {
            ConvexSet::Ball(b) => {
                Ok((&b.center - DVector::from_element(b.dim(), b.radius),
                    &b.center + DVector::from_element(b.dim(), b.radius)))
            }
            ConvexSet::VPoly(v) => {
                if !v.rays().is_empty() {
                    return Err(Error::UnboundedTarget);
                }
                let n = v.dim();
                let mut lo = v.vertices()[0].clone();
                let mut hi = lo.clone();
                for vert in v.vertices() {
                    for i in 0..n {
                        lo[i] = lo[i].min(vert[i]);
                        hi[i] = hi[i].max(vert[i]);
                    }
                }
                Ok((lo, hi))
            }
            ConvexSet::HPoly(_) => {
                let n = self.dim();
                let mut lo = DVector::zeros(n);
                let mut hi = DVector::zeros(n);
                for i in 0..n {
                    let mut d = DVector::zeros(n);
                    d[i] = 1.0;
                    match self.support(&d)? {
                        Support::Finite { value, .. } => hi[i] = value,
                        Support::Infinite { .. } => return Err(Error::UnboundedTarget),
                    }
                    match self.support(&(-d.clone()))? {
                        Support::Finite { value, .. } => lo[i] = -value,
                        Support::Infinite { .. } => return Err(Error::UnboundedTarget),
                    }
                }
                Ok((lo, hi))
            }
        }
    }

    /// A vertex-style sample of the set: vertices for polytopes (H-form
    /// converted at desk scale), center and axis extremes for balls.
    pub fn corner_points(&self) -> Result<Vec<Vector>> {
        match self {
            ConvexSet::VPoly(v) => Ok(v.vertices().to_vec()),
            ConvexSet::HPoly(h) => h.vertices(),
            ConvexSet::Ball(b) => {
                let mut pts = vec![b.center.clone()];
                for i in 0..b.dim() {
                    for sign in [1.0, -1.0] {
                        let mut p = b.center.clone();
                        p[i] += sign * b.radius;
                        pts.push(p);
                    }
                }
                Ok(pts)
            }
        }
    }
}

/// Polyhedral cone, either `{x : A x <= 0}` or `cone(rays)`.
#[derive(Debug, Clone)]
pub enum PolyhedralCone {
    HForm(Matrix),
    Rays(Vec<Vector>),
}

impl PolyhedralCone {
    /// Dimension; the empty generator list carries none, so `with_dim`
    /// pins it after construction.
    fn with_dim(self, n: usize) -> PolyhedralCone {
        match self {
            PolyhedralCone::Rays(r) if r.is_empty() => {
                PolyhedralCone::Rays(vec![DVector::zeros(n)])
            }
            other => other,
        }
    }

    pub fn contains(&self, d: &Vector, tol: f64) -> Result<bool> {
        match self {
            PolyhedralCone::HForm(a) => {
                Ok((0..a.nrows()).all(|i| a.row(i).transpose().dot(d) <= tol))
            }
            PolyhedralCone::Rays(rays) => {
                let rays: Vec<&Vector> = rays.iter().filter(|r| r.norm() > 1e-12).collect();
                if rays.is_empty() {
                    return Ok(d.norm() <= tol);
                }
                if d.norm() <= tol {
                    return Ok(true);
                }
                let n = d.len();
                let k = rays.len();
                // min l1 residual of  G mu = d, mu >= 0.
                let nvar = k + 2 * n;
                let mut c = DVector::zeros(nvar);
                for j in 0..2 * n {
                    c[k + j] = 1.0;
                }
                let mut a_eq = DMatrix::zeros(n, nvar);
                for (j, r) in rays.iter().enumerate() {
                    for i in 0..n {
                        a_eq[(i, j)] = r[i];
                    }
                }
                for i in 0..n {
                    a_eq[(i, k + i)] = 1.0;
                    a_eq[(i, k + n + i)] = -1.0;
                }
                let mut p = LinearProgram::minimize(c).with_eq(a_eq, d.clone());
                for j in 0..nvar {
                    p = p.with_lower(j, 0.0);
                }
                let sol = lp::solve_lp(&p)?;
                match sol.status {
                    LpStatus::Optimal => Ok(sol.value.unwrap() <= tol),
                    _ => Err(Error::Numerical("cone membership LP failed".into())),
                }
            }
        }
    }

    /// Generator representation. Lines (from a nontrivial lineality
    /// space) are emitted as opposite ray pairs. H-form conversion is
    /// capped at `CONVERT_MAX_DIM`.
    pub fn generators(&self) -> Result<Vec<Vector>> {
        match self {
            PolyhedralCone::Rays(rays) => {
                Ok(rays.iter().filter(|r| r.norm() > 1e-12).cloned().collect())
            }
            PolyhedralCone::HForm(a) => {
                if a.ncols() > CONVERT_MAX_DIM {
                    return Err(Error::UnsupportedDimension {
                        dim: a.ncols(),
                        max: CONVERT_MAX_DIM,
                    });
                }
                let cone = cone_extreme_rays(a)?;
                let mut gens = cone.rays;
                for l in cone.lines {
                    gens.push(l.clone());
                    gens.push(-l);
                }
                Ok(gens)
            }
        }
    }

    pub fn is_trivial(&self) -> Result<bool> {
        match self {
            PolyhedralCone::Rays(rays) => Ok(rays.iter().all(|r| r.norm() <= 1e-12)),
            PolyhedralCone::HForm(_) => Ok(self.generators()?.is_empty()),
        }
    }
}

pub(crate) struct ConeGenerators {
    pub rays: Vec<Vector>,
    pub lines: Vec<Vector>,
}

/// Extreme rays and lineality basis of `{y : G y <= 0}` by enumeration of
/// active-row subsets of rank d-1 (after projecting out the lineality
/// space). Intended for d <= 5.
pub(crate) fn cone_extreme_rays(g: &Matrix) -> Result<ConeGenerators> {
    let d = g.ncols();
    let m = g.nrows();
    // Lineality space: null(G).
    let svd = g.clone().svd(true, true);
    let v_t = svd.v_t.as_ref().ok_or_else(|| Error::Numerical("SVD failed".into()))?;
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let rank_tol = 1e-9 * smax.max(1.0);
    let mut lines: Vec<Vector> = Vec::new();
    for i in 0..d {
        let sv = if i < svd.singular_values.len() { svd.singular_values[i] } else { 0.0 };
        if sv <= rank_tol {
            lines.push(v_t.row(i).transpose());
        }
    }
    let ell = lines.len();
    let dp = d - ell;
    if dp == 0 {
        return Ok(ConeGenerators { rays: Vec::new(), lines });
    }
    // Orthonormal basis of the complement from the same SVD.
    let mut q = DMatrix::zeros(d, dp);
    for i in 0..dp {
        q.set_column(i, &v_t.row(i).transpose());
    }
    let gp = g * &q;

    let mut rays: Vec<Vector> = Vec::new();
    let mut consider = |z: Vector| {
        let zn = z.norm();
        if zn < 1e-12 {
            return;
        }
        let z = z / zn;
        for sign in [1.0, -1.0] {
            let cand = &z * sign;
            let feasible = (0..m).all(|i| gp.row(i).transpose().dot(&cand) <= 1e-9);
            if feasible && !rays.iter().any(|r| (r - &cand).norm() < 1e-7) {
                rays.push(cand);
            }
        }
    };
    if dp == 1 {
        consider(DVector::from_element(1, 1.0));
    } else {
        for subset in (0..m).combinations(dp - 1) {
            let a_s = Matrix::from_fn(dp - 1, dp, |r, c| gp[(subset[r], c)]);
            let svd_s = a_s.svd(false, true);
            let vt_s = svd_s.v_t.as_ref().unwrap();
            let smax_s = svd_s.singular_values.iter().cloned().fold(0.0, f64::max);
            let tol_s = 1e-9 * smax_s.max(1.0);
            let rank = svd_s.singular_values.iter().filter(|&&s| s > tol_s).count();
            if rank != dp - 1 {
                continue;
            }
            consider(vt_s.row(dp - 1).transpose());
        }
    }
    let mut lifted: Vec<Vector> = rays.into_iter().map(|r| &q * r).collect();
    sort_points(&mut lifted);
    Ok(ConeGenerators { rays: lifted, lines })
}

/// Minkowski sum of two V-polytopes: pairwise vertex sums, union of rays.
pub fn minkowski_sum(a: &VPolytope, b: &VPolytope) -> Result<VPolytope> {
    let mut verts = Vec::with_capacity(a.vertices().len() * b.vertices().len());
    for va in a.vertices() {
        for vb in b.vertices() {
            verts.push(va + vb);
        }
    }
    let rays = a.rays().iter().chain(b.rays().iter()).cloned().collect();
    VPolytope::new(verts, rays)
}

/// Pointwise negation of a V-polytope.
pub fn negate_vpolytope(p: &VPolytope) -> Result<VPolytope> {
    VPolytope::new(
        p.vertices().iter().map(|v| -v).collect(),
        p.rays().iter().map(|r| -r).collect(),
    )
}

/// Deterministic lexicographic ordering for point lists.
pub fn sort_points(points: &mut [Vector]) {
    points.sort_by(|a, b| {
        for i in 0..a.len() {
            match a[i].partial_cmp(&b[i]) {
                Some(std::cmp::Ordering::Equal) | None => continue,
                Some(ord) => return ord,
            }
        }
        std::cmp::Ordering::Equal
    });
}

/// Dynamics set: a convex set with the origin validated to lie in its
/// interior. Boundedness and symmetry are computed once at construction
/// since the signed-function routines branch on them.
#[derive(Debug, Clone)]
pub struct Dynamics {
    set: ConvexSet,
    bounded: bool,
    symmetric: bool,
}

impl Dynamics {
    pub fn new(set: ConvexSet) -> Result<Self> {
        set.require_origin_interior()?;
        let bounded = set.is_bounded()?;
        let symmetric = set.is_symmetric(DEFAULT_TOL)?;
        Ok(Dynamics { set, bounded, symmetric })
    }

    pub fn set(&self) -> &ConvexSet {
        &self.set
    }

    pub fn is_bounded(&self) -> bool {
        self.bounded
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }
}

impl std::ops::Deref for Dynamics {
    type Target = ConvexSet;

    fn deref(&self) -> &ConvexSet {
        &self.set
    }
}

/// JSON schema for sets, as consumed by scene files and fixtures.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type")]
pub enum SetJson {
    #[serde(rename = "hpoly")]
    HPoly {
        #[serde(rename = "A")]
        a: Vec<Vec<f64>>,
        b: Vec<f64>,
    },
    #[serde(rename = "vpoly")]
    VPoly {
        vertices: Vec<Vec<f64>>,
        #[serde(default)]
        rays: Vec<Vec<f64>>,
    },
    #[serde(rename = "ball")]
    Ball { center: Vec<f64>, radius: f64 },
}

impl TryFrom<&SetJson> for ConvexSet {
    type Error = Error;

    fn try_from(json: &SetJson) -> Result<ConvexSet> {
        match json {
            SetJson::HPoly { a, b } => {
                let m = a.len();
                if m == 0 {
                    return Err(Error::InvalidInput("empty constraint matrix".into()));
                }
                let n = a[0].len();
                if a.iter().any(|row| row.len() != n) {
                    return Err(Error::InvalidInput("ragged constraint matrix".into()));
                }
                let mat = Matrix::from_fn(m, n, |r, c| a[r][c]);
                let rhs = DVector::from_column_slice(b);
                Ok(ConvexSet::HPoly(HPolyhedron::new(mat, rhs)?))
            }
            SetJson::VPoly { vertices, rays } => {
                let vs = vertices.iter().map(|v| DVector::from_column_slice(v)).collect();
                let rs = rays.iter().map(|r| DVector::from_column_slice(r)).collect();
                Ok(ConvexSet::VPoly(VPolytope::new(vs, rs)?))
            }
            SetJson::Ball { center, radius } => {
                Ok(ConvexSet::Ball(Ball::new(DVector::from_column_slice(center), *radius)?))
            }
        }
    }
}

impl From<&ConvexSet> for SetJson {
    fn from(set: &ConvexSet) -> SetJson {
        match set {
            ConvexSet::HPoly(h) => SetJson::HPoly {
                a: (0..h.num_rows()).map(|i| h.a().row(i).iter().cloned().collect()).collect(),
                b: h.b().iter().cloned().collect(),
            },
            ConvexSet::VPoly(v) => SetJson::VPoly {
                vertices: v.vertices().iter().map(|p| p.iter().cloned().collect()).collect(),
                rays: v.rays().iter().map(|p| p.iter().cloned().collect()).collect(),
            },
            ConvexSet::Ball(b) => SetJson::Ball {
                center: b.center().iter().cloned().collect(),
                radius: b.radius(),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use approx::assert_abs_diff_eq;
    use nalgebra::dvector;

    #[test]
    fn box_membership() {
        let b = fixtures::box2();
        assert!(b.contains(&dvector![0.0, 0.0], DEFAULT_TOL).unwrap());
        assert!(!b.contains(&dvector![1.5, 0.0], DEFAULT_TOL).unwrap());
    }

    #[test]
    fn ray_membership_via_lp() {
        let v = ConvexSet::VPoly(
            VPolytope::new(vec![dvector![0.0, 0.0]], vec![dvector![-1.0, 0.0]]).unwrap(),
        );
        assert!(v.contains(&dvector![-5.0, 0.0], DEFAULT_TOL).unwrap());
        assert!(!v.contains(&dvector![5.0, 0.0], DEFAULT_TOL).unwrap());
    }

    #[test]
    fn support_of_box() {
        let b = fixtures::box2();
        let s = b.support(&dvector![1.0, 1.0]).unwrap();
        assert_abs_diff_eq!(s.value(), 2.0, epsilon = 1e-9);
        let arg = s.argmax().unwrap();
        assert_abs_diff_eq!(arg[0], 1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(arg[1], 1.0, epsilon = 1e-9);
    }

    #[test]
    fn support_of_ball() {
        let b = fixtures::ball2(1.0);
        let s = b.support(&dvector![3.0, 4.0]).unwrap();
        assert_abs_diff_eq!(s.value(), 5.0, epsilon = 1e-9);
        let arg = s.argmax().unwrap();
        assert_abs_diff_eq!(arg[0], 0.6, epsilon = 1e-9);
        assert_abs_diff_eq!(arg[1], 0.8, epsilon = 1e-9);
    }

    #[test]
    fn support_unbounded_direction() {
        let v = ConvexSet::VPoly(
            VPolytope::new(vec![dvector![0.0, 0.0]], vec![dvector![1.0, 0.0]]).unwrap(),
        );
        assert!(matches!(v.support(&dvector![1.0, 0.0]).unwrap(), Support::Infinite { .. }));
    }

    #[test]
    fn normal_cone_on_box_facet() {
        let b = fixtures::box2();
        assert!(b
            .normal_cone_contains(&dvector![1.0, 0.0], &dvector![1.0, 0.0], DEFAULT_TOL)
            .unwrap());
        assert!(!b
            .normal_cone_contains(&dvector![0.0, 0.0], &dvector![1.0, 0.0], DEFAULT_TOL)
            .unwrap());
        assert!(b
            .normal_cone_contains(&dvector![0.0, 0.0], &dvector![0.0, 0.0], DEFAULT_TOL)
            .unwrap());
        // Outside the set the normal cone is empty.
        assert!(!b
            .normal_cone_contains(&dvector![2.0, 0.0], &dvector![1.0, 0.0], DEFAULT_TOL)
            .unwrap());
    }

    #[test]
    fn horizon_cone_of_slab() {
        let slab = fixtures::slab();
        let gens = slab.horizon_cone().generators().unwrap();
        assert_eq!(gens.len(), 1);
        assert_abs_diff_eq!(gens[0][0], -1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(gens[0][1], 0.0, epsilon = 1e-9);
    }

    #[test]
    fn horizon_cone_of_ball_is_trivial() {
        assert!(fixtures::ball2(1.0).horizon_cone().is_trivial().unwrap());
    }

    #[test]
    fn polar_of_box_is_cross_polytope() {
        let polar = fixtures::box2().polar().unwrap();
        let ConvexSet::VPoly(v) = &polar else { panic!("expected V-form") };
        assert_eq!(v.vertices().len(), 5); // origin + four facet points
        for p in [dvector![1.0, 0.0], dvector![0.0, -1.0]] {
            assert!(polar.contains(&p, 1e-9).unwrap());
        }
        assert!(!polar.contains(&dvector![0.6, 0.6], 1e-9).unwrap());
    }

    #[test]
    fn polar_of_ball_scales() {
        let polar = fixtures::ball2(2.0).polar().unwrap();
        let ConvexSet::Ball(b) = &polar else { panic!("expected ball") };
        assert_abs_diff_eq!(b.radius(), 0.5, epsilon = 1e-12);
    }

    #[test]
    fn polar_of_cross_polytope_is_box() {
        let cross = fixtures::cross_polytope();
        let polar = cross.polar().unwrap();
        for p in [dvector![1.0, 1.0], dvector![-1.0, 1.0]] {
            assert!(polar.contains(&p, 1e-9).unwrap());
        }
        assert!(!polar.contains(&dvector![1.1, 0.0], 1e-9).unwrap());
    }

    #[test]
    fn bipolar_recovers_the_box() {
        // Check F** = F by sampling: x in F iff sup over polar vertices
        // of <v, x> <= 1.
        let f = fixtures::box2();
        let polar = f.polar().unwrap();
        let ConvexSet::VPoly(pv) = &polar else { panic!() };
        let probe = |x: &Vector| {
            pv.vertices().iter().map(|v| v.dot(x)).fold(f64::NEG_INFINITY, f64::max) <= 1.0 + 1e-9
        };
        assert!(probe(&dvector![0.9, -0.9]));
        assert!(!probe(&dvector![1.1, 0.0]));
    }

    #[test]
    fn polar_norm_values() {
        assert_abs_diff_eq!(fixtures::box2().polar_norm().unwrap(), 1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(fixtures::ball2(2.0).polar_norm().unwrap(), 0.5, epsilon = 1e-12);
        let scaled = fixtures::anisotropic_slab_box();
        assert_abs_diff_eq!(scaled.polar_norm().unwrap(), 2.0, epsilon = 1e-9);
    }

    #[test]
    fn projection_clamps() {
        let b = fixtures::box2();
        let p = b.euclidean_project(&dvector![3.0, 1.0]).unwrap();
        assert_abs_diff_eq!(p[0], 1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(p[1], 1.0, epsilon = 1e-9);
        let ball = fixtures::ball2(1.0);
        let q = ball.euclidean_project(&dvector![3.0, 4.0]).unwrap();
        assert_abs_diff_eq!(q[0], 0.6, epsilon = 1e-9);
        assert_abs_diff_eq!(q[1], 0.8, epsilon = 1e-9);
    }

    #[test]
    fn hpoly_vertex_enumeration() {
        let ConvexSet::HPoly(h) = fixtures::box2() else { panic!() };
        let verts = h.vertices().unwrap();
        assert_eq!(verts.len(), 4);
        assert!(verts.iter().any(|v| (v - dvector![1.0, 1.0]).norm() < 1e-9));
    }

    #[test]
    fn slab_to_vpolytope() {
        let ConvexSet::HPoly(h) = fixtures::slab() else { panic!() };
        let v = h.to_vpolytope().unwrap();
        assert_eq!(v.vertices().len(), 2);
        assert_eq!(v.rays().len(), 1);
        assert!(v.rays()[0][0] < 0.0);
    }

    #[test]
    fn vpoly_to_hpoly_round_trip() {
        let cross = fixtures::cross_polytope();
        let ConvexSet::VPoly(v) = &cross else { panic!() };
        let h = v.to_hpolyhedron().unwrap();
        assert_eq!(h.num_rows(), 4);
        for p in [dvector![0.5, 0.5], dvector![-0.5, 0.5]] {
            assert!(h.contains(&p, 1e-9));
        }
        assert!(!h.contains(&dvector![0.7, 0.7], 1e-9));
    }

    #[test]
    fn empty_hpoly_rejected() {
        let a = nalgebra::dmatrix![1.0; -1.0];
        let b = dvector![-1.0, -1.0];
        assert!(matches!(HPolyhedron::new(a, b), Err(Error::EmptySet)));
    }

    #[test]
    fn degenerate_row_rejected() {
        let a = nalgebra::dmatrix![0.0, 0.0; 1.0, 0.0];
        let b = dvector![1.0, 1.0];
        assert!(matches!(HPolyhedron::new(a, b), Err(Error::DegenerateRow { row: 0 })));
    }

    #[test]
    fn dynamics_validation() {
        assert!(Dynamics::new(fixtures::box2()).is_ok());
        assert!(Dynamics::new(fixtures::triangle()).is_ok());
        // A box shifted away from the origin fails.
        let shifted = ConvexSet::VPoly(
            VPolytope::new(
                vec![dvector![1.0, 1.0], dvector![2.0, 1.0], dvector![1.0, 2.0]],
                Vec::new(),
            )
            .unwrap(),
        );
        assert!(Dynamics::new(shifted).is_err());
    }

    #[test]
    fn boundedness_and_symmetry_flags() {
        let slab = Dynamics::new(fixtures::slab()).unwrap();
        assert!(!slab.is_bounded());
        let tri = Dynamics::new(fixtures::triangle()).unwrap();
        assert!(tri.is_bounded());
        assert!(!tri.is_symmetric());
        let b = Dynamics::new(fixtures::box2()).unwrap();
        assert!(b.is_bounded());
        assert!(b.is_symmetric());
    }

    #[test]
    fn set_json_round_trip() {
        for set in [fixtures::box2(), fixtures::triangle(), fixtures::ball2(2.0)] {
            let json = SetJson::from(&set);
            let text = serde_json::to_string(&json).unwrap();
            let back: SetJson = serde_json::from_str(&text).unwrap();
            let set2 = ConvexSet::try_from(&back).unwrap();
            assert_eq!(set, set2);
        }
    }
}
