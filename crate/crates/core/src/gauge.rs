//! Minkowski gauge `rho_F(x) = inf{t > 0 : x in tF}`, its subdifferential
//! test, and the dual sets C* and S* used by the subdifferential
//! formulas.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::geometry::{ConvexSet, Dynamics};
use crate::lp::{self, LinearProgram, LpStatus};
use crate::Vector;

/// Gauge value together with a witness certifying it.
#[derive(Debug, Clone)]
pub struct GaugeValue {
    pub value: f64,
    pub witness: GaugeWitness,
}

/// What certifies the value: the argmax rows for the H-form closed rule,
/// a boundary point `x / value in F` for the V-form and ball cases, the
/// explicit `Horizon` tag when the infimum is 0 but unattained (`x` lies
/// in the horizon cone of `F`), or `Origin` for `x = 0`.
#[derive(Debug, Clone, PartialEq)]
pub enum GaugeWitness {
    Origin,
    ActiveRows(Vec<usize>),
    Scaling(Vector),
    Horizon,
}

/// Evaluate the gauge of the validated dynamics set at `x`.
pub fn gauge(f: &Dynamics, x: &Vector) -> Result<GaugeValue> {
    if x.len() != f.dim() {
        return Err(Error::DimensionMismatch { expected: f.dim(), got: x.len() });
    }
    if x.norm() < 1e-15 {
        return Ok(GaugeValue { value: 0.0, witness: GaugeWitness::Origin });
    }
    match f.set() {
        ConvexSet::HPoly(h) => {
            let mut best = 0.0_f64;
            let mut ratios = Vec::with_capacity(h.num_rows());
            for i in 0..h.num_rows() {
                let (a, b) = h.row(i);
                let r = a.dot(x) / b;
                ratios.push(r);
                best = best.max(r);
            }
            if best <= 0.0 {
                return Ok(GaugeValue { value: 0.0, witness: GaugeWitness::Horizon });
            }
            let active = ratios
                .iter()
                .enumerate()
                .filter(|(_, &r)| r >= best - 1e-9 * best.max(1.0))
                .map(|(i, _)| i)
                .collect();
            Ok(GaugeValue { value: best, witness: GaugeWitness::ActiveRows(active) })
        }
        ConvexSet::Ball(b) => {
            // Smallest t with ||x - t c|| <= t r; positive root of the
            // quadratic in t (tau > 0 because 0 is interior).
            let tau = b.radius() * b.radius() - b.center().norm_squared();
            let xc = x.dot(b.center());
            let disc = xc * xc + tau * x.norm_squared();
            let t = (xc + disc.sqrt()) / tau;
            Ok(GaugeValue { value: t, witness: GaugeWitness::Scaling(x / t) })
        }
        ConvexSet::VPoly(v) => {
            // min t  s.t.  V lam + R mu = x, sum lam = t, lam, mu >= 0.
            let n = v.dim();
            let (nv, nr) = (v.vertices().len(), v.rays().len());
            let nvar = nv + nr + 1;
            let mut c = DVector::zeros(nvar);
            c[nvar - 1] = 1.0;
            let mut a_eq = DMatrix::zeros(n + 1, nvar);
            let mut b_eq = DVector::zeros(n + 1);
            for (j, vert) in v.vertices().iter().enumerate() {
                for i in 0..n {
                    a_eq[(i, j)] = vert[i];
                }
                a_eq[(n, j)] = 1.0;
            }
            for (j, r) in v.rays().iter().enumerate() {
                for i in 0..n {
                    a_eq[(i, nv + j)] = r[i];
                }
            }
            a_eq[(n, nvar - 1)] = -1.0;
            for i in 0..n {
                b_eq[i] = x[i];
            }
            let mut p = LinearProgram::minimize(c).with_eq(a_eq, b_eq);
            for j in 0..nvar {
                p = p.with_lower(j, 0.0);
            }
            let sol = lp::solve_lp(&p)?;
            if sol.status != LpStatus::Optimal {
                return Err(Error::Numerical("gauge LP must attain its minimum".into()));
            }
            let t = sol.value.unwrap().max(0.0);
            if t <= 1e-9 {
                return Ok(GaugeValue { value: 0.0, witness: GaugeWitness::Horizon });
            }
            Ok(GaugeValue { value: t, witness: GaugeWitness::Scaling(x / t) })
        }
    }
}

/// Membership of `v` in the gauge subdifferential at `x`: the pair of
/// conditions `sigma_F(v) <= 1` and `<v, x> >= rho_F(x)` (the reverse
/// inequality holds automatically once `sigma_F(v) <= 1`).
pub fn gauge_subdiff_contains(f: &Dynamics, x: &Vector, v: &Vector, tol: f64) -> Result<bool> {
    if f.support(v)?.value() > 1.0 + tol {
        return Ok(false);
    }
    Ok(v.dot(x) >= gauge(f, x)?.value - tol)
}

/// Membership in `C* = {v : sigma_F(-v) <= 1}`.
pub fn cstar_contains(f: &Dynamics, v: &Vector, tol: f64) -> Result<bool> {
    Ok(f.support(&(-v))?.value() <= 1.0 + tol)
}

/// Membership in `S* = {v : sigma_F(-v) = 1}`.
pub fn sstar_contains(f: &Dynamics, v: &Vector, tol: f64) -> Result<bool> {
    let s = f.support(&(-v))?.value();
    Ok(s.is_finite() && (s - 1.0).abs() <= tol)
}

/// Lipschitz modulus of the gauge (and of the minimal time function):
/// the polar norm of `F`.
pub fn gauge_continuity_modulus(f: &Dynamics) -> Result<f64> {
    f.polar_norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use approx::assert_abs_diff_eq;
    use nalgebra::dvector;

    #[test]
    fn box_gauge_closed_rule() {
        let f = fixtures::dynamics_box2();
        let g = gauge(&f, &dvector![3.0, -2.0]).unwrap();
        assert_abs_diff_eq!(g.value, 3.0, epsilon = 1e-12);
        assert_eq!(g.witness, GaugeWitness::ActiveRows(vec![0]));
    }

    #[test]
    fn origin_gauge_is_zero() {
        for (_, f) in fixtures::gauge_suite_dynamics() {
            let g = gauge(&f, &dvector![0.0, 0.0]).unwrap();
            assert_eq!(g.value, 0.0);
            assert_eq!(g.witness, GaugeWitness::Origin);
        }
    }

    #[test]
    fn slab_horizon_direction_has_zero_gauge() {
        let f = fixtures::dynamics_slab();
        let g = gauge(&f, &dvector![-7.0, 0.0]).unwrap();
        assert_eq!(g.value, 0.0);
        assert_eq!(g.witness, GaugeWitness::Horizon);
    }

    #[test]
    fn ball_gauge_is_scaled_norm() {
        let f = fixtures::dynamics_ball2(2.0);
        let g = gauge(&f, &dvector![3.0, 4.0]).unwrap();
        assert_abs_diff_eq!(g.value, 2.5, epsilon = 1e-12);
        let GaugeWitness::Scaling(w) = &g.witness else { panic!() };
        assert_abs_diff_eq!(w.norm(), 2.0, epsilon = 1e-9);
    }

    #[test]
    fn vpoly_gauge_via_lp() {
        let f = fixtures::dynamics_triangle();
        // (1,0) = 0.5 * (2,0), so the gauge is 0.5.
        let g = gauge(&f, &dvector![1.0, 0.0]).unwrap();
        assert_abs_diff_eq!(g.value, 0.5, epsilon = 1e-9);
        // (-1,0) leaves the triangle through the edge between (-1,-1)
        // and (0,2), which crosses the x-axis at (-2/3, 0).
        let g = gauge(&f, &dvector![-1.0, 0.0]).unwrap();
        assert_abs_diff_eq!(g.value, 1.5, epsilon = 1e-9);
    }

    #[test]
    fn gauge_subdiff_examples() {
        let f = fixtures::dynamics_box2();
        let x = dvector![3.0, -2.0];
        assert!(gauge_subdiff_contains(&f, &x, &dvector![1.0, 0.0], 1e-9).unwrap());
        assert!(!gauge_subdiff_contains(&f, &x, &dvector![0.0, -1.0], 1e-9).unwrap());
        // At the origin the subdifferential is the whole polar set.
        assert!(gauge_subdiff_contains(&f, &dvector![0.0, 0.0], &dvector![0.5, 0.5], 1e-9)
            .unwrap());
        assert!(!gauge_subdiff_contains(&f, &dvector![0.0, 0.0], &dvector![1.5, 0.0], 1e-9)
            .unwrap());
    }

    #[test]
    fn cstar_examples() {
        let ball = fixtures::dynamics_ball2(1.0);
        assert!(cstar_contains(&ball, &dvector![0.5, 0.5], 1e-9).unwrap());
        assert!(cstar_contains(&ball, &dvector![0.0, 0.0], 1e-9).unwrap());
        let b = fixtures::dynamics_box2();
        assert!(!cstar_contains(&b, &dvector![1.2, 0.0], 1e-9).unwrap());
    }

    #[test]
    fn sstar_examples() {
        let ball = fixtures::dynamics_ball2(1.0);
        assert!(sstar_contains(&ball, &dvector![1.0, 0.0], 1e-7).unwrap());
        assert!(!sstar_contains(&ball, &dvector![0.5, 0.0], 1e-7).unwrap());
        // sigma_box((-1,-1)) = 2, so (1,1) is not in S* for the box.
        let b = fixtures::dynamics_box2();
        assert!(!sstar_contains(&b, &dvector![1.0, 1.0], 1e-7).unwrap());
    }

    #[test]
    fn continuity_modulus_examples() {
        assert_abs_diff_eq!(
            gauge_continuity_modulus(&fixtures::dynamics_ball2(2.0)).unwrap(),
            0.5,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            gauge_continuity_modulus(&fixtures::dynamics_box2()).unwrap(),
            1.0,
            epsilon = 1e-9
        );
        let f = Dynamics::new(fixtures::anisotropic_slab_box()).unwrap();
        assert_abs_diff_eq!(gauge_continuity_modulus(&f).unwrap(), 2.0, epsilon = 1e-9);
    }
}
