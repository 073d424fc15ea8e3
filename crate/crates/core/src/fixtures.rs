//! Built-in sets used by the verification suites and tests.

use nalgebra::{dmatrix, dvector, DVector};

use crate::geometry::{Ball, ConvexSet, Dynamics, HPolyhedron, VPolytope};
use crate::Vector;

/// The box `[-1, 1]^2` in H-form.
pub fn box2() -> ConvexSet {
    let a = dmatrix![1.0, 0.0; -1.0, 0.0; 0.0, 1.0; 0.0, -1.0];
    let b = dvector![1.0, 1.0, 1.0, 1.0];
    ConvexSet::HPoly(HPolyhedron::new(a, b).unwrap())
}

/// Origin-centered ball of the given radius in R^2.
pub fn ball2(radius: f64) -> ConvexSet {
    ConvexSet::Ball(Ball::new(DVector::zeros(2), radius).unwrap())
}

/// Non-symmetric triangle `co{(2,0), (0,2), (-1,-1)}` with the origin in
/// its interior.
pub fn triangle() -> ConvexSet {
    ConvexSet::VPoly(
        VPolytope::new(
            vec![dvector![2.0, 0.0], dvector![0.0, 2.0], dvector![-1.0, -1.0]],
            Vec::new(),
        )
        .unwrap(),
    )
}

/// Unbounded slab `{x1 <= 1, |x2| <= 1}`.
pub fn slab() -> ConvexSet {
    let a = dmatrix![1.0, 0.0; 0.0, 1.0; 0.0, -1.0];
    let b = dvector![1.0, 1.0, 1.0];
    ConvexSet::HPoly(HPolyhedron::new(a, b).unwrap())
}

/// `{2 x1 <= 1, -2 x1 <= 1, |x2| <= 1}`; its polar norm is 2.
pub fn anisotropic_slab_box() -> ConvexSet {
    let a = dmatrix![2.0, 0.0; -2.0, 0.0; 0.0, 1.0; 0.0, -1.0];
    let b = dvector![1.0, 1.0, 1.0, 1.0];
    ConvexSet::HPoly(HPolyhedron::new(a, b).unwrap())
}

/// Cross-polytope `co{+-e1, +-e2}`.
pub fn cross_polytope() -> ConvexSet {
    ConvexSet::VPoly(
        VPolytope::new(
            vec![
                dvector![1.0, 0.0],
                dvector![-1.0, 0.0],
                dvector![0.0, 1.0],
                dvector![0.0, -1.0],
            ],
            Vec::new(),
        )
        .unwrap(),
    )
}

/// Segment between two points.
pub fn segment(a: Vector, b: Vector) -> ConvexSet {
    ConvexSet::VPoly(VPolytope::new(vec![a, b], Vec::new()).unwrap())
}

/// Single point.
pub fn point(p: Vector) -> ConvexSet {
    ConvexSet::VPoly(VPolytope::new(vec![p], Vec::new()).unwrap())
}

/// The origin in R^2.
pub fn origin2() -> ConvexSet {
    point(DVector::zeros(2))
}

/// Validated dynamics wrappers for the standard fixtures.
pub fn dynamics_box2() -> Dynamics {
    Dynamics::new(box2()).unwrap()
}

pub fn dynamics_ball2(radius: f64) -> Dynamics {
    Dynamics::new(ball2(radius)).unwrap()
}

pub fn dynamics_triangle() -> Dynamics {
    Dynamics::new(triangle()).unwrap()
}

pub fn dynamics_slab() -> Dynamics {
    Dynamics::new(slab()).unwrap()
}

/// The five dynamics fixtures of the gauge certification suite.
pub fn gauge_suite_dynamics() -> Vec<(&'static str, Dynamics)> {
    vec![
        ("box", dynamics_box2()),
        ("ball_r1", dynamics_ball2(1.0)),
        ("ball_r2", dynamics_ball2(2.0)),
        ("triangle", dynamics_triangle()),
        ("slab", dynamics_slab()),
    ]
}
