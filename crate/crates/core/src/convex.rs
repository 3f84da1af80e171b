//! Closed convex sets with exact projectors, plus Dykstra's alternating
//! projection for intersections.
//!
//! Every variant has a closed-form projector except `Intersection`, which
//! runs Dykstra's algorithm over its members. Unlike plain cyclic projection,
//! Dykstra converges to the *nearest* point of the intersection, which the
//! distance metrics downstream rely on.

use serde::{Deserialize, Serialize};

use crate::point::Point;

/// Membership residual below which a point counts as inside a set.
pub const MEMBERSHIP_TOL: f64 = 1e-9;
/// Dykstra stops once a full sweep moves the iterate less than this.
pub const DYKSTRA_TOL: f64 = 1e-10;
/// Hard sweep cap; hitting it signals an empty or ill-conditioned intersection.
pub const DYKSTRA_MAX_SWEEPS: usize = 10_000;
/// Pairwise orthonormality tolerance for affine-subspace directions.
pub const ORTHONORMAL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, thiserror::Error)]
pub enum ConvexError {
    #[error("dimension mismatch: set lives in R^{expected}, point in R^{got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error(
        "intersection projection did not converge within {sweeps} sweeps \
         (last sweep displacement {displacement:.3e})"
    )]
    NonConvergence { sweeps: usize, displacement: f64 },
    #[error("invalid set: {0}")]
    Invalid(String),
}

/// Declarative description of a closed convex set.
///
/// The tagged serde form matches the experiment config format, e.g.
/// `{ type = "ball", center = [-1.0, 0.0], radius = 1.0 }`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ConvexSet {
    /// Euclidean ball `{ x : |x - center| <= radius }`. Radius 0 is a singleton.
    Ball { center: Point, radius: f64 },
    /// Axis-aligned box `{ x : lower <= x <= upper }` componentwise.
    Box { lower: Point, upper: Point },
    /// Halfspace `{ x : normal . x <= offset }`. The normal is re-normalized
    /// to unit length at validation.
    Halfspace { normal: Point, offset: f64 },
    /// Affine subspace through `basepoint` spanned by pairwise orthonormal
    /// `directions` (empty directions = singleton).
    AffineSubspace {
        basepoint: Point,
        directions: Vec<Point>,
    },
    /// Intersection of member sets sharing one dimension.
    Intersection { members: Vec<ConvexSet> },
}

/// Outcome of a projection query.
#[derive(Clone, Debug, PartialEq)]
pub struct ProjectionResult {
    /// Nearest point of the set.
    pub point: Point,
    /// Euclidean distance from the query to `point`.
    pub distance: f64,
    /// Dykstra sweeps used; 0 for closed-form projectors.
    pub iterations: usize,
    /// Always true on success; closed-form projectors are exact by
    /// construction, and a Dykstra run that misses tolerance is an error.
    pub converged: bool,
}

impl ConvexSet {
    pub fn ball(center: impl Into<Point>, radius: f64) -> Self {
        ConvexSet::Ball {
            center: center.into(),
            radius,
        }
    }

    pub fn axis_box(lower: impl Into<Point>, upper: impl Into<Point>) -> Self {
        ConvexSet::Box {
            lower: lower.into(),
            upper: upper.into(),
        }
    }

    /// Halfspace `normal . x <= offset`; normalizes the normal immediately.
    pub fn halfspace(normal: impl Into<Point>, offset: f64) -> Self {
        let normal = normal.into();
        let n = normal.norm();
        if n > 0.0 {
            ConvexSet::Halfspace {
                normal: normal.scale(1.0 / n),
                offset: offset / n,
            }
        } else {
            ConvexSet::Halfspace { normal, offset }
        }
    }

    pub fn intersection(members: Vec<ConvexSet>) -> Self {
        ConvexSet::Intersection { members }
    }

    /// Ambient dimension.
    pub fn dim(&self) -> usize {
        match self {
            ConvexSet::Ball { center, .. } => center.dim(),
            ConvexSet::Box { lower, .. } => lower.dim(),
            ConvexSet::Halfspace { normal, .. } => normal.dim(),
            ConvexSet::AffineSubspace { basepoint, .. } => basepoint.dim(),
            ConvexSet::Intersection { members } => members.first().map(|m| m.dim()).unwrap_or(0),
        }
    }

    /// Checks structural invariants and normalizes halfspace normals in
    /// place. Config loading calls this before a set is used anywhere.
    pub fn validate(&mut self) -> Result<(), ConvexError> {
        match self {
            ConvexSet::Ball { center, radius } => {
                if !center.is_finite() {
                    return Err(ConvexError::Invalid("ball center must be finite".into()));
                }
                if !radius.is_finite() || *radius < 0.0 {
                    return Err(ConvexError::Invalid(format!(
                        "ball radius must be finite and >= 0, got {radius}"
                    )));
                }
            }
            ConvexSet::Box { lower, upper } => {
                if lower.dim() != upper.dim() {
                    return Err(ConvexError::Invalid(
                        "box lower/upper dimensions differ".into(),
                    ));
                }
                if !lower.is_finite() || !upper.is_finite() {
                    return Err(ConvexError::Invalid("box bounds must be finite".into()));
                }
                if lower
                    .coords()
                    .iter()
                    .zip(upper.coords())
                    .any(|(l, u)| l > u)
                {
                    return Err(ConvexError::Invalid(
                        "box requires lower <= upper componentwise".into(),
                    ));
                }
            }
            ConvexSet::Halfspace { normal, offset } => {
                let n = normal.norm();
                if !n.is_finite() || n == 0.0 {
                    return Err(ConvexError::Invalid(
                        "halfspace normal must be nonzero and finite".into(),
                    ));
                }
                if !offset.is_finite() {
                    return Err(ConvexError::Invalid(
                        "halfspace offset must be finite".into(),
                    ));
                }
                *normal = normal.scale(1.0 / n);
                *offset /= n;
            }
            ConvexSet::AffineSubspace {
                basepoint,
                directions,
            } => {
                if !basepoint.is_finite() {
                    return Err(ConvexError::Invalid(
                        "affine basepoint must be finite".into(),
                    ));
                }
                let d = basepoint.dim();
                for (i, u) in directions.iter().enumerate() {
                    if u.dim() != d {
                        return Err(ConvexError::Invalid(format!(
                            "affine direction {i} has dimension {} (expected {d})",
                            u.dim()
                        )));
                    }
                    if !u.is_finite() {
                        return Err(ConvexError::Invalid(format!(
                            "affine direction {i} must be finite"
                        )));
                    }
                    if (u.norm() - 1.0).abs() > ORTHONORMAL_TOL {
                        return Err(ConvexError::Invalid(format!(
                            "affine direction {i} is not unit length"
                        )));
                    }
                    for (j, v) in directions.iter().enumerate().take(i) {
                        if u.dot(v).abs() > ORTHONORMAL_TOL {
                            return Err(ConvexError::Invalid(format!(
                                "affine directions {j} and {i} are not orthogonal"
                            )));
                        }
                    }
                }
            }
            ConvexSet::Intersection { members } => {
                if members.is_empty() {
                    return Err(ConvexError::Invalid(
                        "intersection needs at least one member".into(),
                    ));
                }
                let d = members[0].dim();
                for (i, m) in members.iter_mut().enumerate() {
                    m.validate()?;
                    if m.dim() != d {
                        return Err(ConvexError::Invalid(format!(
                            "intersection member {i} has dimension {} (expected {d})",
                            m.dim()
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

fn check_dim(set: &ConvexSet, x: &Point) -> Result<(), ConvexError> {
    if set.dim() != x.dim() {
        return Err(ConvexError::DimensionMismatch {
            expected: set.dim(),
            got: x.dim(),
        });
    }
    Ok(())
}

/// Nearest point of `set` to `x`.
///
/// Closed form for ball, box, halfspace and affine subspace; Dykstra sweeps
/// for intersections, stopping once a full sweep moves the iterate by at
/// most [`DYKSTRA_TOL`] and failing with `NonConvergence` after
/// [`DYKSTRA_MAX_SWEEPS`].
pub fn project(set: &ConvexSet, x: &Point) -> Result<ProjectionResult, ConvexError> {
    check_dim(set, x)?;
    match set {
        ConvexSet::Intersection { members } => dykstra(members, x),
        _ => {
            let point = project_closed_form(set, x);
            let distance = x.dist(&point);
            Ok(ProjectionResult {
                point,
                distance,
                iterations: 0,
                converged: true,
            })
        }
    }
}

/// Euclidean distance from `x` to `set`; zero (to tolerance) iff `x` is a member.
pub fn distance(set: &ConvexSet, x: &Point) -> Result<f64, ConvexError> {
    Ok(project(set, x)?.distance)
}

/// Membership test at tolerance `tol >= 0`.
pub fn contains(set: &ConvexSet, x: &Point, tol: f64) -> Result<bool, ConvexError> {
    debug_assert!(tol >= 0.0);
    Ok(distance(set, x)? <= tol)
}

fn project_closed_form(set: &ConvexSet, x: &Point) -> Point {
    match set {
        ConvexSet::Ball { center, radius } => {
            let v = x.sub(center);
            let n = v.norm();
            if n <= *radius {
                x.clone()
            } else {
                // n > radius >= 0 so n > 0
                center.add(&v.scale(radius / n))
            }
        }
        ConvexSet::Box { lower, upper } => Point::new(
            x.coords()
                .iter()
                .zip(lower.coords().iter().zip(upper.coords()))
                .map(|(&c, (&l, &u))| c.clamp(l, u))
                .collect(),
        ),
        ConvexSet::Halfspace { normal, offset } => {
            let slack = normal.dot(x) - offset;
            if slack <= 0.0 {
                x.clone()
            } else {
                let norm_sq = normal.dot(normal);
                let mut y = x.clone();
                y.axpy(-slack / norm_sq, normal);
                y
            }
        }
        ConvexSet::AffineSubspace {
            basepoint,
            directions,
        } => {
            let v = x.sub(basepoint);
            let mut y = basepoint.clone();
            for u in directions {
                y.axpy(v.dot(u), u);
            }
            y
        }
        ConvexSet::Intersection { .. } => unreachable!("handled by project"),
    }
}

/// Dykstra's alternating projection onto `∩ members`.
///
/// Maintains one correction vector per member; each sweep projects
/// `iterate + correction` onto the next member and updates the correction to
/// the step just removed. The iterate converges to the exact projection for
/// closed convex members with nonempty intersection.
fn dykstra(members: &[ConvexSet], x: &Point) -> Result<ProjectionResult, ConvexError> {
    if members.len() == 1 {
        return project(&members[0], x);
    }
    let mut y = x.clone();
    let mut corrections = vec![Point::zeros(x.dim()); members.len()];
    let mut displacement = f64::INFINITY;
    for sweep in 1..=DYKSTRA_MAX_SWEEPS {
        let sweep_start = y.clone();
        for (member, correction) in members.iter().zip(corrections.iter_mut()) {
            let shifted = y.add(correction);
            let projected = project(member, &shifted)?.point;
            *correction = shifted.sub(&projected);
            y = projected;
        }
        displacement = y.dist(&sweep_start);
        if displacement <= DYKSTRA_TOL {
            return Ok(ProjectionResult {
                distance: x.dist(&y),
                point: y,
                iterations: sweep,
                converged: true,
            });
        }
    }
    Err(ConvexError::NonConvergence {
        sweeps: DYKSTRA_MAX_SWEEPS,
        displacement,
    })
}
