//! Dense points in `R^d` with the handful of vector operations the
//! projectors and the protocol need.

use serde::{Deserialize, Serialize};

/// A point in `R^d`. Serializes as a bare coordinate list, e.g. `[-1.0, 0.0]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point(pub Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Self {
        Point(coords)
    }

    pub fn zeros(dim: usize) -> Self {
        Point(vec![0.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }

    pub fn dot(&self, other: &Point) -> f64 {
        debug_assert_eq!(self.dim(), other.dim());
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn dist(&self, other: &Point) -> f64 {
        debug_assert_eq!(self.dim(), other.dim());
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    pub fn sub(&self, other: &Point) -> Point {
        debug_assert_eq!(self.dim(), other.dim());
        Point(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn add(&self, other: &Point) -> Point {
        debug_assert_eq!(self.dim(), other.dim());
        Point(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn scale(&self, factor: f64) -> Point {
        Point(self.0.iter().map(|a| a * factor).collect())
    }

    /// `self + factor * other`, in place.
    pub fn axpy(&mut self, factor: f64, other: &Point) {
        debug_assert_eq!(self.dim(), other.dim());
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a += factor * b;
        }
    }

    /// Convex combination `Σ w_j x_j` of weighted points sharing a dimension.
    pub fn weighted_sum<'a>(terms: impl Iterator<Item = (f64, &'a Point)>, dim: usize) -> Point {
        let mut acc = Point::zeros(dim);
        for (w, x) in terms {
            acc.axpy(w, x);
        }
        acc
    }
}

impl std::ops::Index<usize> for Point {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl From<Vec<f64>> for Point {
    fn from(coords: Vec<f64>) -> Self {
        Point(coords)
    }
}

impl From<&[f64]> for Point {
    fn from(coords: &[f64]) -> Self {
        Point(coords.to_vec())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_ops() {
        let a = Point::new(vec![3.0, 4.0]);
        let b = Point::zeros(2);
        assert_eq!(a.norm(), 5.0);
        assert_eq!(a.dist(&b), 5.0);
        assert_eq!(a.sub(&b), a);
        assert_eq!(a.dot(&a), 25.0);
    }

    #[test]
    fn weighted_sum_is_convex_combination() {
        let a = Point::new(vec![0.0, 0.0]);
        let b = Point::new(vec![2.0, 0.0]);
        let avg = Point::weighted_sum([(0.5, &a), (0.5, &b)].into_iter(), 2);
        assert_eq!(avg, Point::new(vec![1.0, 0.0]));
    }
}
