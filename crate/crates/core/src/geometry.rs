//! Planar points and polylines.

use std::f64::consts::PI;

/// A point in workspace coordinates (meters).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dist(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn sub(self, other: Point) -> Point {
        Point::new(self.x - other.x, self.y - other.y)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

/// Wraps an angle into `(-π, π]`.
pub fn normalize_angle(theta: f64) -> f64 {
    let mut t = theta % (2.0 * PI);
    if t <= -PI {
        t += 2.0 * PI;
    } else if t > PI {
        t -= 2.0 * PI;
    }
    t
}

/// Distance from `p` to the segment `a`–`b`.
pub fn point_segment_dist(p: Point, a: Point, b: Point) -> f64 {
    let ab = b.sub(a);
    let len2 = ab.x * ab.x + ab.y * ab.y;
    if len2 == 0.0 {
        return p.dist(a);
    }
    let ap = p.sub(a);
    let t = ((ap.x * ab.x + ap.y * ab.y) / len2).clamp(0.0, 1.0);
    p.dist(Point::new(a.x + t * ab.x, a.y + t * ab.y))
}

/// An ordered list of points; the geometry of a graph edge or path.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Polyline {
    pub points: Vec<Point>,
}

impl Polyline {
    pub fn new(points: Vec<Point>) -> Self {
        Self { points }
    }

    pub fn segment(a: Point, b: Point) -> Self {
        Self { points: vec![a, b] }
    }

    pub fn length(&self) -> f64 {
        self.points.windows(2).map(|w| w[0].dist(w[1])).sum()
    }

    pub fn first(&self) -> Option<Point> {
        self.points.first().copied()
    }

    pub fn last(&self) -> Option<Point> {
        self.points.last().copied()
    }

    pub fn reversed(&self) -> Polyline {
        let mut points = self.points.clone();
        points.reverse();
        Polyline { points }
    }

    /// Appends `other`, skipping its first point when it repeats our last one.
    pub fn extend_from(&mut self, other: &[Point]) {
        let mut it = other.iter();
        if let (Some(last), Some(first)) = (self.points.last(), other.first()) {
            if last == first {
                it.next();
            }
        }
        self.points.extend(it);
    }

    /// Minimum distance from `p` to any segment of the polyline.
    pub fn distance_to(&self, p: Point) -> f64 {
        match self.points.len() {
            0 => f64::INFINITY,
            1 => p.dist(self.points[0]),
            _ => self
                .points
                .windows(2)
                .map(|w| point_segment_dist(p, w[0], w[1]))
                .fold(f64::INFINITY, f64::min),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn angle_wraps_into_half_open_interval() {
        assert_eq!(normalize_angle(PI), PI);
        assert_eq!(normalize_angle(-PI), PI);
        assert!((normalize_angle(3.0 * PI) - PI).abs() < 1e-12);
        assert!((normalize_angle(0.5 - 4.0 * PI) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn polyline_length_and_distance() {
        let pl = Polyline::new(vec![
            Point::new(0.0, 0.0),
            Point::new(3.0, 0.0),
            Point::new(3.0, 4.0),
        ]);
        assert_eq!(pl.length(), 7.0);
        assert_eq!(pl.distance_to(Point::new(1.0, 1.0)), 1.0);
        assert_eq!(pl.distance_to(Point::new(5.0, 2.0)), 2.0);
    }

    #[test]
    fn extend_skips_shared_joint() {
        let mut a = Polyline::segment(Point::new(0.0, 0.0), Point::new(1.0, 0.0));
        a.extend_from(&[Point::new(1.0, 0.0), Point::new(2.0, 0.0)]);
        assert_eq!(a.points.len(), 3);
    }
}
