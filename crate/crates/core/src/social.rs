//! Anisotropic social-force cost: point evaluation, rasterized field, and the
//! edge cost line integral.

use std::fmt::Write as _;

use thiserror::Error;

use crate::geometry::{Point, Polyline};
use crate::scenario::{Pedestrian, Scenario, SocialParams};

/// Cost assigned to zero-length edges so inverse-cost weights stay finite.
pub const EPSILON_COST: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum FieldError {
    #[error("non-finite input to force evaluation")]
    NonFinite,
}

/// Anisotropy factor `λ + (1-λ)(1+cos φ)/2`, always within `[λ, 1]`.
pub fn anisotropy(lambda: f64, cos_phi: f64) -> f64 {
    lambda + (1.0 - lambda) * (1.0 + cos_phi) * 0.5
}

/// Magnitude of the force a single pedestrian exerts on a robot located at `point`.
///
/// At the pedestrian center the direction is taken along the pedestrian heading.
pub fn pairwise_force(ped: &Pedestrian, point: Point, params: &SocialParams) -> Result<f64, FieldError> {
    let finite = point.is_finite()
        && ped.center().is_finite()
        && ped.pose.theta.is_finite()
        && ped.radius.is_finite()
        && [params.magnitude_a, params.range_b, params.lambda, params.robot_radius]
            .iter()
            .all(|v| v.is_finite());
    if !finite {
        return Err(FieldError::NonFinite);
    }
    Ok(force_magnitude(ped, point, params))
}

#[inline]
fn force_magnitude(ped: &Pedestrian, point: Point, params: &SocialParams) -> f64 {
    let (hx, hy) = (ped.pose.theta.cos(), ped.pose.theta.sin());
    let dx = point.x - ped.pose.x;
    let dy = point.y - ped.pose.y;
    let d = dx.hypot(dy);
    // e_i . d_hat
    let along = if d > 0.0 { (hx * dx + hy * dy) / d } else { 1.0 };
    let cos_phi = if params.front_weighted { along } else { -along };
    let r = ped.radius + params.robot_radius;
    params.magnitude_a * ((r - d) / params.range_b).exp() * anisotropy(params.lambda, cos_phi)
}

/// Sum of per-pedestrian force magnitudes at `point`.
pub fn total_cost_at(peds: &[Pedestrian], point: Point, params: &SocialParams) -> f64 {
    peds.iter().map(|p| force_magnitude(p, point, params)).sum()
}

/// Social cost sampled at cell centers, row-major with row 0 at `origin.y`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    pub origin: Point,
    pub resolution: f64,
    pub width: usize,
    pub height: usize,
    pub values: Vec<f64>,
}

impl ScalarField {
    pub fn get(&self, col: usize, row: usize) -> f64 {
        self.values[row * self.width + col]
    }

    pub fn cell_center(&self, col: usize, row: usize) -> Point {
        Point::new(
            self.origin.x + (col as f64 + 0.5) * self.resolution,
            self.origin.y + (row as f64 + 0.5) * self.resolution,
        )
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    /// Plain (P2) portable greymap, top row first, darker = costlier.
    pub fn to_pgm(&self) -> String {
        let max = self.max_value();
        let mut out = String::with_capacity(self.values.len() * 4 + 64);
        out.push_str("P2\n");
        let _ = writeln!(
            out,
            "# origin {} {} resolution {}",
            self.origin.x, self.origin.y, self.resolution
        );
        let _ = writeln!(out, "{} {}\n255", self.width, self.height);
        for row in (0..self.height).rev() {
            let line: Vec<String> = (0..self.width)
                .map(|col| grey_level(self.get(col, row), max).to_string())
                .collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }
}

/// Maps a field value to a grey level where 255 is zero cost.
pub fn grey_level(v: f64, max: f64) -> u8 {
    if max <= 0.0 {
        return 255;
    }
    255 - ((v / max).clamp(0.0, 1.0) * 255.0).round() as u8
}

pub fn rasterize_field(s: &Scenario) -> ScalarField {
    let (width, height) = s.grid_dims();
    let origin = Point::new(s.bounds.xmin, s.bounds.ymin);
    let mut field = ScalarField {
        origin,
        resolution: s.resolution,
        width,
        height,
        values: vec![0.0; width * height],
    };
    for row in 0..height {
        for col in 0..width {
            let p = field.cell_center(col, row);
            field.values[row * width + col] = total_cost_at(&s.pedestrians, p, &s.social);
        }
    }
    field
}

/// Line integral of the social field along `curve` plus the curve length,
/// by composite trapezoid with arc-length step at most the scenario resolution.
pub fn edge_cost(curve: &Polyline, s: &Scenario) -> f64 {
    edge_cost_with_step(curve, &s.pedestrians, &s.social, s.resolution)
}

/// Same as [`edge_cost`] with an explicit maximum quadrature step.
///
/// Terms are summed in sorted order so a reversed polyline yields a bit-identical cost.
pub fn edge_cost_with_step(curve: &Polyline, peds: &[Pedestrian], params: &SocialParams, max_step: f64) -> f64 {
    let mut lengths = Vec::with_capacity(curve.points.len());
    let mut terms = Vec::new();
    for w in curve.points.windows(2) {
        let (a, b) = (w[0], w[1]);
        let len = a.dist(b);
        if len == 0.0 {
            continue;
        }
        lengths.push(len);
        if peds.is_empty() {
            continue;
        }
        let n = (len / max_step).ceil().max(1.0) as usize;
        let h = len / n as f64;
        for i in 0..=n {
            let wa = (n - i) as f64 / n as f64;
            let wb = i as f64 / n as f64;
            let p = Point::new(a.x * wa + b.x * wb, a.y * wa + b.y * wb);
            let weight = if i == 0 || i == n { 0.5 * h } else { h };
            terms.push(weight * total_cost_at(peds, p, params));
        }
    }
    let length = sorted_sum(&mut lengths);
    if length == 0.0 {
        return EPSILON_COST;
    }
    sorted_sum(&mut terms) + length
}

fn sorted_sum(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    v.iter().sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{Bounds, Pose2D};
    use std::f64::consts::PI;

    fn params() -> SocialParams {
        SocialParams::default()
    }

    // radius 0.2 + robot 0.2 = contact distance 0.4
    fn ped() -> Pedestrian {
        Pedestrian::new(0.0, 0.0, 0.0, 0.2)
    }

    #[test]
    fn contact_distance_in_front_gives_magnitude() {
        let f = pairwise_force(&ped(), Point::new(0.4, 0.0), &params()).unwrap();
        assert!((f - 2.0).abs() < 1e-12);
    }

    #[test]
    fn contact_distance_behind_gives_lambda_share() {
        let f = pairwise_force(&ped(), Point::new(-0.4, 0.0), &params()).unwrap();
        assert!((f - 0.2).abs() < 1e-12);
    }

    #[test]
    fn literal_convention_flips_the_lobe() {
        let p = SocialParams {
            front_weighted: false,
            ..params()
        };
        let front = pairwise_force(&ped(), Point::new(0.4, 0.0), &p).unwrap();
        let behind = pairwise_force(&ped(), Point::new(-0.4, 0.0), &p).unwrap();
        assert!((front - 0.2).abs() < 1e-12);
        assert!((behind - 2.0).abs() < 1e-12);
    }

    #[test]
    fn isotropic_when_lambda_is_one() {
        let p = SocialParams { lambda: 1.0, ..params() };
        let front = pairwise_force(&ped(), Point::new(0.9, 0.0), &p).unwrap();
        let behind = pairwise_force(&ped(), Point::new(-0.9, 0.0), &p).unwrap();
        assert_eq!(front, behind);
    }

    #[test]
    fn coincident_point_uses_heading() {
        let f = pairwise_force(&ped(), Point::new(0.0, 0.0), &params()).unwrap();
        assert!((f - 2.0 * (0.4f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn nan_is_rejected() {
        let r = pairwise_force(&ped(), Point::new(f64::NAN, 0.0), &params());
        assert_eq!(r, Err(FieldError::NonFinite));
    }

    #[test]
    fn sums_over_pedestrians() {
        let p = Point::new(1.0, 0.5);
        assert_eq!(total_cost_at(&[], p, &params()), 0.0);
        let single = total_cost_at(&[ped()], p, &params());
        assert_eq!(single, pairwise_force(&ped(), p, &params()).unwrap());
        assert_eq!(total_cost_at(&[ped(), ped()], p, &params()), 2.0 * single);
    }

    fn lone(theta: f64) -> Scenario {
        Scenario {
            bounds: Bounds::new(0.0, 0.0, 6.0, 6.0),
            resolution: 0.1,
            robot: Pose2D::new(0.5, 0.5, 0.0),
            goal: Pose2D::new(5.5, 5.5, 0.0),
            pedestrians: vec![Pedestrian::new(3.0, 3.0, theta, 0.2)],
            social: params(),
        }
    }

    #[test]
    fn empty_scenario_rasterizes_to_zero() {
        let mut s = lone(0.0);
        s.pedestrians.clear();
        let f = rasterize_field(&s);
        assert_eq!((f.width, f.height), (60, 60));
        assert!(f.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn field_decays_along_front_ray() {
        let s = lone(0.0);
        let f = rasterize_field(&s);
        // row 29 has centers at y = 2.95; walk right from just beyond contact distance
        let row = 29;
        let mut prev = f64::INFINITY;
        for col in 35..60 {
            let v = f.get(col, row);
            assert!(v < prev);
            prev = v;
        }
    }

    #[test]
    fn pgm_header_and_size() {
        let f = rasterize_field(&lone(PI / 2.0));
        let pgm = f.to_pgm();
        let mut lines = pgm.lines();
        assert_eq!(lines.next(), Some("P2"));
        assert_eq!(lines.next(), Some("# origin 0 0 resolution 0.1"));
        assert_eq!(lines.next(), Some("60 60"));
        assert_eq!(lines.next(), Some("255"));
        assert_eq!(lines.count(), 60);
    }

    #[test]
    fn straight_segment_without_pedestrians_costs_its_length() {
        let mut s = lone(0.0);
        s.pedestrians.clear();
        let c = edge_cost(&Polyline::segment(Point::new(1.0, 1.0), Point::new(3.0, 1.0)), &s);
        assert_eq!(c, 2.0);
    }

    #[test]
    fn far_segment_costs_about_its_length() {
        // 20 b away: integrand below 2 e^{-19.6}
        let s = lone(0.0);
        let far = Polyline::segment(Point::new(23.4, 3.0), Point::new(24.4, 3.0));
        assert!((edge_cost(&far, &s) - 1.0).abs() < 1e-6);
    }

    #[test]
    fn zero_length_curve_gets_epsilon() {
        let s = lone(0.0);
        let p = Point::new(1.0, 1.0);
        assert_eq!(edge_cost(&Polyline::segment(p, p), &s), EPSILON_COST);
    }

    #[test]
    fn reversed_curve_costs_the_same() {
        let s = lone(0.7);
        let pl = Polyline::new(vec![
            Point::new(1.0, 1.0),
            Point::new(2.3, 2.1),
            Point::new(3.6, 2.55),
            Point::new(4.9, 4.0),
        ]);
        assert_eq!(edge_cost(&pl, &s), edge_cost(&pl.reversed(), &s));
    }
}
