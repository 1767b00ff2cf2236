//! Scenario data model, its JSON document format, and the layout generators
//! for the four experiment families.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{normalize_angle, Point};

pub const DEFAULT_PEDESTRIAN_RADIUS: f64 = 0.2;
pub const DEFAULT_RESOLUTION: f64 = 0.1;
pub const MIN_GRID_CELLS: usize = 8;
pub const MAX_GRID_CELLS: usize = 4096;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("malformed scenario document: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid field `{field}`: {reason}")]
    Invalid { field: String, reason: String },
    #[error("could not place {family} pedestrians: {reason}")]
    Placement { family: Family, reason: String },
}

fn invalid(field: impl Into<String>, reason: impl Into<String>) -> ScenarioError {
    ScenarioError::Invalid {
        field: field.into(),
        reason: reason.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Pose2D {
    pub x: f64,
    pub y: f64,
    pub theta: f64,
}

impl Pose2D {
    pub fn new(x: f64, y: f64, theta: f64) -> Self {
        Self {
            x,
            y,
            theta: normalize_angle(theta),
        }
    }

    pub fn position(&self) -> Point {
        Point::new(self.x, self.y)
    }

    /// Unit heading vector.
    pub fn heading(&self) -> Point {
        Point::new(self.theta.cos(), self.theta.sin())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pedestrian {
    pub pose: Pose2D,
    pub radius: f64,
}

impl Pedestrian {
    pub fn new(x: f64, y: f64, theta: f64, radius: f64) -> Self {
        Self {
            pose: Pose2D::new(x, y, theta),
            radius,
        }
    }

    pub fn center(&self) -> Point {
        self.pose.position()
    }
}

/// Parameters of the anisotropic social force.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SocialParams {
    #[serde(rename = "a")]
    pub magnitude_a: f64,
    #[serde(rename = "b")]
    pub range_b: f64,
    pub lambda: f64,
    pub robot_radius: f64,
    /// When set, the anisotropy factor peaks in front of the pedestrian.
    /// When clear, the literal `cos φ = -d̂·ê` convention is used.
    pub front_weighted: bool,
}

impl Default for SocialParams {
    fn default() -> Self {
        Self {
            magnitude_a: 2.0,
            range_b: 1.0,
            lambda: 0.1,
            robot_radius: 0.2,
            front_weighted: true,
        }
    }
}

/// Axis-aligned workspace rectangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounds {
    pub xmin: f64,
    pub ymin: f64,
    pub xmax: f64,
    pub ymax: f64,
}

impl Bounds {
    pub fn new(xmin: f64, ymin: f64, xmax: f64, ymax: f64) -> Self {
        Self {
            xmin,
            ymin,
            xmax,
            ymax,
        }
    }

    pub fn width(&self) -> f64 {
        self.xmax - self.xmin
    }

    pub fn height(&self) -> f64 {
        self.ymax - self.ymin
    }

    pub fn center(&self) -> Point {
        Point::new(
            0.5 * (self.xmin + self.xmax),
            0.5 * (self.ymin + self.ymax),
        )
    }

    pub fn contains(&self, p: Point) -> bool {
        p.x >= self.xmin && p.x <= self.xmax && p.y >= self.ymin && p.y <= self.ymax
    }

    /// True when a disc of radius `r` around `p` lies inside the rectangle.
    pub fn contains_disc(&self, p: Point, r: f64) -> bool {
        p.x - r >= self.xmin && p.x + r <= self.xmax && p.y - r >= self.ymin && p.y + r <= self.ymax
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub bounds: Bounds,
    pub resolution: f64,
    pub robot: Pose2D,
    pub goal: Pose2D,
    pub pedestrians: Vec<Pedestrian>,
    pub social: SocialParams,
}

impl Scenario {
    /// Grid dimensions `(width, height)` in cells.
    pub fn grid_dims(&self) -> (usize, usize) {
        (
            (self.bounds.width() / self.resolution).round() as usize,
            (self.bounds.height() / self.resolution).round() as usize,
        )
    }

    /// Contact distance between a pedestrian and the robot.
    pub fn contact_radius(&self, ped: &Pedestrian) -> f64 {
        ped.radius + self.social.robot_radius
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        let b = &self.bounds;
        if ![b.xmin, b.ymin, b.xmax, b.ymax].iter().all(|v| v.is_finite()) {
            return Err(invalid("bounds", "non-finite coordinate"));
        }
        if b.xmax <= b.xmin || b.ymax <= b.ymin {
            return Err(invalid("bounds", "max must exceed min on both axes"));
        }
        if !(self.resolution.is_finite() && self.resolution > 0.0) {
            return Err(invalid("resolution", "must be finite and positive"));
        }
        let (w, h) = self.grid_dims();
        if w.min(h) < MIN_GRID_CELLS || w.max(h) > MAX_GRID_CELLS {
            return Err(invalid(
                "resolution",
                format!("grid of {w}x{h} cells outside {MIN_GRID_CELLS}..={MAX_GRID_CELLS}"),
            ));
        }

        let s = &self.social;
        let params_ok = [s.magnitude_a, s.range_b, s.lambda, s.robot_radius]
            .iter()
            .all(|v| v.is_finite());
        if !params_ok {
            return Err(invalid("social", "non-finite parameter"));
        }
        if s.magnitude_a <= 0.0 {
            return Err(invalid("social.a", "must be positive"));
        }
        if s.range_b <= 0.0 {
            return Err(invalid("social.b", "must be positive"));
        }
        if !(0.0..=1.0).contains(&s.lambda) {
            return Err(invalid("social.lambda", "must lie in [0, 1]"));
        }
        if s.robot_radius < 0.0 {
            return Err(invalid("social.robot_radius", "must be non-negative"));
        }

        for (i, p) in self.pedestrians.iter().enumerate() {
            let field = format!("pedestrians[{i}]");
            check_pose(&p.pose, &field)?;
            if !(p.radius.is_finite() && p.radius > 0.0) {
                return Err(invalid(format!("{field}.radius"), "must be positive"));
            }
            if !b.contains_disc(p.center(), p.radius) {
                return Err(invalid(field, "disc extends outside bounds"));
            }
        }

        for (name, pose) in [("robot", &self.robot), ("goal", &self.goal)] {
            check_pose(pose, name)?;
            if !b.contains(pose.position()) {
                return Err(invalid(name, "outside bounds"));
            }
            for (i, p) in self.pedestrians.iter().enumerate() {
                if pose.position().dist(p.center()) < self.contact_radius(p) {
                    return Err(invalid(
                        name,
                        format!("inside inflated disc of pedestrians[{i}]"),
                    ));
                }
            }
        }
        Ok(())
    }
}

fn check_pose(pose: &Pose2D, field: &str) -> Result<(), ScenarioError> {
    if !(pose.x.is_finite() && pose.y.is_finite() && pose.theta.is_finite()) {
        return Err(invalid(field, "non-finite pose"));
    }
    if pose.theta <= -PI || pose.theta > PI {
        return Err(invalid(format!("{field}.theta"), "must lie in (-pi, pi]"));
    }
    Ok(())
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PedestrianDoc {
    x: f64,
    y: f64,
    theta: f64,
    radius: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioDoc {
    bounds: [f64; 4],
    resolution: f64,
    robot: Pose2D,
    goal: Pose2D,
    pedestrians: Vec<PedestrianDoc>,
    social: SocialParams,
}

impl From<&Scenario> for ScenarioDoc {
    fn from(s: &Scenario) -> Self {
        let b = s.bounds;
        ScenarioDoc {
            bounds: [b.xmin, b.ymin, b.xmax, b.ymax],
            resolution: s.resolution,
            robot: s.robot,
            goal: s.goal,
            pedestrians: s
                .pedestrians
                .iter()
                .map(|p| PedestrianDoc {
                    x: p.pose.x,
                    y: p.pose.y,
                    theta: p.pose.theta,
                    radius: p.radius,
                })
                .collect(),
            social: s.social,
        }
    }
}

/// Parses and validates a scenario document.
pub fn load_scenario(text: &str) -> Result<Scenario, ScenarioError> {
    let doc: ScenarioDoc = serde_json::from_str(text)?;
    let [xmin, ymin, xmax, ymax] = doc.bounds;
    let s = Scenario {
        bounds: Bounds::new(xmin, ymin, xmax, ymax),
        resolution: doc.resolution,
        robot: doc.robot,
        goal: doc.goal,
        pedestrians: doc
            .pedestrians
            .into_iter()
            .map(|p| Pedestrian {
                pose: Pose2D {
                    x: p.x,
                    y: p.y,
                    theta: p.theta,
                },
                radius: p.radius,
            })
            .collect(),
        social: doc.social,
    };
    s.validate()?;
    Ok(s)
}

/// Serializes a scenario. Output is deterministic and re-loads bit-exactly.
pub fn save_scenario(s: &Scenario) -> String {
    let mut out = serde_json::to_string_pretty(&ScenarioDoc::from(s))
        .expect("scenario document always serializes");
    out.push('\n');
    out
}

/// The four layout families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    WallOfPeople,
    CrowdA,
    CrowdB,
    Surrounded,
}

impl Family {
    pub const ALL: [Family; 4] = [
        Family::WallOfPeople,
        Family::CrowdA,
        Family::CrowdB,
        Family::Surrounded,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::WallOfPeople => "wall_of_people",
            Family::CrowdA => "crowd_a",
            Family::CrowdB => "crowd_b",
            Family::Surrounded => "surrounded",
        }
    }

    fn salt(self) -> u64 {
        match self {
            Family::WallOfPeople => 0x5761_6c6c,
            Family::CrowdA => 0x4372_6f41,
            Family::CrowdB => 0x4372_6f42,
            Family::Surrounded => 0x5375_7272,
        }
    }

    /// Workspace used when the caller does not supply one.
    pub fn default_bounds(self, n_peds: usize) -> Bounds {
        let n = n_peds as f64;
        match self {
            Family::WallOfPeople => Bounds::new(0.0, 0.0, 10.0, (0.8 * n + 1.0).max(6.0)),
            Family::CrowdA => {
                let s = (n / 16.0).sqrt().max(1.0);
                Bounds::new(0.0, 0.0, 12.0 * s, 8.0 * s)
            }
            Family::CrowdB => {
                let s = (n / 20.0).sqrt().max(1.0);
                Bounds::new(0.0, 0.0, 14.0 * s, 9.0 * s)
            }
            Family::Surrounded => {
                let r = ring_radius(n_peds);
                Bounds::new(0.0, 0.0, (2.0 * r + 9.0).max(12.0), (2.0 * r + 3.0).max(8.0))
            }
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| {
                format!("unknown family `{s}` (expected wall_of_people, crowd_a, crowd_b or surrounded)")
            })
    }
}

/// Nominal ring radius of the `surrounded` family.
pub fn ring_radius(n_peds: usize) -> f64 {
    (0.7 * n_peds as f64 / TAU).max(1.3)
}

/// Minimum center spacing between generated pedestrians.
const MIN_SEPARATION: f64 = 0.6;
/// Extra clearance kept between generated discs and the robot/goal.
const TERMINAL_MARGIN: f64 = 0.3;
const MAX_PLACEMENT_TRIES: usize = 20_000;

pub fn generate_scenario(family: Family, n_peds: usize, seed: u64) -> Result<Scenario, ScenarioError> {
    generate_scenario_in(family, n_peds, seed, family.default_bounds(n_peds))
}

/// Generates a layout of `family` inside `bounds`. Pure in `(family, n_peds, seed, bounds)`.
pub fn generate_scenario_in(
    family: Family,
    n_peds: usize,
    seed: u64,
    bounds: Bounds,
) -> Result<Scenario, ScenarioError> {
    if n_peds == 0 {
        return Err(invalid("n_peds", "must be at least 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ family.salt());
    let mut gen = Placer {
        family,
        bounds,
        radius: DEFAULT_PEDESTRIAN_RADIUS,
        social: SocialParams::default(),
        peds: Vec::with_capacity(n_peds),
        robot: Point::default(),
        goal: Point::default(),
    };
    let c = bounds.center();
    match family {
        Family::WallOfPeople => {
            gen.robot = Point::new(bounds.xmin + 1.0, c.y);
            gen.goal = Point::new(bounds.xmax - 1.0, c.y);
            gen.place_wall(&mut rng, n_peds)?;
        }
        Family::CrowdA => {
            gen.robot = Point::new(bounds.xmin + 1.0, c.y);
            gen.goal = Point::new(bounds.xmax - 1.0, c.y);
            gen.place_groups(&mut rng, n_peds, 2..=3, 0.7, true)?;
        }
        Family::CrowdB => {
            gen.robot = Point::new(bounds.xmin + 1.0, bounds.ymin + 1.0);
            gen.goal = Point::new(bounds.xmax - 1.0, bounds.ymax - 1.0);
            gen.place_groups(&mut rng, n_peds, 3..=5, 0.9, false)?;
        }
        Family::Surrounded => {
            gen.robot = Point::new(bounds.xmin + 0.35 * bounds.width(), c.y);
            gen.goal = Point::new(bounds.xmax - 1.0, c.y);
            gen.place_ring(&mut rng, n_peds)?;
        }
    }
    let s = Scenario {
        bounds,
        resolution: DEFAULT_RESOLUTION,
        robot: Pose2D::new(gen.robot.x, gen.robot.y, 0.0),
        goal: Pose2D::new(gen.goal.x, gen.goal.y, 0.0),
        pedestrians: gen.peds,
        social: gen.social,
    };
    s.validate()?;
    Ok(s)
}

struct Placer {
    family: Family,
    bounds: Bounds,
    radius: f64,
    social: SocialParams,
    peds: Vec<Pedestrian>,
    robot: Point,
    goal: Point,
}

impl Placer {
    fn fail(&self, reason: impl Into<String>) -> ScenarioError {
        ScenarioError::Placement {
            family: self.family,
            reason: reason.into(),
        }
    }

    fn admissible(&self, p: Point, min_sep: f64) -> bool {
        let clear = self.radius + self.social.robot_radius + TERMINAL_MARGIN;
        self.bounds.contains_disc(p, self.radius + 0.3)
            && p.dist(self.robot) >= clear
            && p.dist(self.goal) >= clear
            && self.peds.iter().all(|q| q.center().dist(p) >= min_sep)
    }

    fn push(&mut self, p: Point, theta: f64) {
        self.peds.push(Pedestrian::new(p.x, p.y, theta, self.radius));
    }

    /// A jittered queue across the workspace, perpendicular to the robot-goal line.
    fn place_wall(&mut self, rng: &mut ChaCha8Rng, n: usize) -> Result<(), ScenarioError> {
        let b = self.bounds;
        let span = b.height() - 1.0;
        let spacing = span / n as f64;
        if spacing < MIN_SEPARATION {
            return Err(self.fail(format!("{n} pedestrians do not fit in a {:.2} m queue", span)));
        }
        let line_x = b.center().x;
        for i in 0..n {
            let mut placed = false;
            for _ in 0..MAX_PLACEMENT_TRIES {
                let y = b.ymin + 0.5 + (i as f64 + 0.5) * spacing
                    + rng.random_range(-0.15..=0.15) * spacing;
                let x = line_x + rng.random_range(-0.3..=0.3);
                let p = Point::new(x, y);
                if self.admissible(p, MIN_SEPARATION) {
                    let theta = 0.5 * PI + rng.random_range(-0.3..=0.3);
                    self.push(p, theta);
                    placed = true;
                    break;
                }
            }
            if !placed {
                return Err(self.fail(format!("queue slot {i} rejected")));
            }
        }
        Ok(())
    }

    /// Sparse groups; members either face their group center or look around at random.
    fn place_groups(
        &mut self,
        rng: &mut ChaCha8Rng,
        n: usize,
        sizes: std::ops::RangeInclusive<usize>,
        group_radius: f64,
        face_center: bool,
    ) -> Result<(), ScenarioError> {
        let b = self.bounds;
        let mut tries = 0;
        while self.peds.len() < n {
            let size = rng.random_range(sizes.clone()).min(n - self.peds.len());
            let center = Point::new(
                rng.random_range(b.xmin + 2.0..=b.xmax - 2.0),
                rng.random_range(b.ymin + 1.0..=b.ymax - 1.0),
            );
            let first_of_group = self.peds.len();
            let mut members = 0;
            let mut member_tries = 0;
            while members < size && member_tries < 200 {
                member_tries += 1;
                tries += 1;
                let ang = rng.random_range(0.0..TAU);
                let rad = group_radius * rng.random_range(0.0f64..=1.0).sqrt();
                let p = Point::new(center.x + rad * ang.cos(), center.y + rad * ang.sin());
                // other groups are kept further away than members of the same group
                let foreign_ok = self.peds[..first_of_group]
                    .iter()
                    .all(|q| q.center().dist(p) >= 1.0);
                if foreign_ok && self.admissible(p, MIN_SEPARATION) {
                    let theta = if face_center && p.dist(center) > 1e-6 {
                        (center.y - p.y).atan2(center.x - p.x) + rng.random_range(-0.2..=0.2)
                    } else {
                        rng.random_range(-PI..PI)
                    };
                    self.push(p, theta);
                    members += 1;
                }
            }
            if members == 0 && tries > MAX_PLACEMENT_TRIES {
                return Err(self.fail(format!(
                    "placed {} of {n} pedestrians before running out of attempts",
                    self.peds.len()
                )));
            }
        }
        Ok(())
    }

    /// A jittered ring centered on the robot; everyone faces the robot.
    fn place_ring(&mut self, rng: &mut ChaCha8Rng, n: usize) -> Result<(), ScenarioError> {
        let r0 = ring_radius(n);
        let step = TAU / n as f64;
        for i in 0..n {
            let mut placed = false;
            for _ in 0..MAX_PLACEMENT_TRIES {
                let ang = i as f64 * step + rng.random_range(-0.15..=0.15) * step;
                let rad = r0 + rng.random_range(-0.15..=0.15);
                let p = Point::new(self.robot.x + rad * ang.cos(), self.robot.y + rad * ang.sin());
                if self.admissible(p, MIN_SEPARATION) {
                    let theta = ang + PI + rng.random_range(-0.2..=0.2);
                    self.push(p, theta);
                    placed = true;
                    break;
                }
            }
            if !placed {
                return Err(self.fail(format!("ring slot {i} rejected")));
            }
        }
        Ok(())
    }
}
