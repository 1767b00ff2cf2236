//! Socially-aware path planning over homotopy classes.
//!
//! A scenario (pedestrians with poses in a rectangular workspace) is turned
//! into a navigation graph along the generalized Voronoi diagram of the
//! occupancy grid. Every edge carries a social cost: the line integral of an
//! anisotropic exponential repulsion field plus the edge length. On that graph
//! [`planner::rhcf`] collects `K` distinct start-to-goal paths with repeated
//! inverse-cost-biased random walks, and [`yen::yen_k_shortest`] provides the
//! exact `K` cheapest loopless paths for comparison.
//!
//! ```
//! use rhcf::{build_navgraph, generate_scenario, rhcf, select_best, Family, RandomSource};
//!
//! let scenario = generate_scenario(Family::CrowdA, 6, 1).unwrap();
//! let graph = build_navgraph(&scenario).unwrap();
//! let paths = rhcf(&graph, 5, &mut RandomSource::new(7), 5000).unwrap();
//! let best = select_best(&paths).unwrap();
//! assert_eq!(best.first(), graph.start);
//! ```

pub mod bench;
pub mod geometry;
pub mod graph;
pub mod homotopy;
pub mod metrics;
pub mod path;
pub mod planner;

pub mod scenario;
pub mod social;
pub mod svg;
pub mod voronoi;
pub mod yen;

pub use geometry::{Point, Polyline};
pub use graph::{build_navgraph, build_navgraph_parts, GraphBuild, GraphError, NavGraph};
pub use path::{GraphPath, PathSet};
pub use planner::{random_walk, revalidate, rhcf, select_best, PlanError, RandomSource};
pub use scenario::{generate_scenario, load_scenario, save_scenario, Family, Scenario, ScenarioError};
pub use yen::{dijkstra, yen_k_shortest};
