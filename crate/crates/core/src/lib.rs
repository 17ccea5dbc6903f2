//! Abstract sensors modelled as covers of a finite set of world features.
//!
//! * [`cover`]: universes, pre-images, covers and sensor maps.
//! * [`order`]: the subsumption order, meet, partial join, upper covers and
//!   u-inflation.
//! * [`star`]: star-closure, star-equivalence classes, star-subsumption, the
//!   combined `proceeds` order and the partition slice.
//! * [`planner`]: worst-case belief-space planning that tells which covers
//!   suffice for a task.
//! * [`stipulation`]: privacy stipulations and class compliance reports.
//! * [`enumerate`]: exhaustive enumeration and Hasse diagrams.
//! * [`io`] and [`cli`]: JSON documents, DOT export and the command line.
//!
//! ```
//! use cover_lattice::{order, star, Cover, FeatureUniverse};
//!
//! let u = FeatureUniverse::numbered(2).unwrap();
//! let coarse = Cover::new(&u, [vec!["1", "2"]]).unwrap();
//! let noisy = Cover::new(&u, [vec!["1", "2"], vec!["1"]]).unwrap();
//! assert!(order::subsumes(&coarse, &noisy).unwrap());
//! assert!(star::star_equivalent(&coarse, &noisy).unwrap());
//! ```

pub mod cli;
pub mod cover;
pub mod enumerate;
pub mod error;
pub mod io;
pub mod order;
pub mod planner;
pub mod star;
pub mod stipulation;

pub use cover::{Cover, FeatureSet, FeatureUniverse, Preimage, RelationTag, SensorMap};
pub use enumerate::{Diagram, Order};
pub use error::{Error, Result};
pub use planner::{Belief, PlanningProblem, Policy};
pub use star::StarClass;
pub use stipulation::Stipulation;
