//! Instance generators, human-model scenarios, the office robot fixture and
//! a timed benchmark runner.

mod error;
pub mod gen;
pub mod robot;
pub mod suite;

pub use error::{BenchError, Result};
pub use gen::{assign_random_weights, backbone_query, gen_entailing_instance, gen_random_cnf, make_human_scenario};
pub use robot::{build_office_robot, OfficeRobot, RobotWeights};
pub use suite::{run_instances, run_suite, Algorithm, BenchConfig, BenchRecord, Instance, Source, Status, Summary};
