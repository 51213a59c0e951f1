//! Expression syntax, problem files, JSON reports and the task driver.

mod driver;
pub mod parse;
pub mod problem;
pub mod report;

pub use driver::{run, run_source, Outcome, Overrides};
pub use parse::{parse_expression, parse_expression_with_warnings, ParseError};
pub use problem::{FieldSpec, Loaded, ProblemSpec, Task, TaskArgs};
