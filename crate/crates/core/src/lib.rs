//! Monotonicity-testing laboratory for Boolean functions.
//!
//! The crate is organised around the objects a monotonicity tester touches:
//!
//! - [`func`]: points of `{0,1}^n`, bit-packed truth tables, linear threshold
//!   functions and the middle-layer band used by the path testers.
//! - [`oracle`]: exact distance to monotonicity through maximum matchings of
//!   violated pairs, plus the violated-edge parameters `v` and `sigma`.
//! - [`pairs`]: the path-based distributions over comparable pairs and the
//!   density/score machinery.
//! - [`testers`]: edge tester, weighted path tester, a layer-uniform baseline
//!   and the combined tester, with exact and Monte Carlo rejection rates.
//! - [`lower_bound`]: the yes/no LTF ensembles, response vectors and
//!   total-variation measurements.
//! - [`hypergrid`]: reductions from `{0,1}^n` to `[m]^n`.
//! - [`harness`]: seeded parallel experiment runner behind the `monolab` CLI.
//!
//! Runnable walkthroughs live in the crate's `examples/` directory.

pub mod error;
pub mod func;
pub mod harness;
pub mod hypergrid;
pub mod lower_bound;
pub mod matching;
pub mod oracle;
pub mod pairs;
pub mod stats;
pub mod testers;

pub use error::{LabError, Result};
pub use func::{BitTableFunction, CubeOracle, LtfSpec, MidLayerSpec, Point};
