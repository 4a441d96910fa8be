//! Boolean functions on the hypercube: points, truth tables, linear threshold
//! functions, the middle-layer band and Fourier quantities.
//!
//! Truth tables live on `{0,1}^n` with values in `{0,1}`; LTFs live on
//! `{-1,1}^n` with values in `{-1,1}`. The bridge maps bit `b` to `2b - 1`
//! coordinate-wise and on values, so an LTF's table has `f(x) = 1` exactly
//! where the LTF outputs `+1`.

mod file;
mod fourier;
mod ltf;
mod midlayer;
mod point;
mod table;

pub use file::FunctionFile;
pub use fourier::{
    estimate_deg1, fourier_deg1, fourier_deg1_sq_estimate, influence, parseval_holds,
    walsh_hadamard, Deg1Estimates, Estimate, WHT_MAX_N,
};
pub use ltf::LtfSpec;
pub use midlayer::{band_width, MidLayerSpec};
pub use point::{pm, random_layer_point, random_submask, Point, SubmasksOfSize, POINT_MAX_N};
pub use table::{BitTableFunction, CubeOracle, FnOracle, WideOracle, EXACT_MAX_N};

pub(crate) use point::full_mask;
