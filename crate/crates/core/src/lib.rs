//! Band-limited continuous shearlet transform and microlocal regularity estimation
//! for two-dimensional test distributions.

pub mod bessel;
pub mod cst;
pub mod error;
pub mod fft;
pub mod fit;
pub mod grid;
pub mod microlocal;
pub mod oracle;
pub mod par;
pub mod quadrature;
pub mod report;
pub mod shearlet;
pub mod signals;
pub mod wavefront;

pub use error::{Error, Result};
pub use grid::FreqGrid;
pub use par::ExecPolicy;
pub use shearlet::{Orientation, ShearletSystem, Variant};
pub use signals::{AnalyticSignal, Point};
