pub mod cache;
pub mod error;
pub mod field;
pub mod genus;
pub mod laurent;
pub mod local;
pub mod params;
pub mod report;
pub mod tower;

pub use error::{Error, Result};
pub use field::{Field, Fq};
pub use laurent::{LaurentPoly, TruncatedSeries};
pub use params::Params;
