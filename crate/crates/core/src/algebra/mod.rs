//! Exact sparse arithmetic for truncated multivariate power series over
//! rationals, with grading by the formal loop parameter. Substrate for all
//! jets and interactions.
//!
//! All values are immutable after construction and every operation is a pure
//! function, so everything here is safe to share across threads.

mod hbar;
mod multi_index;
mod ratio;
mod series;

pub use hbar::HbarSeries;
pub use multi_index::MultiIndex;
pub use ratio::Ratio;
pub use series::{norm_squared, TruncSeries};
