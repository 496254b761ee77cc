mod code;
mod formal;
mod inv;
mod oracle;

pub use code::*;
pub use formal::*;
pub use inv::*;
pub use oracle::*;
