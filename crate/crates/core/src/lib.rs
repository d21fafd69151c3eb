pub mod algcore;
pub mod branches;
pub mod densekit;
pub mod error;
pub mod exactfield;
pub mod parcount;
pub mod singlab;

pub use error::{CmError, Result};
