//! The host side of the boundary: conversions, handles and query cursors.

mod convert;
mod error;
mod handle;
mod registry;
mod value;

pub use convert::{from_term, to_term, ConversionPolicy, ConvertError};
pub use error::{BoundaryError, ErrorKind};
pub use handle::{engine_new, Answer, CursorState, EngineHandle, PreparedGoal, SolutionCursor};
pub use registry::{HandleRegistry, HostHandle};
pub use value::{HostValue, OpaqueTerm};
