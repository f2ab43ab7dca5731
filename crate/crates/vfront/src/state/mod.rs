//! Machine state: fronts, the global write history, operation buffers and
//! the state tuple threading them together.

mod buffer;
mod front;
mod history;
mod machine;

pub use buffer::{BufEntry, Buffer, Trail};
pub use front::Front;
pub use history::{HistEntry, History};
pub use machine::{walk_entries, ArrTriple, AspectConfig, JoinPolicy, MachineState};
