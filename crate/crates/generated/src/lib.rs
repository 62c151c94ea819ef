//! Objects generated from the specs in `samples/`, checked in so they build
//! without running the generator. Refresh them with
//!
//! ```text
//! tsop generate samples/future.tsop -o crates/generated/src/objects
//! ```
//!
//! The tests compare these files byte for byte against fresh output.

#[path = "objects/Bag.rs"]
pub mod bag;
#[path = "objects/Cell.rs"]
pub mod cell;
#[path = "objects/Future.rs"]
pub mod future;
#[path = "objects/Lock.rs"]
pub mod lock;
#[path = "objects/Pool.rs"]
pub mod pool;

pub mod drive;
