//! Time-dependent route planning with per-window contraction hierarchies.
//!
//! The core types are generic over the [`Time`] scalar. The crate root exports
//! aliases for the two shipped instantiations: integer deciseconds (the
//! instance format's unit) and `f64` seconds.

pub mod ch;
pub mod engine;
pub mod error;
pub mod eval;
pub mod network;
pub mod scalar;
pub mod tdsearch;
pub mod ttf;

mod scratch;

pub use ch::{AltConfig, ChIndex, ScalarGraph};
pub use engine::{error_bound, exact_profile, Profile, TdsIndex, TdsOptions, WindowSet};
pub use error::{Error, Result};
pub use network::{EdgeId, NodeId, TdGraph};
pub use scalar::Time;
pub use tdsearch::{eval_path, td_dijkstra, td_dijkstra_restricted, EaQuery, EaResult, EdgeMark};
pub use ttf::{SlopeBounds, TimeWindow, TravelTimeFunction};

/// Integer deciseconds, the unit of the instance format.
pub type Decis = i64;

pub type Ttf = TravelTimeFunction<Decis>;
pub type TtfF64 = TravelTimeFunction<f64>;
pub type Graph = TdGraph<Decis>;
pub type GraphF64 = TdGraph<f64>;
pub type Ch = ChIndex<Decis>;
pub type Index = TdsIndex<Decis>;
pub type IndexF64 = TdsIndex<f64>;
pub type DecisProfile = Profile<Decis>;
