//! Realizing finite distributive lattices as lattices of stable matchings.
//!
//! * [`order`] — posets, lattices, lower sets and order/set isomorphism checks.
//! * [`constraints`] — join constraints over a poset and their complements.
//! * [`market`] — matching markets with data-driven choice functions,
//!   stability, deferred acceptance and stable-matching enumeration.
//! * [`realize`] — one-to-one markets with prescribed rotations and the map
//!   from stable matchings to rotation sets.
//! * [`augment`] — market extensions that add join constraints, and the full
//!   lattice-to-market synthesis pipeline.
//! * [`antimatroid`] — path posets, antimatroid join constraints and the
//!   reduction of minimum-cost feasible sets to minimum-cost stable matchings.
//! * [`io`] — versioned JSON documents for every artifact.
//! * [`fixtures`], [`generate`] — worked instances and seeded random instances.
//! * [`selftest`] — the fixture acceptance suite behind `selftest`.

pub mod error;
pub mod order;
pub mod constraints;
pub mod market;
pub mod realize;
pub mod augment;
pub mod antimatroid;
pub mod io;
pub mod fixtures;
pub mod generate;
pub mod selftest;
pub use error::{Error, ErrorClass, Result};
