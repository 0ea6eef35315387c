//! Gerbes and central extensions over finite topological spaces: Čech
//! obstruction classes for lifting isomorphisms and objects, the
//! constructive lifting algorithms, and pronilpotent successive
//! approximation.

#![allow(clippy::needless_range_loop, clippy::type_complexity)]

pub mod cech;
pub mod error;
pub mod gerbe;
pub mod group;
pub mod groupoid;
pub mod obstruction;
pub mod pronilpotent;
pub mod sheaf;
pub mod snf;
pub mod space;
pub mod torsor;

pub use error::{Error, Result};
