//! Doc-test shim for the book.
//!
//! mdbook renders the chapters but cannot run their code blocks against
//! this workspace's crates. Including each chapter as a doc comment makes
//! `cargo test --doc -p zermelo-guide` compile and execute every Rust
//! fence in the book, so the guide and the library cannot drift apart.
//! One module per chapter keeps failures attributable.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/wind-fields.md")]
pub mod wind_fields {}

#[doc = include_str!("../../../book/src/time-as-a-norm.md")]
pub mod time_as_a_norm {}

#[doc = include_str!("../../../book/src/geodesic-spray.md")]
pub mod geodesic_spray {}

#[doc = include_str!("../../../book/src/affine-drifts.md")]
pub mod affine_drifts {}

#[doc = include_str!("../../../book/src/integrating-paths.md")]
pub mod integrating_paths {}

#[doc = include_str!("../../../book/src/planning.md")]
pub mod planning {}

#[doc = include_str!("../../../book/src/control-oracle.md")]
pub mod control_oracle {}

#[doc = include_str!("../../../book/src/command-line.md")]
pub mod command_line {}
