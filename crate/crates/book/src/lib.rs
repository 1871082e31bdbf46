//! The guide under `book/src`, one module per chapter, so that
//! `cargo test --doc` compiles and runs every snippet in it.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/subspaces.md")]
pub mod subspaces {}
#[doc = include_str!("../../../book/src/channels.md")]
pub mod channels {}
#[doc = include_str!("../../../book/src/reachability.md")]
pub mod reachability {}
#[doc = include_str!("../../../book/src/divergence.md")]
pub mod divergence {}
#[doc = include_str!("../../../book/src/termination.md")]
pub mod termination {}
#[doc = include_str!("../../../book/src/walk.md")]
pub mod walk {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
