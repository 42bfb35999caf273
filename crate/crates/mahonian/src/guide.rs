//! The user guide. The same chapters are rendered by mdbook from `book/`;
//! including them here makes every code block in the book run under
//! `cargo test --doc`, which keeps the guide and the library in sync.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/statistics.md")]
pub mod statistics {}

#[doc = include_str!("../../../book/src/labelings.md")]
pub mod labelings {}

#[doc = include_str!("../../../book/src/insertion-maps.md")]
pub mod insertion_maps {}

#[doc = include_str!("../../../book/src/equidistribution.md")]
pub mod equidistribution {}

#[doc = include_str!("../../../book/src/verification.md")]
pub mod verification {}

#[doc = include_str!("../../../book/src/output-formats.md")]
pub mod output_formats {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}

// The README's example block runs as a doc-test through the same mechanism.
#[doc = include_str!("../../../README.md")]
mod readme {}
