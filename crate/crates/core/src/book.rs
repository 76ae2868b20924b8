// Every chapter of the guide is pulled in as a doc comment so that
// `cargo test --doc` compiles and runs its listings. One module per chapter
// keeps failures attributable. The command-line chapter is tested from the
// `pyp-cli` crate, whose API it uses.

#[doc = include_str!("../../../book/src/introduction.md")]
mod introduction {}
#[doc = include_str!("../../../book/src/threshold.md")]
mod threshold {}
#[doc = include_str!("../../../book/src/furthest_first.md")]
mod furthest_first {}
#[doc = include_str!("../../../book/src/agglomeration.md")]
mod agglomeration {}
#[doc = include_str!("../../../book/src/objective.md")]
mod objective {}
#[doc = include_str!("../../../book/src/parameters.md")]
mod parameters {}
#[doc = include_str!("../../../book/src/spectral.md")]
mod spectral {}
#[doc = include_str!("../../../book/src/urn.md")]
mod urn {}
#[doc = include_str!("../../../book/src/metrics.md")]
mod metrics {}
#[doc = include_str!("../../../book/src/synthetic.md")]
mod synthetic {}
