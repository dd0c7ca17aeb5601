pub mod circle;
pub mod diagnostics;
pub mod engine;
pub mod error;
pub mod field;
pub mod hash;
pub mod lattice;
pub mod limits;
pub mod scalar;
pub mod site;
pub mod sum;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/rotations.md")]
    mod rotations {}
    #[doc = include_str!("../../../book/src/fields.md")]
    mod fields {}
    #[doc = include_str!("../../../book/src/averages.md")]
    mod averages {}
    #[doc = include_str!("../../../book/src/limits.md")]
    mod limits {}
    #[doc = include_str!("../../../book/src/diagnostics.md")]
    mod diagnostics {}
}
