//! Data-side toolkit for low-resource machine translation.
//!
//! Transform text in a high-resource language so it resembles a related
//! low-resource one ([`translit`], [`syntree`], [`codeswitch`]), compare
//! words by pronunciation ([`phonvec`]), build back-translated and
//! multi-source training sets ([`pipeline`]) and score the results
//! ([`metrics`]).
//!
//! ```
//! use lrtk::data;
//!
//! let rules = data::fra_hat_rules();
//! assert_eq!(rules.apply("unité"), "inite");
//! ```

pub mod codeswitch;
pub mod corpus;
pub mod data;
pub mod metrics;
pub mod phonvec;
pub mod pipeline;
pub mod rng;
pub mod syntree;
pub mod translit;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/corpus.md")]
    mod corpus {}
    #[doc = include_str!("../../../book/src/rewrite-rules.md")]
    mod rewrite_rules {}
    #[doc = include_str!("../../../book/src/syntax-trees.md")]
    mod syntax_trees {}
    #[doc = include_str!("../../../book/src/phonology.md")]
    mod phonology {}
    #[doc = include_str!("../../../book/src/code-switching.md")]
    mod code_switching {}
    #[doc = include_str!("../../../book/src/pipeline.md")]
    mod pipeline {}
    #[doc = include_str!("../../../book/src/metrics.md")]
    mod metrics {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
