//! Admissibility of `(n, d)` pairs.
//!
//! For even `n` a Hermitian solution forces `√(d² + n − 1) = n/(2k)` for
//! some integer `k ≥ 1` ([`even_order_candidates`]); integer `d` is then
//! cut down further by divisibility rules ([`integer_d_filter`]). Also
//! here: the always-available construction with `d = n/2 − 1` and the
//! classification of generators whose off-diagonal entries are 4th roots
//! of unity.

mod construct;
mod filters;
mod quaternary;

pub use construct::trivial_construction;
pub use filters::{
    admissible_even_orders, classify_even_pair, even_order_candidates, even_order_report,
    factorize, integer_d_filter, is_prime, open_even_pairs, CandidateStatus, EvenCandidate,
    EvenOrderEntry, FilterVerdict, RuleViolation,
};
pub use quaternary::{
    quaternary_forms, quaternary_oracle, Gaussian, QuaternaryForm, QuaternaryHit, ORACLE_MAX_N,
};
