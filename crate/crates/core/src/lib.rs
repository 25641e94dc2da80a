//! Certified lower bounds on the covering degree and covering gonality of
//! general complete intersections, with checkable certificates.

pub mod arith;
pub mod covdeg;
pub mod exact;
pub mod paulsen;
pub mod serde_big;
pub mod separation;
pub mod snc_balance;
