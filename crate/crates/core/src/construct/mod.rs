//! The two oscillatory data families driving the inflation experiments,
//! their time scales and index sets, and exact frequency-support
//! certificates for the product geometry they rely on.

mod bump;
mod certificate;
mod families;


pub use bump::{bump, bump_kernel_at_zero, sampled_bump};
pub use certificate::{certify_all, support_certificate, CertificateReport, SupportFact, Violation};
pub use families::{
    build_f_high, build_f_low, case_admits_q, index_set, inflation_time, Atom, Construction,
    ConstructionKind, HighQParams, InflationCase, LowQParams,
};
