//! Densely defined examples: the factorial and gamma-sequence upper-triangular
//! operators, multiplication by Smirnov ratios, and the three-condition probe.

pub mod domain;
pub mod factorial;
pub mod families;
pub mod rules;
pub mod smirnov;

pub use domain::{
    domain_membership, gamma_domain_membership, Decision, DivergenceWitness, DomainParams, DomainVerdict,
    GammaForm, GammaSequence,
};
pub use factorial::{c_m, c_m_table, factorial_apply, split_d_m, CmRow, FactorialImage, SplitTerm};
pub use families::{
    sarason_conditions_probe, DomainSample, FamilyRegistry, Membership, OperatorFamily, SarasonReport,
};
pub use rules::{coshift_rule, shift_rule, CoeffRule, RuleRegistry, SharedRule};
pub use smirnov::{canonical_partner, smirnov_domain_test, SmirnovDomainReport};
