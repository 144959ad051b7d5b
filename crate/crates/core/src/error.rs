// Copyright 2026 Dephase Contributors
// SPDX-License-Identifier: MIT

//! Error taxonomy shared by every module.
//!
//! The variants map onto the failure classes surfaced at the API boundary:
//! invalid inputs ([`Error::Validation`]), size limits ([`Error::Capacity`]),
//! shape mismatches ([`Error::Dimension`]), operations called on the wrong
//! enum variant ([`Error::UnsupportedVariant`]), and quadrature failures
//! ([`Error::Integration`]).

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Crate-wide error type.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    /// Input fails a mathematical or structural invariant
    /// (non-Hermitian density matrix, invalid covariance matrix, …).
    #[error("validation error: {0}")]
    Validation(String),

    /// A size cap would be exceeded (qubit counts, Fock dimensions, …).
    #[error("capacity error: {0}")]
    Capacity(String),

    /// Operands have inconsistent shapes.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// Operation requires a different enum variant
    /// (e.g. a thermal-only formula called with a general Gaussian bath).
    #[error("unsupported variant: {0}")]
    UnsupportedVariant(String),

    /// Numerical integration failed to converge within its budget.
    #[error("integration error: {0}")]
    Integration(String),
}

impl Error {
    /// Shorthand constructors keep call sites compact.
    pub fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }
    pub fn capacity(msg: impl Into<String>) -> Self {
        Error::Capacity(msg.into())
    }
    pub fn dimension(msg: impl Into<String>) -> Self {
        Error::Dimension(msg.into())
    }
    pub fn unsupported(msg: impl Into<String>) -> Self {
        Error::UnsupportedVariant(msg.into())
    }
    pub fn integration(msg: impl Into<String>) -> Self {
        Error::Integration(msg.into())
    }
}
