use std::io;

use dcm_core::ledger::LedgerError;
use dcm_core::registry::RegistryError;
use dcm_core::ErrorClass;
use thiserror::Error;

use crate::market_io::MarketDataError;

#[derive(Debug, Error)]
pub enum DcmError {
    #[error("{0}")]
    Validation(String),
    #[error(transparent)]
    Registry(#[from] RegistryError),
    #[error(transparent)]
    Ledger(#[from] LedgerError),
    #[error(transparent)]
    Market(#[from] MarketDataError),
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("step {index}: {source}")]
    Step { index: usize, source: Box<DcmError> },
}

impl DcmError {
    pub fn invalid(msg: impl std::fmt::Display) -> Self {
        DcmError::Validation(msg.to_string())
    }

    pub fn io(path: impl AsRef<std::path::Path>, source: io::Error) -> Self {
        DcmError::Io { path: path.as_ref().display().to_string(), source }
    }

    pub fn class(&self) -> ErrorClass {
        match self {
            DcmError::Registry(e) => e.class(),
            DcmError::Ledger(_) => ErrorClass::Integrity,
            DcmError::Step { source, .. } => source.class(),
            _ => ErrorClass::Validation,
        }
    }

    /// 2 validation, 3 settlement or lifecycle, 4 ledger integrity.
    pub fn exit_code(&self) -> i32 {
        match self.class() {
            ErrorClass::Validation => 2,
            ErrorClass::Settlement => 3,
            ErrorClass::Integrity => 4,
        }
    }
}
