//! Barrier certificates and their file format.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cpoly::{CPolynomial, CpolyError, TermRecord};
use crate::qsystem::PhaseId;
use crate::C64;

#[derive(Debug, Error)]
pub enum CertificateError {
    #[error("unsupported certificate schema version {0}")]
    SchemaVersion(u32),
    #[error("duplicate phase {0:?} in certificate file")]
    DuplicatePhase(PhaseId),
    #[error(transparent)]
    Poly(#[from] CpolyError),
    #[error("serialization: {0}")]
    Serde(#[from] serde_json::Error),
}

/// Constants the certificate was synthesized against.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Constants {
    pub k: u32,
    pub epsilon: f64,
    pub gamma: f64,
    pub d: f64,
}

/// Record of how a certificate was produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct Provenance {
    pub barrier_degree: u32,
    pub backend: String,
    pub solver_status: String,
    /// One entry per instantiated constraint, for audit.
    pub constraint_inventory: Vec<String>,
    pub warnings: Vec<String>,
    /// Maximum coefficient residual of the HSOS identities under the
    /// returned assignment.
    pub max_residual: Option<f64>,
    pub timestamp: Option<String>,
}

/// A finite collection of phase-indexed conjugate-flattening barrier
/// polynomials plus the constants they certify safety with.
#[derive(Debug, Clone, PartialEq)]
pub struct BarrierCertificate {
    pub phase_barriers: BTreeMap<PhaseId, CPolynomial>,
    pub constants: Constants,
    pub provenance: Provenance,
}

impl BarrierCertificate {
    pub fn dimension(&self) -> usize {
        self.phase_barriers
            .values()
            .next()
            .map(|p| p.dimension())
            .unwrap_or(0)
    }

    /// Drops tiny coefficients, rounds the rest, and re-imposes
    /// conjugate-flattening symmetry by averaging paired coefficients.
    /// Phase structure never changes.
    pub fn cleanup(&self, drop_tol: f64, round_digits: i32) -> Self {
        let scale = 10f64.powi(round_digits);
        let mut out = self.clone();
        for poly in out.phase_barriers.values_mut() {
            let mut cleaned = CPolynomial::zero(poly.dimension());
            for (key, c) in poly.terms() {
                if c.norm() < drop_tol {
                    continue;
                }
                let rounded = C64::new(
                    (c.re * scale).round() / scale,
                    (c.im * scale).round() / scale,
                );
                cleaned.add_term(key.clone(), rounded);
            }
            *poly = cleaned.symmetrize();
        }
        out
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct PhaseBarrierRecord {
    phase: PhaseId,
    terms: Vec<TermRecord>,
}

/// On-disk representation (JSON). Round-trips losslessly.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CertificateFile {
    pub schema_version: u32,
    /// Number of complex state variables the barriers range over.
    pub dimension: usize,
    pub constants: Constants,
    pub provenance: Provenance,
    barriers: Vec<PhaseBarrierRecord>,
}

impl CertificateFile {
    pub fn from_certificate(cert: &BarrierCertificate) -> Self {
        Self {
            schema_version: 1,
            dimension: cert.dimension(),
            constants: cert.constants,
            provenance: cert.provenance.clone(),
            barriers: cert
                .phase_barriers
                .iter()
                .map(|(phase, poly)| PhaseBarrierRecord {
                    phase: *phase,
                    terms: poly.to_term_records(),
                })
                .collect(),
        }
    }

    pub fn into_certificate(self) -> Result<BarrierCertificate, CertificateError> {
        if self.schema_version != 1 {
            return Err(CertificateError::SchemaVersion(self.schema_version));
        }
        let mut phase_barriers = BTreeMap::new();
        for record in self.barriers {
            let poly = CPolynomial::from_term_records(self.dimension, &record.terms)?;
            if phase_barriers.insert(record.phase, poly).is_some() {
                return Err(CertificateError::DuplicatePhase(record.phase));
            }
        }
        Ok(BarrierCertificate {
            phase_barriers,
            constants: self.constants,
            provenance: self.provenance,
        })
    }

    pub fn to_json(&self) -> Result<String, CertificateError> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self, CertificateError> {
        Ok(serde_json::from_str(text)?)
    }
}
