//! Fundamental domains for the orbifold group: the hexagonal ten-edge
//! domain, the parallelogram domain of nonrigid maps, bundled templates for
//! the exceptional multipliers, per-instance validity reports, and rule
//! extraction.

mod hex;
mod par;
pub(crate) mod search;
mod template;

pub use hex::{build_hex_domain, extract_hex_rule, verify_domain, BoundaryEdge, HexDomainData, Piece, PieceKey, PiecePart};
pub use par::{build_parallelogram_domain, extract_par_rule, GridDomainData};
pub use template::{build_from_template, sect4_cells, template_names, Sect4Cells, TemplateDomain};

use crate::fsr::SubdivisionRule;
use crate::hexplane::HexError;
use crate::lattes::LattesError;
use serde::{Deserialize, Serialize};

/// Named boolean checks with diagnostics; the construction is accepted if
/// and only if all are true.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DomainReport {
    pub checks: Vec<Check>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl DomainReport {
    pub fn new() -> DomainReport {
        DomainReport { checks: Vec::new() }
    }

    pub fn push(&mut self, name: &str, pass: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            name: name.to_string(),
            pass,
            detail: detail.into(),
        });
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failing(&self) -> Vec<&str> {
        self.checks
            .iter()
            .filter(|c| !c.pass)
            .map(|c| c.name.as_str())
            .collect()
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl Default for DomainReport {
    fn default() -> Self {
        Self::new()
    }
}

impl std::fmt::Display for DomainReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for c in &self.checks {
            writeln!(f, "{}: {} {}", c.name, if c.pass { "ok" } else { "FAIL" }, c.detail)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FundomError {
    #[error("the multiplier α = a + cτ with (a, c) = ({a}, {c}) needs a bundled template")]
    ExceptionalAlpha { a: i64, c: i64 },
    #[error("per-instance validity checks failed: {}", .0.failing().join(", "))]
    ValidityCheckFailed(DomainReport),
    #[error("window exhausted after repeated doubling")]
    WindowExhausted,
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("unknown template {0:?}")]
    UnknownTemplate(String),
    #[error(transparent)]
    Hex(#[from] HexError),
    #[error(transparent)]
    Lattes(#[from] LattesError),
    #[error("rule extraction failed: {0}")]
    Extraction(String),
}

/// An assembled fundamental domain, ready for rule extraction.
#[derive(Debug, Clone)]
pub enum FundamentalDomain {
    Hex(HexDomainData),
    Parallelogram(GridDomainData),
    TwoTile(TemplateDomain),
}

impl FundamentalDomain {
    pub fn subtile_count(&self) -> usize {
        match self {
            FundamentalDomain::Hex(d) => d.hexes.len(),
            FundamentalDomain::Parallelogram(d) => d.subtiles.len(),
            FundamentalDomain::TwoTile(d) => d.subtile_count(),
        }
    }

    pub fn boundary_edge_count(&self) -> usize {
        match self {
            FundamentalDomain::Hex(d) => d.boundary.len(),
            FundamentalDomain::Parallelogram(d) => d.boundary.len(),
            FundamentalDomain::TwoTile(d) => d.boundary_edge_count(),
        }
    }

    pub fn report(&self) -> &DomainReport {
        match self {
            FundamentalDomain::Hex(d) => &d.report,
            FundamentalDomain::Parallelogram(d) => &d.report,
            FundamentalDomain::TwoTile(d) => &d.report,
        }
    }
}

/// Extract the combinatorial subdivision rule of an assembled domain.
pub fn extract_rule(domain: &FundamentalDomain) -> Result<SubdivisionRule, FundomError> {
    let rule = match domain {
        FundamentalDomain::Hex(d) => extract_hex_rule(d)?,
        FundamentalDomain::Parallelogram(d) => extract_par_rule(d)?,
        FundamentalDomain::TwoTile(d) => d.rule.clone(),
    };
    let violations = rule.validate();
    if !violations.is_empty() {
        return Err(FundomError::Extraction(format!(
            "extracted rule is invalid: {}",
            violations
                .iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join("; ")
        )));
    }
    Ok(rule)
}

#[cfg(test)]
mod tests;
