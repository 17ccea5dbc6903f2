//! Privacy stipulations: regions of the world a sensor must not resolve.
//!
//! A cover violates a stipulation when one of its readings certifies that
//! the world lies inside the sensitive region, at or below the forbidden
//! resolution. This is a static, sensor-level check on pre-images; it says
//! nothing about which beliefs an execution actually reaches.

use crate::cover::{Cover, FeatureSet, FeatureUniverse};
use crate::error::{Error, Result};
use crate::star;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stipulation {
    universe: FeatureUniverse,
    sensitive: FeatureSet,
    /// Readings of at most this many features are forbidden; `None` forbids
    /// every reading inside the region.
    max_resolution: Option<usize>,
}

impl Stipulation {
    pub fn new<I, S>(universe: &FeatureUniverse, sensitive: I, max_resolution: Option<usize>) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let sensitive = universe.set_of(sensitive)?;
        if sensitive.is_empty() {
            return Err(Error::EmptyStipulation);
        }
        Ok(Stipulation {
            universe: universe.clone(),
            sensitive,
            max_resolution,
        })
    }

    pub fn universe(&self) -> &FeatureUniverse {
        &self.universe
    }

    pub fn sensitive(&self) -> FeatureSet {
        self.sensitive
    }

    pub fn max_resolution(&self) -> Option<usize> {
        self.max_resolution
    }

    fn forbids(&self, preimage: FeatureSet) -> bool {
        preimage.is_subset(self.sensitive) && self.max_resolution.is_none_or(|k| preimage.len() <= k)
    }
}

pub fn complies(c: &Cover, s: &Stipulation) -> Result<bool> {
    c.universe().check_same(&s.universe)?;
    Ok(!c.sets().any(|p| s.forbids(p)))
}

/// How the members of one star class fare against a stipulation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComplianceReport {
    pub compliant: Vec<Cover>,
    pub non_compliant: Vec<Cover>,
    /// `(compliant, non-compliant)` members of the same class, when the class
    /// is split.
    pub witness: Option<(Cover, Cover)>,
}

impl ComplianceReport {
    pub fn is_mixed(&self) -> bool {
        self.witness.is_some()
    }
}

pub fn class_compliance_report(c: &Cover, s: &Stipulation) -> Result<ComplianceReport> {
    c.universe().check_same(&s.universe)?;
    let mut compliant = Vec::new();
    let mut non_compliant = Vec::new();
    for member in star::class_members(c)? {
        if complies(&member, s)? {
            compliant.push(member);
        } else {
            non_compliant.push(member);
        }
    }
    // Members are in canonical order: the first compliant one is the sparsest,
    // the last non-compliant one the full closure.
    let witness = match (compliant.first(), non_compliant.last()) {
        (Some(ok), Some(bad)) => Some((ok.clone(), bad.clone())),
        _ => None,
    };
    Ok(ComplianceReport {
        compliant,
        non_compliant,
        witness,
    })
}
