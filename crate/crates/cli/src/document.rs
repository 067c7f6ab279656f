//! JSON documents read and written by the CLI.
//!
//! Row indices in every output document are 1-based.

use serde::{Deserialize, Serialize};

use linstab::{
    CaseTag, ClmValue, ExtendedNonneg, LinearSystem, Mode, ModulusReport, Norm, SetWitness,
    Tolerances, VertexSet,
};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemDocument {
    #[serde(rename = "A")]
    pub a: Vec<Vec<f64>>,
    pub b: Vec<f64>,
    #[serde(default)]
    pub norm: Norm,
    #[serde(default)]
    pub tolerances: Option<Tolerances>,
}

impl SystemDocument {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text)
            .map_err(|e| CliError::Parse(format!("invalid system document: {e}")))
    }

    /// The system and tolerances, with an optional norm override.
    pub fn build(&self, norm: Option<Norm>) -> Result<(LinearSystem, Tolerances), CliError> {
        let tol = self.tolerances.unwrap_or_default();
        tol.validate()
            .map_err(|e| CliError::Parse(format!("invalid tolerances: {e}")))?;
        let sys = LinearSystem::new(self.a.clone(), self.b.clone(), norm.unwrap_or(self.norm))
            .map_err(|e| CliError::Parse(format!("invalid system document: {e}")))?;
        Ok((sys, tol))
    }
}

fn one_based(indices: &[usize]) -> Vec<usize> {
    indices.iter().map(|i| i + 1).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VertexEntry {
    pub point: Vec<f64>,
    pub active: Vec<usize>,
}

pub fn vertex_entries(set: &VertexSet) -> Vec<VertexEntry> {
    set.iter()
        .map(|(p, a)| VertexEntry {
            point: p.clone(),
            active: a.one_based(),
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SetEntry {
    pub indices: Vec<usize>,
    pub direction: Vec<f64>,
    pub hull_distance: f64,
}

impl From<&SetWitness> for SetEntry {
    fn from(w: &SetWitness) -> Self {
        SetEntry {
            indices: one_based(&w.indices),
            direction: w.direction.clone(),
            hull_distance: w.hull_distance,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClmDocument {
    pub point: Vec<f64>,
    pub mode: Mode,
    pub value: ExtendedNonneg,
    pub active: Vec<usize>,
    pub witnesses: Vec<SetEntry>,
}

impl ClmDocument {
    pub fn new(point: Vec<f64>, mode: Mode, c: &ClmValue) -> Self {
        ClmDocument {
            point,
            mode,
            value: c.value,
            active: c.active.one_based(),
            witnesses: c.witnesses.iter().map(SetEntry::from).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointEntry {
    pub point: Vec<f64>,
    pub active: Vec<usize>,
    pub sets: Vec<SetEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub mode: Mode,
    pub value: ExtendedNonneg,
    pub case: CaseTag,
    pub witnesses: Vec<PointEntry>,
}

impl From<&ModulusReport> for ReportDocument {
    fn from(r: &ModulusReport) -> Self {
        ReportDocument {
            mode: r.mode,
            value: r.value,
            case: r.case_tag,
            witnesses: r
                .witnesses
                .iter()
                .map(|w| PointEntry {
                    point: w.point.clone(),
                    active: w.active.one_based(),
                    sets: w.sets.iter().map(SetEntry::from).collect(),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClmRow {
    pub point: Vec<f64>,
    pub active: Vec<usize>,
    pub clm_rhs: ExtendedNonneg,
    pub clm_full: ExtendedNonneg,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisDocument {
    pub norm: Norm,
    pub feasible: bool,
    pub bounded: bool,
    pub full_space: bool,
    pub vertices: Vec<VertexEntry>,
    pub restricted_vertices: Vec<VertexEntry>,
    /// `clm` at every point of `restricted_vertices`.
    pub points: Vec<ClmRow>,
    pub lipusc_rhs: ReportDocument,
    pub lipusc_full: ReportDocument,
}

impl AnalysisDocument {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("analysis documents serialize")
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text)
            .map_err(|e| CliError::Parse(format!("invalid analysis document: {e}")))
    }
}
