use serde::{Deserialize, Serialize};

use super::diversity::DiversitySection;
use super::reinforcement::{ReinforcementSection, SelectionSection};
use super::tendency::TendencySection;
use crate::cluster::{BicVariant, ChWeighting, KSelection};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportHeader {
    pub master_seed: u64,
    pub repetitions: usize,
    pub p_fraction_default: f64,
    pub p_fraction_hopkins: f64,
    pub k_window: usize,
    pub bic_variant: BicVariant,
    pub k_selection: KSelection,
    pub ch_weighting: ChWeighting,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CohortSummary {
    pub thresholds: (f64, f64),
    pub following: usize,
    pub ignoring: usize,
    pub unassigned: usize,
    /// Users without any page view.
    pub excluded: usize,
    /// Eligible users (enough blocks) per kind and cohort: `(kind, following, ignoring)`.
    pub eligible: Vec<(String, usize, usize)>,
}

/// Everything one analysis run measured. Sections appear as their
/// campaigns complete.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub header: ReportHeader,
    pub cohorts: Option<CohortSummary>,
    pub tendency: Vec<TendencySection>,
    pub selection: Vec<SelectionSection>,
    pub reinforcement: Vec<ReinforcementSection>,
    pub diversity: Option<DiversitySection>,
    pub decisions: Vec<String>,
}

impl ExperimentReport {
    pub fn new(header: ReportHeader) -> Self {
        Self {
            header,
            cohorts: None,
            tendency: Vec::new(),
            selection: Vec::new(),
            reinforcement: Vec::new(),
            diversity: None,
            decisions: Vec::new(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.cohorts.is_none()
            && self.tendency.is_empty()
            && self.selection.is_empty()
            && self.reinforcement.is_empty()
            && self.diversity.is_none()
    }
}
