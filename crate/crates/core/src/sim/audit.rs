use serde::{Deserialize, Serialize};

use super::{Interval, SimTrace};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairAudit {
    pub pair: usize,
    /// Over every simulated step.
    pub min_margin: f64,
    /// Over the recorded rows.
    pub mean_margin: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MarginAudit {
    pub pairs: Vec<PairAudit>,
    pub max_tracking_errors: Vec<f64>,
    pub violations: Vec<Interval>,
    pub floor_contacts: Vec<Interval>,
}

impl MarginAudit {
    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty() && self.violations.is_empty()
    }
}

/// Cable margin statistics, tracking errors and violation intervals.
pub fn audit_margins(trace: &SimTrace) -> MarginAudit {
    if trace.rows.is_empty() {
        return MarginAudit::default();
    }
    let pairs = trace.rows[0].margins.len();
    let count = trace.rows.len() as f64;
    let pairs = (0..pairs)
        .map(|pair| {
            let recorded_min = trace.rows.iter().map(|r| r.margins[pair]).fold(f64::INFINITY, f64::min);
            let min_margin = trace.outcome.min_margins.get(pair).copied().unwrap_or(f64::INFINITY).min(recorded_min);
            let mean_margin = trace.rows.iter().map(|r| r.margins[pair]).sum::<f64>() / count;
            PairAudit { pair, min_margin, mean_margin }
        })
        .collect();
    MarginAudit {
        pairs,
        max_tracking_errors: trace.outcome.max_tracking_errors.clone(),
        violations: trace.violations.clone(),
        floor_contacts: trace.floor_contacts.clone(),
    }
}
