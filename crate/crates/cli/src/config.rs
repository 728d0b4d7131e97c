//! Target configuration files and their validation.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sigma_forge_core::algebra::{MultiIndex, Ratio};
use sigma_forge_core::geometry::{
    sphere_graph_metric, sphere_normal_metric, Chart, MetricJet, TensorJet, TensorKind,
};

/// A single sparse metric coefficient in a custom target.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MetricTerm {
    pub i: usize,
    pub j: usize,
    pub multi_index: Vec<u32>,
    pub coeff: String,
}

/// Target description: the round sphere by dimension, or explicit metric
/// jet data.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "target", rename_all = "lowercase")]
pub enum TargetConfig {
    Sphere {
        #[serde(rename = "N")]
        n: usize,
        cutoff: u32,
        #[serde(default = "default_chart")]
        chart: Chart,
    },
    Custom {
        dim: usize,
        cutoff: u32,
        metric_terms: Vec<MetricTerm>,
        #[serde(default = "default_chart")]
        chart: Chart,
    },
}

fn default_chart() -> Chart {
    Chart::Graph
}

impl TargetConfig {
    pub fn sphere(n: usize, cutoff: u32, chart: Chart) -> Self {
        TargetConfig::Sphere { n, cutoff, chart }
    }

    pub fn cutoff(&self) -> u32 {
        match self {
            TargetConfig::Sphere { cutoff, .. } | TargetConfig::Custom { cutoff, .. } => *cutoff,
        }
    }

    pub fn echo(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("config serializes")
    }

    /// Validates invariants and constructs the metric jet.
    pub fn build_metric(&self) -> Result<MetricJet, String> {
        match self {
            TargetConfig::Sphere { n, cutoff, chart } => {
                if *cutoff < 2 {
                    return Err(format!("cutoff must be >= 2, got {cutoff}"));
                }
                match chart {
                    Chart::Normal => sphere_normal_metric(*n, *cutoff).map_err(|e| e.to_string()),
                    _ => sphere_graph_metric(*n, *cutoff).map_err(|e| e.to_string()),
                }
            }
            TargetConfig::Custom { dim, cutoff, metric_terms, chart } => {
                if *cutoff < 2 {
                    return Err(format!("cutoff must be >= 2, got {cutoff}"));
                }
                if *dim == 0 {
                    return Err("custom target needs dim >= 1".into());
                }
                // Collect ordered entries, then check symmetry conflicts.
                let mut entries: BTreeMap<(usize, usize, Vec<u32>), (usize, Ratio)> =
                    BTreeMap::new();
                for (pos, term) in metric_terms.iter().enumerate() {
                    if term.i >= *dim || term.j >= *dim {
                        return Err(format!(
                            "metric term {pos}: component ({}, {}) out of range for dim {dim}",
                            term.i, term.j
                        ));
                    }
                    if term.multi_index.len() != *dim {
                        return Err(format!(
                            "metric term {pos}: multi-index length {} != dim {dim}",
                            term.multi_index.len()
                        ));
                    }
                    let degree: u32 = term.multi_index.iter().sum();
                    if degree > *cutoff {
                        return Err(format!(
                            "metric term {pos}: degree {degree} exceeds cutoff {cutoff}"
                        ));
                    }
                    let coeff: Ratio = term
                        .coeff
                        .parse()
                        .map_err(|e| format!("metric term {pos}: {e}"))?;
                    let key = (term.i, term.j, term.multi_index.clone());
                    if entries.insert(key, (pos, coeff)).is_some() {
                        return Err(format!("metric term {pos}: duplicate component entry"));
                    }
                }
                for ((i, j, idx), (pos, coeff)) in &entries {
                    if i == j {
                        continue;
                    }
                    if let Some((other_pos, other)) = entries.get(&(*j, *i, idx.clone())) {
                        if other != coeff {
                            return Err(format!(
                                "asymmetric metric term: entries {pos} and {other_pos} disagree \
                                 on components ({i},{j})/({j},{i})"
                            ));
                        }
                    }
                }
                let mut tensor = TensorJet::zero(*dim, *cutoff, TensorKind::Sym2Covariant);
                for ((i, j, idx), (_, coeff)) in &entries {
                    if i > j {
                        continue; // symmetric partner handled below
                    }
                    let mut series = tensor.sym2_component(*i, *j).clone();
                    series.add_term(MultiIndex::from_exponents(idx.clone()), coeff.clone());
                    tensor.set_sym2_component(*i, *j, series);
                }
                // Lower-triangle-only entries without an upper partner.
                for ((i, j, idx), (_, coeff)) in &entries {
                    if i <= j || entries.contains_key(&(*j, *i, idx.clone())) {
                        continue;
                    }
                    let mut series = tensor.sym2_component(*j, *i).clone();
                    series.add_term(MultiIndex::from_exponents(idx.clone()), coeff.clone());
                    tensor.set_sym2_component(*j, *i, series);
                }
                MetricJet::new(tensor, *chart).map_err(|e| e.to_string())
            }
        }
    }

}

/// Loads and validates a target config file.
pub fn load_target_config(path: &Path) -> Result<TargetConfig, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let config: TargetConfig =
        serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    // Build once to surface invariant violations early.
    config.build_metric()?;
    Ok(config)
}
