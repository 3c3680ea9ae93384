//! Detection-rate tables over labelled datasets.

use std::collections::BTreeMap;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{process_image, PipelineConfig};
use crate::error::{Error, Result};
use crate::imagecore::{io, BinaryMask, ImageRgb8};
use crate::roi::{detection_metrics, DetectionClass, DetectionMetrics};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Group {
    Normal,
    Diseased,
}

#[derive(Debug, Clone)]
pub struct EvalItem {
    pub image: ImageRgb8,
    pub truth: BinaryMask,
    pub group: Group,
}

/// Result for one image.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalRecord {
    pub name: String,
    pub group: Group,
    pub class: Option<DetectionClass>,
    pub metrics: Option<DetectionMetrics>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClassStat {
    pub count: usize,
    pub percent: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupSummary {
    pub group: Group,
    pub total: usize,
    pub correct: ClassStat,
    pub more: ClassStat,
    pub less: ClassStat,
    pub failed: ClassStat,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalSummary {
    /// Only groups with at least one image appear, normal first.
    pub groups: Vec<GroupSummary>,
}

impl EvalSummary {
    pub fn group(&self, group: Group) -> Option<&GroupSummary> {
        self.groups.iter().find(|g| g.group == group)
    }

    pub fn failed(&self) -> usize {
        self.groups.iter().map(|g| g.failed.count).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub slack: f64,
    pub summary: EvalSummary,
    pub records: Vec<EvalRecord>,
}

impl EvalReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report is always serializable");
        s.push('\n');
        s
    }
}

pub fn summarize(records: &[EvalRecord]) -> EvalSummary {
    let mut tallies: BTreeMap<Group, [usize; 4]> = BTreeMap::new();
    for r in records {
        let slot = match r.class {
            Some(DetectionClass::Correct) => 0,
            Some(DetectionClass::More) => 1,
            Some(DetectionClass::Less) => 2,
            None => 3,
        };
        tallies.entry(r.group).or_default()[slot] += 1;
    }
    let groups = tallies
        .into_iter()
        .map(|(group, t)| {
            let total: usize = t.iter().sum();
            let stat = |count: usize| ClassStat {
                count,
                percent: 100.0 * count as f64 / total as f64,
            };
            GroupSummary {
                group,
                total,
                correct: stat(t[0]),
                more: stat(t[1]),
                less: stat(t[2]),
                failed: stat(t[3]),
            }
        })
        .collect();
    EvalSummary { groups }
}

fn record(name: String, group: Group, outcome: Result<DetectionMetrics>, slack: f64) -> EvalRecord {
    match outcome {
        Ok(m) => EvalRecord {
            name,
            group,
            class: Some(m.classify(slack)),
            metrics: Some(m),
            error: None,
        },
        Err(e) => EvalRecord {
            name,
            group,
            class: None,
            metrics: None,
            error: Some(e.to_string()),
        },
    }
}

/// Run the pipeline on every item and grade its ROI. Per-image failures are
/// tallied as failed rather than aborting the run. Records keep input order.
pub fn run_eval_detailed(dataset: &[EvalItem], cfg: &PipelineConfig) -> Result<EvalReport> {
    cfg.validate()?;
    if dataset.is_empty() {
        return Err(Error::InvalidConfig("evaluation dataset is empty".into()));
    }
    let records = dataset
        .par_iter()
        .enumerate()
        .map(|(i, item)| {
            let outcome =
                process_image(&item.image, cfg).and_then(|out| detection_metrics(&out.roi.roi_mask, &item.truth));
            record(format!("#{i}"), item.group, outcome, cfg.eval_slack)
        })
        .collect::<Vec<_>>();
    Ok(EvalReport {
        slack: cfg.eval_slack,
        summary: summarize(&records),
        records,
    })
}

pub fn run_eval(dataset: &[EvalItem], cfg: &PipelineConfig) -> Result<EvalSummary> {
    run_eval_detailed(dataset, cfg).map(|r| r.summary)
}

/// `{"<stem>": "normal" | "diseased", ...}`
pub fn load_groups(path: &Path) -> Result<BTreeMap<String, Group>> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| Error::Json {
        path: path.to_path_buf(),
        source,
    })
}

/// Grade saved `<stem>.roimask.png` predictions against truth masks of the
/// same name, for every stem in `groups`.
pub fn eval_directories(
    pred_dir: &Path,
    truth_dir: &Path,
    groups: &BTreeMap<String, Group>,
    slack: f64,
) -> Result<EvalReport> {
    crate::roi::validate_slack(slack)?;
    if groups.is_empty() {
        return Err(Error::InvalidConfig("groups file lists no images".into()));
    }
    let entries: Vec<(&String, &Group)> = groups.iter().collect();
    let records = entries
        .par_iter()
        .map(|&(stem, &group)| {
            let file = format!("{stem}.roimask.png");
            let outcome = io::load_mask(&pred_dir.join(&file))
                .and_then(|pred| Ok((pred, io::load_mask(&truth_dir.join(&file))?)))
                .and_then(|(pred, truth)| detection_metrics(&pred, &truth));
            record(stem.clone(), group, outcome, slack)
        })
        .collect::<Vec<_>>();
    Ok(EvalReport {
        slack,
        summary: summarize(&records),
        records,
    })
}
