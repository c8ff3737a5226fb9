//! Semantic fidelity metrics: Recall/Precision@K over objects and triplets,
//! per-predicate mean recall, latent alignment distortion and trial
//! aggregation.
//!
//! Objects match by category multiset and triplets by exact
//! `(subject category, predicate, object category)`; slot numbers are ignored.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::graph::{ged, GedCosts, OarGraph};

pub type Triplet = (usize, usize, usize);

pub const OBJ_KS: [usize; 3] = [5, 10, 20];
pub const REL_KS: [usize; 4] = [10, 15, 20, 50];

/// Decoder output ranked by confidence, highest first.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RankedPredictions {
    pub objects: Vec<(usize, f64)>,
    pub triplets: Vec<(Triplet, f64)>,
}

fn rank<T: Ord + Copy>(items: &mut [(T, f64)]) {
    items.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
}

impl RankedPredictions {
    pub fn from_graph(g: &OarGraph) -> Self {
        let mut objects: Vec<(usize, f64)> = g.nodes.iter().map(|n| (n.category, n.confidence)).collect();
        let mut triplets = g.triplets();
        rank(&mut objects);
        rank(&mut triplets);
        Self { objects, triplets }
    }
}

/// Flags, per top-k prediction, whether it consumed an unmatched ground-truth
/// item; matching is greedy in rank order.
fn match_top_k<T: PartialEq>(gt: &[T], pred: &[(T, f64)], k: usize) -> (Vec<bool>, Vec<bool>) {
    let mut taken = alloc::vec![false; gt.len()];
    let hits = pred
        .iter()
        .take(k)
        .map(|(p, _)| match (0..gt.len()).find(|&i| !taken[i] && gt[i] == *p) {
            Some(i) => {
                taken[i] = true;
                true
            }
            None => false,
        })
        .collect();
    (taken, hits)
}

/// Recall and precision of the top `k` ranked predictions against a
/// ground-truth multiset. Empty ground truth has recall 1; no predictions
/// has precision 1 only when the ground truth is empty too.
pub fn recall_precision_at_k<T: PartialEq>(gt: &[T], pred: &[(T, f64)], k: usize) -> (f64, f64) {
    assert!(k >= 1, "k must be at least 1");
    let (_, hits) = match_top_k(gt, pred, k);
    let matched = hits.iter().filter(|&&h| h).count() as f64;
    let recall = if gt.is_empty() { 1.0 } else { matched / gt.len() as f64 };
    let shown = k.min(pred.len());
    let precision = if shown == 0 {
        if gt.is_empty() { 1.0 } else { 0.0 }
    } else {
        matched / shown as f64
    };
    (recall, precision)
}

/// Recall@k computed per predicate class present in the ground truth, then
/// averaged over those classes.
pub fn mean_recall_at_k(gt: &[Triplet], pred: &[(Triplet, f64)], k: usize) -> f64 {
    assert!(k >= 1, "k must be at least 1");
    if gt.is_empty() {
        return 1.0;
    }
    let (taken, _) = match_top_k(gt, pred, k);
    let mut per_class: BTreeMap<usize, (usize, usize)> = BTreeMap::new();
    for (t, hit) in gt.iter().zip(taken) {
        let e = per_class.entry(t.1).or_default();
        e.0 += hit as usize;
        e.1 += 1;
    }
    let sum: f64 = per_class.values().map(|&(h, n)| h as f64 / n as f64).sum();
    sum / per_class.len() as f64
}

fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na = libm::sqrt(a.iter().map(|x| x * x).sum::<f64>());
    let nb = libm::sqrt(b.iter().map(|x| x * x).sum::<f64>());
    match (na == 0.0, nb == 0.0) {
        (true, true) => 1.0,
        (true, false) | (false, true) => 0.0,
        _ => dot / (na * nb),
    }
}

/// `10 * (1 - cos(z_hat, z)) + ||z_hat - z||_1` over flattened latents. The
/// zero/zero pair has cosine 1 and a zero/non-zero pair cosine 0.
pub fn alignment_distortion(z_hat: &[f64], z: &[f64]) -> f64 {
    assert_eq!(z_hat.len(), z.len(), "latent shapes differ");
    let l1: f64 = z_hat.iter().zip(z).map(|(a, b)| libm::fabs(a - b)).sum();
    10.0 * (1.0 - cosine(z_hat, z)) + l1
}

/// Scores for one decoded sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    /// Indexed like [`OBJ_KS`].
    pub obj_recall: [f64; 3],
    pub obj_precision: [f64; 3],
    /// Indexed like [`REL_KS`].
    pub rel_recall: [f64; 4],
    pub rel_mean_recall: [f64; 4],
    pub ged_raw: f64,
    pub ged_normalized: f64,
    pub ged_exact: bool,
    /// Alignment distortion per stream (object, attribute, relation);
    /// `None` for streams that were not transmitted.
    pub d_align: [Option<f64>; 3],
    pub failure: bool,
}

impl MetricReport {
    /// Summed distortion over transmitted streams, `None` when no latent
    /// stream was sent.
    pub fn d_align_total(&self) -> Option<f64> {
        let present: Vec<f64> = self.d_align.iter().flatten().copied().collect();
        (!present.is_empty()).then(|| present.iter().sum())
    }

    /// Values in [`METRIC_COLUMNS`] order.
    pub fn values(&self) -> [Option<f64>; 17] {
        let mut v = [None; 17];
        for i in 0..3 {
            v[2 * i] = Some(self.obj_recall[i]);
            v[2 * i + 1] = Some(self.obj_precision[i]);
        }
        for i in 0..4 {
            v[6 + 2 * i] = Some(self.rel_recall[i]);
            v[7 + 2 * i] = Some(self.rel_mean_recall[i]);
        }
        v[14] = Some(self.ged_raw);
        v[15] = Some(self.ged_normalized);
        v[16] = self.d_align_total();
        v
    }
}

pub const METRIC_COLUMNS: [&str; 17] = [
    "obj_r@5", "obj_p@5", "obj_r@10", "obj_p@10", "obj_r@20", "obj_p@20", "rel_r@10", "rel_mr@10",
    "rel_r@15", "rel_mr@15", "rel_r@20", "rel_mr@20", "rel_r@50", "rel_mr@50", "ged_raw", "ged_norm",
    "d_align",
];

/// Scores a decoded graph against ground truth. Distortion is left empty for
/// the caller to fill.
pub fn evaluate(gt: &OarGraph, decoded: &OarGraph, costs: &GedCosts, failure: bool) -> MetricReport {
    let pred = RankedPredictions::from_graph(decoded);
    let gt_objects: Vec<usize> = gt.nodes.iter().map(|n| n.category).collect();
    let gt_triplets: Vec<Triplet> = gt.triplets().into_iter().map(|(t, _)| t).collect();
    let mut obj_recall = [0.0; 3];
    let mut obj_precision = [0.0; 3];
    for (i, &k) in OBJ_KS.iter().enumerate() {
        (obj_recall[i], obj_precision[i]) = recall_precision_at_k(&gt_objects, &pred.objects, k);
    }
    let mut rel_recall = [0.0; 4];
    let mut rel_mean_recall = [0.0; 4];
    for (i, &k) in REL_KS.iter().enumerate() {
        rel_recall[i] = recall_precision_at_k(&gt_triplets, &pred.triplets, k).0;
        rel_mean_recall[i] = mean_recall_at_k(&gt_triplets, &pred.triplets, k);
    }
    let g = ged(gt, decoded, costs).expect("GED costs validated by caller");
    MetricReport {
        obj_recall,
        obj_precision,
        rel_recall,
        rel_mean_recall,
        ged_raw: g.raw,
        ged_normalized: g.normalized,
        ged_exact: g.exact,
        d_align: [None; 3],
        failure,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stat {
    pub mean: f64,
    /// Sample standard deviation; 0 for a single value.
    pub std: f64,
    pub count: usize,
}

/// Mean and sample standard deviation. Values are sorted before summation
/// so the result does not depend on input order.
pub fn stat(values: &[f64]) -> Option<Stat> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let mut dev: Vec<f64> = v.iter().map(|x| (x - mean) * (x - mean)).collect();
    dev.sort_by(f64::total_cmp);
    let std = if v.len() > 1 { libm::sqrt(dev.iter().sum::<f64>() / (n - 1.0)) } else { 0.0 };
    Some(Stat { mean, std, count: v.len() })
}

/// Per-metric statistics over the trials of one configuration point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub count: usize,
    pub failure_rate: f64,
    /// Aligned with [`METRIC_COLUMNS`]; `None` when no trial reported the
    /// metric.
    pub metrics: Vec<Option<Stat>>,
}

/// Aggregates reports of a single configuration point. `None` for an empty
/// list.
pub fn aggregate(reports: &[MetricReport]) -> Option<Summary> {
    if reports.is_empty() {
        return None;
    }
    let rows: Vec<[Option<f64>; 17]> = reports.iter().map(MetricReport::values).collect();
    let metrics = (0..METRIC_COLUMNS.len())
        .map(|c| {
            let col: Vec<f64> = rows.iter().filter_map(|r| r[c]).collect();
            stat(&col)
        })
        .collect();
    let failures = reports.iter().filter(|r| r.failure).count();
    Some(Summary {
        count: reports.len(),
        failure_rate: failures as f64 / reports.len() as f64,
        metrics,
    })
}
