//! Segmentation scoring: confusion counts, per-class IoU and mIoU (background
//! included in the mean), the box-fill fairness fallback, and plain-text /
//! CSV table rendering.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::class::ClassId;
use crate::error::CoreError;
use crate::geom::BBox;
use crate::maps::LabelMask;

/// Number of scored classes: background plus the four object classes.
pub const N_SCORED: usize = 5;

/// Pixel counts per (ground truth, prediction) class cell.
///
/// Pixels whose ground truth is the ignore label are not counted; predicted
/// ignore is mapped to background before counting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ConfusionCounts {
    cells: [[u64; N_SCORED]; N_SCORED],
}

impl ConfusionCounts {
    pub fn cell(&self, gt: ClassId, pred: ClassId) -> u64 {
        match (gt.scored_index(), pred.scored_index()) {
            (Some(g), Some(p)) => self.cells[g][p],
            _ => 0,
        }
    }

    pub fn total(&self) -> u64 {
        self.cells.iter().flatten().sum()
    }

    /// Associative merge; image order does not matter.
    pub fn merge(&mut self, other: &ConfusionCounts) {
        for (row, other_row) in self.cells.iter_mut().zip(&other.cells) {
            for (cell, &v) in row.iter_mut().zip(other_row) {
                *cell += v;
            }
        }
    }

    fn true_positive(&self, c: usize) -> u64 {
        self.cells[c][c]
    }

    fn false_positive(&self, c: usize) -> u64 {
        (0..N_SCORED).filter(|&g| g != c).map(|g| self.cells[g][c]).sum()
    }

    fn false_negative(&self, c: usize) -> u64 {
        (0..N_SCORED).filter(|&p| p != c).map(|p| self.cells[c][p]).sum()
    }
}

/// Confusion counts over pixels where the ground truth is not ignore.
pub fn confusion(pred: &LabelMask, gt: &LabelMask) -> Result<ConfusionCounts, CoreError> {
    if pred.dims() != gt.dims() {
        return Err(CoreError::ShapeMismatch(format!(
            "prediction is {}x{}, ground truth is {}x{}",
            pred.dims().height(),
            pred.dims().width(),
            gt.dims().height(),
            gt.dims().width()
        )));
    }
    let mut counts = ConfusionCounts::default();
    for (&p, &g) in pred.values().iter().zip(gt.values()) {
        if g.is_ignore() {
            continue;
        }
        let p = if p.is_ignore() { ClassId::BACKGROUND } else { p };
        let gi = g.scored_index().expect("non-ignore labels are scored");
        let pi = p.scored_index().expect("non-ignore labels are scored");
        counts.cells[gi][pi] += 1;
    }
    Ok(counts)
}

/// Per-class IoU percentages and their mean.
///
/// Classes absent from both prediction and ground truth are excluded from
/// the mean; `miou` is the arithmetic mean over the included classes
/// (background counts as a class).
#[derive(Debug, Clone, PartialEq)]
pub struct IouReport {
    per_class: [Option<f64>; N_SCORED],
    miou: f64,
    counts: ConfusionCounts,
}

impl IouReport {
    /// IoU percentage for a class; `None` when the class was absent.
    pub fn iou(&self, class: ClassId) -> Option<f64> {
        class.scored_index().and_then(|i| self.per_class[i])
    }

    pub fn miou(&self) -> f64 {
        self.miou
    }

    pub fn counts(&self) -> &ConfusionCounts {
        &self.counts
    }

    /// Aligned plain-text report, one class per line plus the mean.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("{:<12} {:>6}\n", "class", "iou"));
        for class in ClassId::SCORED {
            let cell = match self.iou(class) {
                Some(v) => format_percent(v),
                None => String::from("n/a"),
            };
            out.push_str(&format!("{:<12} {:>6}\n", class.name(), cell));
        }
        out.push_str(&format!("{:<12} {:>6}\n", "miou", format_percent(self.miou)));
        out
    }

    /// CSV report with columns `class,iou` and a final `miou` row.
    pub fn render_csv(&self) -> String {
        let mut out = String::from("class,iou\n");
        for class in ClassId::SCORED {
            if let Some(v) = self.iou(class) {
                out.push_str(&format!("{},{}\n", class.name(), format_percent(v)));
            }
        }
        out.push_str(&format!("miou,{}\n", format_percent(self.miou)));
        out
    }
}

/// Computes per-class IoU and the mean over present classes.
pub fn miou(counts: &ConfusionCounts) -> Result<IouReport, CoreError> {
    let mut per_class = [None; N_SCORED];
    let mut sum = 0.0;
    let mut present = 0usize;
    for (c, slot) in per_class.iter_mut().enumerate() {
        let tp = counts.true_positive(c);
        let denom = tp + counts.false_positive(c) + counts.false_negative(c);
        if denom == 0 {
            continue;
        }
        let iou = 100.0 * tp as f64 / denom as f64;
        *slot = Some(iou);
        sum += iou;
        present += 1;
    }
    if present == 0 {
        return Err(CoreError::EmptyReport);
    }
    Ok(IouReport {
        per_class,
        miou: sum / present as f64,
        counts: *counts,
    })
}

/// Fairness fallback: any box whose interior contains no pixel of its class
/// has its interior filled with that class.
///
/// Boxes are processed in ascending area order and pixels claimed by an
/// earlier box are never overwritten, so smaller objects win overlap
/// conflicts. A box that already contains its class claims those pixels
/// instead of filling, which keeps later fills from erasing its evidence.
/// Boxes that do not intersect the mask are skipped.
pub fn box_fill_fallback(pred: &LabelMask, boxes: &[BBox]) -> LabelMask {
    let dims = pred.dims();
    let mut clamped: Vec<BBox> = boxes.iter().filter_map(|b| b.clamp(dims).ok()).collect();
    clamped.sort_by_key(|b| b.area());
    let mut out = pred.clone();
    let mut claimed = alloc::vec![false; dims.n_pixels()];
    let width = dims.width() as usize;
    for bbox in &clamped {
        let mut present = false;
        for row in bbox.rows() {
            for col in bbox.cols() {
                if out.values()[row * width + col] == bbox.class() {
                    present = true;
                    claimed[row * width + col] = true;
                }
            }
        }
        if present {
            continue;
        }
        for row in bbox.rows() {
            for col in bbox.cols() {
                let idx = row * width + col;
                if !claimed[idx] {
                    out.values_mut()[idx] = bbox.class();
                    claimed[idx] = true;
                }
            }
        }
    }
    out
}

/// Formats a percentage with one decimal, matching the report tables.
pub fn format_percent(v: f64) -> String {
    format!("{v:.1}")
}

/// A labelled row of per-class IoUs plus the mean (background included).
#[derive(Debug, Clone)]
pub struct ComparisonRow {
    pub label: String,
    pub per_class: [f64; 4],
    pub mean: f64,
}

/// Renders the method-comparison table: one column per object class plus the
/// mean over the five scored classes.
pub fn render_comparison_table(rows: &[ComparisonRow]) -> String {
    let mut out = String::from("method\tholothurian\techinus\tscallop\tstarfish\tmean_incl_bg\n");
    for row in rows {
        out.push_str(&render_comparison_row(row));
        out.push('\n');
    }
    out
}

pub fn render_comparison_row(row: &ComparisonRow) -> String {
    format!(
        "{}\t{}\t{}\t{}\t{}\t{}",
        row.label,
        format_percent(row.per_class[0]),
        format_percent(row.per_class[1]),
        format_percent(row.per_class[2]),
        format_percent(row.per_class[3]),
        format_percent(row.mean)
    )
}

/// Renders the ablation table: method label and mIoU.
pub fn render_ablation_table(rows: &[(String, f64)]) -> String {
    let mut out = String::from("method\tmiou\n");
    for (label, miou) in rows {
        out.push_str(&format!("{}\t{}\n", label, format_percent(*miou)));
    }
    out
}

impl IouReport {
    /// The report as a comparison-table row (object classes then mean).
    pub fn comparison_row(&self, label: &str) -> ComparisonRow {
        let mut per_class = [0.0; 4];
        for (slot, class) in ClassId::OBJECTS.iter().enumerate() {
            per_class[slot] = self.iou(*class).unwrap_or(0.0);
        }
        ComparisonRow {
            label: String::from(label),
            per_class,
            mean: self.miou,
        }
    }
}
