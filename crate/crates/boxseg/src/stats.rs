//! Dataset statistics: image-resolution histogram and per-class instance counts.

use boxseg_core::ClassId;

use crate::annotations::AnnotationSet;

/// Default histogram bucket edges over image width, in pixels.
pub const DEFAULT_WIDTH_BUCKETS: [u32; 3] = [720, 1080, 1920];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StatsReport {
    /// `(label, count)` per width bucket, in ascending width order.
    pub resolution_buckets: Vec<(String, usize)>,
    /// Instance counts per object class, in class order.
    pub instances: [(ClassId, usize); 4],
}

/// Bucket labels for a set of ascending edges: `<=e0`, `<=e1`, ..., `>elast`.
fn bucket_labels(edges: &[u32]) -> Vec<String> {
    let mut labels: Vec<String> = edges.iter().map(|e| format!("width<={e}")).collect();
    labels.push(format!("width>{}", edges.last().expect("non-empty edges")));
    labels
}

/// Computes the dataset statistics report.
///
/// `edges` are the ascending width bucket boundaries; pass
/// [`DEFAULT_WIDTH_BUCKETS`] for the standard split.
pub fn dataset_stats(set: &AnnotationSet, edges: &[u32]) -> StatsReport {
    let labels = bucket_labels(edges);
    let mut buckets = vec![0usize; labels.len()];
    for image in set.images() {
        let width = image.dims.width();
        let slot = edges
            .iter()
            .position(|&e| width <= e)
            .unwrap_or(edges.len());
        buckets[slot] += 1;
    }
    let mut instances = [
        (ClassId::HOLOTHURIAN, 0usize),
        (ClassId::ECHINUS, 0),
        (ClassId::SCALLOP, 0),
        (ClassId::STARFISH, 0),
    ];
    for ann in set.annotations() {
        if let Some(slot) = instances.iter_mut().find(|(c, _)| *c == ann.class) {
            slot.1 += 1;
        }
    }
    StatsReport {
        resolution_buckets: labels.into_iter().zip(buckets).collect(),
        instances,
    }
}

impl StatsReport {
    pub fn render_text(&self) -> String {
        let mut out = String::from("resolution histogram\n");
        for (label, count) in &self.resolution_buckets {
            out.push_str(&format!("  {label:<12} {count}\n"));
        }
        out.push_str("instances per class\n");
        for (class, count) in &self.instances {
            out.push_str(&format!("  {:<12} {count}\n", class.name()));
        }
        out
    }

    pub fn render_csv(&self) -> String {
        let mut out = String::from("kind,key,count\n");
        for (label, count) in &self.resolution_buckets {
            out.push_str(&format!("resolution,{label},{count}\n"));
        }
        for (class, count) in &self.instances {
            out.push_str(&format!("instances,{},{count}\n", class.name()));
        }
        out
    }
}
