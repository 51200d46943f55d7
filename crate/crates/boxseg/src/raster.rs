//! Polygon-to-mask rasterization with the even-odd rule at pixel centres.
//!
//! The pixel at `(row, col)` samples the point `(col + 0.5, row + 0.5)`, so
//! an axis-aligned polygon with integer corners covers exactly the pixels it
//! encloses. Later annotations overwrite earlier ones at overlaps.

use boxseg_core::{ClassId, ImageDims, LabelMask};

use crate::annotations::Polygon;

/// A polygon that was skipped during rasterization.
#[derive(Debug, Clone, PartialEq)]
pub struct RasterWarning {
    pub annotation_index: usize,
    pub reason: String,
}

/// Rasterizes per-class polygon lists into a label mask.
///
/// Entries are `(class, polygons)` in annotation order; polygons with fewer
/// than three vertices are skipped with a warning. Pixels in no polygon stay
/// background.
pub fn rasterize_polygons(
    entries: &[(ClassId, Vec<Polygon>)],
    dims: ImageDims,
) -> (LabelMask, Vec<RasterWarning>) {
    let mut mask = LabelMask::filled(dims, ClassId::BACKGROUND);
    let mut warnings = Vec::new();
    for (index, (class, polygons)) in entries.iter().enumerate() {
        for polygon in polygons {
            if polygon.len() < 3 {
                warnings.push(RasterWarning {
                    annotation_index: index,
                    reason: format!("polygon with {} vertices skipped", polygon.len()),
                });
                continue;
            }
            fill_polygon(polygon, *class, &mut mask);
        }
    }
    (mask, warnings)
}

/// Scanline fill: for each row, intersect edges with the row's centre line
/// and fill between alternate crossings (even-odd rule).
fn fill_polygon(polygon: &Polygon, class: ClassId, mask: &mut LabelMask) {
    let dims = mask.dims();
    let n = polygon.len();
    let mut crossings: Vec<f64> = Vec::with_capacity(n);
    for row in 0..dims.height() as usize {
        let y = row as f64 + 0.5;
        crossings.clear();
        for k in 0..n {
            let (x0, y0) = polygon[k];
            let (x1, y1) = polygon[(k + 1) % n];
            // half-open span excludes horizontal edges and counts each vertex once
            if (y0 <= y && y < y1) || (y1 <= y && y < y0) {
                crossings.push(x0 + (y - y0) / (y1 - y0) * (x1 - x0));
            }
        }
        crossings.sort_by(|a, b| a.partial_cmp(b).expect("finite crossings"));
        for span in crossings.chunks_exact(2) {
            // pixel centres strictly inside [span0, span1)
            let start = (span[0] - 0.5).ceil().max(0.0) as usize;
            let end = ((span[1] - 0.5).ceil() as i64).min(dims.width() as i64);
            for col in start..end.max(0) as usize {
                mask.set(row, col, class);
            }
        }
    }
}

/// Point-in-polygon by the classic even-odd ray cast; the per-pixel oracle
/// used by tests to validate the scanline fill.
pub fn point_in_polygon(x: f64, y: f64, polygon: &Polygon) -> bool {
    let n = polygon.len();
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        let (xi, yi) = polygon[i];
        let (xj, yj) = polygon[j];
        if (yi > y) != (yj > y) && x < (xj - xi) * (y - yi) / (yj - yi) + xi {
            inside = !inside;
        }
        j = i;
    }
    inside
}
