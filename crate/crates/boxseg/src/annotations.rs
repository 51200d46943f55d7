//! COCO-style annotation parsing.
//!
//! The supported subset is images, categories, and annotations with a `bbox`
//! and optional polygon `segmentation`. RLE segmentations are rejected. The
//! category set is closed: holothurian, echinus, scallop, starfish.

use std::collections::HashMap;
use std::path::Path;

use boxseg_core::{BBox, ClassId, ImageDims};
use serde::{Deserialize, Serialize};

use crate::error::DataError;

#[derive(Debug, Clone, Serialize, Deserialize)]
struct CocoDoc {
    #[serde(default)]
    images: Vec<CocoImage>,
    #[serde(default)]
    annotations: Vec<CocoAnnotation>,
    #[serde(default)]
    categories: Vec<CocoCategory>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct CocoImage {
    id: u64,
    file_name: String,
    height: u32,
    width: u32,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct CocoCategory {
    id: u64,
    name: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct CocoAnnotation {
    #[serde(default)]
    id: u64,
    image_id: u64,
    category_id: u64,
    bbox: [f64; 4],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    segmentation: Option<CocoSegmentation>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
enum CocoSegmentation {
    /// Flat `[x, y, x, y, ...]` coordinate lists, one per polygon.
    Polygons(Vec<Vec<f64>>),
    /// Run-length encodings appear as objects; rejected on conversion.
    Rle { size: [u32; 2], counts: serde_json::Value },
}

/// One polygon in pixel coordinates.
pub type Polygon = Vec<(f64, f64)>;

/// A parsed image record.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImageRecord {
    pub id: u64,
    pub file_name: String,
    pub dims: ImageDims,
}

/// An annotation resolved against the image and category tables.
#[derive(Debug, Clone, PartialEq)]
pub struct Annotation {
    pub id: u64,
    pub image_id: u64,
    pub class: ClassId,
    pub bbox: BBox,
    pub polygons: Vec<Polygon>,
}

/// Parsed annotation set: images in file order plus their annotations.
#[derive(Debug, Clone, PartialEq)]
pub struct AnnotationSet {
    images: Vec<ImageRecord>,
    annotations: Vec<Annotation>,
}

impl AnnotationSet {
    pub fn images(&self) -> &[ImageRecord] {
        &self.images
    }

    pub fn image(&self, id: u64) -> Option<&ImageRecord> {
        self.images.iter().find(|img| img.id == id)
    }

    pub fn annotations(&self) -> &[Annotation] {
        &self.annotations
    }

    /// Annotations of one image, in file order.
    pub fn annotations_for(&self, image_id: u64) -> impl Iterator<Item = &Annotation> {
        self.annotations
            .iter()
            .filter(move |a| a.image_id == image_id)
    }

    /// Bounding boxes of one image, in file order.
    pub fn boxes_for(&self, image_id: u64) -> Vec<BBox> {
        self.annotations_for(image_id).map(|a| a.bbox).collect()
    }

    /// Serializes back to the supported annotation subset.
    pub fn to_json(&self) -> String {
        let doc = CocoDoc {
            images: self
                .images
                .iter()
                .map(|img| CocoImage {
                    id: img.id,
                    file_name: img.file_name.clone(),
                    height: img.dims.height(),
                    width: img.dims.width(),
                })
                .collect(),
            annotations: self
                .annotations
                .iter()
                .map(|a| CocoAnnotation {
                    id: a.id,
                    image_id: a.image_id,
                    category_id: a.class.value() as u64,
                    bbox: [
                        a.bbox.x() as f64,
                        a.bbox.y() as f64,
                        a.bbox.w() as f64,
                        a.bbox.h() as f64,
                    ],
                    segmentation: if a.polygons.is_empty() {
                        None
                    } else {
                        Some(CocoSegmentation::Polygons(
                            a.polygons
                                .iter()
                                .map(|poly| poly.iter().flat_map(|&(x, y)| [x, y]).collect())
                                .collect(),
                        ))
                    },
                })
                .collect(),
            categories: ClassId::OBJECTS
                .iter()
                .map(|c| CocoCategory {
                    id: c.value() as u64,
                    name: c.name().to_string(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&doc).expect("annotation subset serializes")
    }
}

/// Parses an annotation file from disk.
pub fn parse_annotations(path: &Path) -> Result<AnnotationSet, DataError> {
    let text = std::fs::read_to_string(path).map_err(|e| DataError::io(path, e))?;
    parse_annotations_str(&text)
}

/// Parses an annotation document from a string.
pub fn parse_annotations_str(text: &str) -> Result<AnnotationSet, DataError> {
    let doc: CocoDoc = serde_json::from_str(text).map_err(|e| parse_error(text, &e))?;
    resolve(doc)
}

fn parse_error(text: &str, err: &serde_json::Error) -> DataError {
    let line = err.line();
    let column = err.column();
    DataError::Parse {
        line,
        column,
        offset: byte_offset(text, line, column),
    }
}

/// Byte offset of a 1-based (line, column) position.
fn byte_offset(text: &str, line: usize, column: usize) -> usize {
    if line == 0 {
        return 0;
    }
    let mut offset = 0;
    for (n, l) in text.split_inclusive('\n').enumerate() {
        if n + 1 == line {
            return offset + column.saturating_sub(1).min(l.len());
        }
        offset += l.len();
    }
    offset
}

fn resolve(doc: CocoDoc) -> Result<AnnotationSet, DataError> {
    let mut images = Vec::with_capacity(doc.images.len());
    let mut image_dims: HashMap<u64, ImageDims> = HashMap::new();
    for img in &doc.images {
        let dims = ImageDims::new(img.height, img.width)
            .map_err(|e| DataError::Schema(format!("image {}: {e}", img.id)))?;
        if image_dims.insert(img.id, dims).is_some() {
            return Err(DataError::Schema(format!("duplicate image id {}", img.id)));
        }
        images.push(ImageRecord {
            id: img.id,
            file_name: img.file_name.clone(),
            dims,
        });
    }
    let mut categories: HashMap<u64, ClassId> = HashMap::new();
    for cat in &doc.categories {
        let class = ClassId::from_name(&cat.name)
            .filter(|c| c.is_object())
            .ok_or_else(|| DataError::UnknownCategory(cat.name.clone()))?;
        categories.insert(cat.id, class);
    }
    let mut annotations = Vec::with_capacity(doc.annotations.len());
    for ann in &doc.annotations {
        let dims = *image_dims.get(&ann.image_id).ok_or_else(|| {
            DataError::Schema(format!(
                "annotation {} references unknown image {}",
                ann.id, ann.image_id
            ))
        })?;
        let class = *categories.get(&ann.category_id).ok_or_else(|| {
            DataError::Schema(format!(
                "annotation {} references unknown category {}",
                ann.id, ann.category_id
            ))
        })?;
        let bbox = convert_bbox(ann.bbox, class)
            .map_err(|msg| DataError::Schema(format!("annotation {}: {msg}", ann.id)))?;
        if bbox.clamp(dims).is_err() {
            return Err(DataError::Schema(format!(
                "annotation {} box lies outside its {}x{} image",
                ann.id,
                dims.height(),
                dims.width()
            )));
        }
        let polygons = match &ann.segmentation {
            None => Vec::new(),
            Some(CocoSegmentation::Rle { .. }) => return Err(DataError::RleUnsupported),
            Some(CocoSegmentation::Polygons(polys)) => polys
                .iter()
                .map(|flat| {
                    if flat.len() % 2 != 0 {
                        return Err(DataError::Schema(format!(
                            "annotation {}: odd polygon coordinate count",
                            ann.id
                        )));
                    }
                    Ok(flat.chunks_exact(2).map(|p| (p[0], p[1])).collect())
                })
                .collect::<Result<Vec<Polygon>, _>>()?,
        };
        annotations.push(Annotation {
            id: ann.id,
            image_id: ann.image_id,
            class,
            bbox,
            polygons,
        });
    }
    Ok(AnnotationSet {
        images,
        annotations,
    })
}

/// COCO boxes are floats; coordinates round half away from zero and extents
/// round but never collapse below one pixel.
fn convert_bbox(b: [f64; 4], class: ClassId) -> Result<BBox, String> {
    if b.iter().any(|v| !v.is_finite()) {
        return Err("non-finite bbox".to_string());
    }
    let x = b[0].round();
    let y = b[1].round();
    let w = b[2].round().max(1.0);
    let h = b[3].round().max(1.0);
    if !(i32::MIN as f64..=i32::MAX as f64).contains(&x)
        || !(i32::MIN as f64..=i32::MAX as f64).contains(&y)
        || w > u32::MAX as f64
        || h > u32::MAX as f64
    {
        return Err("bbox out of coordinate range".to_string());
    }
    BBox::new(x as i32, y as i32, w as u32, h as u32, class).map_err(|e| e.to_string())
}

/// Dataset split bookkeeping: image ids per supervision tier.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetSplit {
    pub train_with_masks: Vec<u64>,
    pub train_box_only: Vec<u64>,
    pub test: Vec<u64>,
}

impl DatasetSplit {
    /// Validates that the three id sets are pairwise disjoint.
    pub fn new(
        train_with_masks: Vec<u64>,
        train_box_only: Vec<u64>,
        test: Vec<u64>,
    ) -> Result<Self, DataError> {
        let split = Self {
            train_with_masks,
            train_box_only,
            test,
        };
        let mut seen = std::collections::HashSet::new();
        for id in split.all_ids() {
            if !seen.insert(id) {
                return Err(DataError::Schema(format!(
                    "image id {id} appears in more than one split"
                )));
            }
        }
        Ok(split)
    }

    pub fn sizes(&self) -> (usize, usize, usize) {
        (
            self.train_with_masks.len(),
            self.train_box_only.len(),
            self.test.len(),
        )
    }

    fn all_ids(&self) -> impl Iterator<Item = u64> + '_ {
        self.train_with_masks
            .iter()
            .chain(&self.train_box_only)
            .chain(&self.test)
            .copied()
    }
}
