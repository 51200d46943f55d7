use std::path::PathBuf;
use std::time::Instant;

use boxseg_core::propagation::segment;
use boxseg_core::{ClassId, LabelMask};
use rayon::prelude::*;

use crate::annotations::{parse_annotations, AnnotationSet, ImageRecord};
use crate::error::DataError;
use crate::manifest::{RunManifest, Status};
use crate::masks::{read_intensity_image, write_mask};
use crate::run_config::RunConfig;
use crate::tensor::read_tensor;

use super::{stem_of, with_pool, EXIT_OK, EXIT_PARTIAL};

pub struct SegmentArgs {
    pub ann: PathBuf,
    pub boundaries: PathBuf,
    pub images: PathBuf,
    pub out: PathBuf,
    pub config: Option<PathBuf>,
    pub workers: Option<usize>,
    pub force_large: bool,
}

/// Produces a final segmentation mask per annotated image: Gaussian
/// attention from the boxes, boundary-gated random walk, CRF refinement.
///
/// Activation maps are not consumed here; refinement at inference time runs
/// from the box evidence and the fitted boundary map alone.
pub fn cmd_segment(args: &SegmentArgs) -> anyhow::Result<i32> {
    let started = Instant::now();
    let set = parse_annotations(&args.ann)?;
    let config = RunConfig::load(args.config.as_deref())?;
    config.validate()?;
    std::fs::create_dir_all(&args.out).map_err(|e| DataError::io(&args.out, e))?;

    let results: Vec<(String, Status, std::time::Duration)> = with_pool(args.workers, || {
        set.images()
            .par_iter()
            .map(|image| {
                let begun = Instant::now();
                let status = process_image(&set, image, args, &config)
                    .err()
                    .map(|e| Status::Failed(e.to_string()))
                    .unwrap_or(Status::Ok);
                (image.file_name.clone(), status, begun.elapsed())
            })
            .collect()
    })?;

    let mut manifest = RunManifest::new("segment", config, 0);
    manifest.inputs.push(args.ann.display().to_string());
    manifest.inputs.push(args.boundaries.display().to_string());
    manifest.inputs.push(args.images.display().to_string());
    manifest.outputs.push(args.out.display().to_string());
    for (name, status, elapsed) in results {
        manifest.record(&name, status, elapsed);
    }
    manifest.finalize(started.elapsed());
    let failed = manifest.n_failed();
    manifest.write(&args.out)?;
    Ok(if failed > 0 { EXIT_PARTIAL } else { EXIT_OK })
}

fn process_image(
    set: &AnnotationSet,
    image: &ImageRecord,
    args: &SegmentArgs,
    config: &RunConfig,
) -> Result<(), DataError> {
    let stem = stem_of(&image.file_name);
    let out_path = args.out.join(format!("{stem}.png"));
    let boxes = set.boxes_for(image.id);
    if boxes.is_empty() {
        return write_mask(&LabelMask::filled(image.dims, ClassId::BACKGROUND), &out_path);
    }
    let boundary = read_tensor(&args.boundaries.join(format!("{stem}.uact")))?
        .to_boundary_map()?;
    let intensity = read_intensity_image(&args.images.join(&image.file_name))?;
    let mask = segment(
        &boxes,
        None,
        &boundary,
        &intensity,
        &config.pipeline,
        args.force_large,
    )?;
    write_mask(&mask, &out_path)
}
