use std::path::PathBuf;
use std::time::Instant;

use boxseg_core::attention::resize_bilinear;
use boxseg_core::fusion::pseudo_label;
use boxseg_core::{ActivationStack, ImageDims};
use rayon::prelude::*;

use crate::annotations::{parse_annotations, AnnotationSet, ImageRecord};
use crate::error::DataError;
use crate::manifest::{RunManifest, Status};
use crate::masks::write_mask;
use crate::run_config::RunConfig;
use crate::tensor::read_tensor;

use super::{stem_of, with_pool, EXIT_OK, EXIT_PARTIAL};

pub struct GenPseudoArgs {
    pub ann: PathBuf,
    pub out: PathBuf,
    pub cam_dir: Option<PathBuf>,
    pub config: Option<PathBuf>,
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub no_cam: bool,
}

/// Generates one pseudo-label mask per box-annotated image.
///
/// Images with an activation tensor in `cam_dir` fuse it with the Gaussian
/// attention maps; images without one (or with `--no-cam`) use the Gaussian
/// branch alone.
pub fn cmd_gen_pseudo(args: &GenPseudoArgs) -> anyhow::Result<i32> {
    let started = Instant::now();
    let set = parse_annotations(&args.ann)?;
    let mut config = RunConfig::load(args.config.as_deref())?;
    if let Some(seed) = args.seed {
        config.fit.seed = seed;
    }
    config.validate()?;
    std::fs::create_dir_all(&args.out).map_err(|e| DataError::io(&args.out, e))?;

    let annotated: Vec<&ImageRecord> = set
        .images()
        .iter()
        .filter(|img| set.annotations_for(img.id).next().is_some())
        .collect();
    let results: Vec<(String, Status, std::time::Duration)> = with_pool(args.workers, || {
        annotated
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

    let mut manifest = RunManifest::new("gen-pseudo", config, args.seed.unwrap_or(0));
    manifest.inputs.push(args.ann.display().to_string());
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
    args: &GenPseudoArgs,
    config: &RunConfig,
) -> Result<(), DataError> {
    let boxes = set.boxes_for(image.id);
    let cams = load_cams(args, image, image.dims)?;
    let mask = pseudo_label(
        &boxes,
        cams.as_ref(),
        image.dims,
        config.pipeline.epsilon,
        config.pipeline.theta_fg,
        config.pipeline.theta_bg,
        &config.gaussian,
    )?;
    write_mask(&mask, &args.out.join(format!("{}.png", stem_of(&image.file_name))))
}

/// Loads the image's activation tensor when present, resized to image
/// resolution. A missing tensor means the image has no classifier output.
fn load_cams(
    args: &GenPseudoArgs,
    image: &ImageRecord,
    dims: ImageDims,
) -> Result<Option<ActivationStack>, DataError> {
    if args.no_cam {
        return Ok(None);
    }
    let Some(cam_dir) = &args.cam_dir else {
        return Ok(None);
    };
    let path = cam_dir.join(format!("{}.uact", stem_of(&image.file_name)));
    if !path.exists() {
        return Ok(None);
    }
    let stack = read_tensor(&path)?.to_activation_stack()?;
    if stack.dims() == dims {
        return Ok(Some(stack));
    }
    let resized: Vec<_> = stack
        .maps()
        .iter()
        .map(|m| resize_bilinear(m, dims))
        .collect();
    Ok(Some(ActivationStack::new(dims, resized)?))
}
