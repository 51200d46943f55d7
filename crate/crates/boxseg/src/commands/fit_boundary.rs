use std::path::PathBuf;
use std::time::Instant;

use boxseg_core::affinity::fit_boundary_map;
use boxseg_core::LabelMask;
use rayon::prelude::*;

use crate::error::DataError;
use crate::manifest::{RunManifest, Status};
use crate::masks::read_mask;
use crate::run_config::RunConfig;
use crate::tensor::{write_tensor, Tensor};

use super::{stem_of, with_pool, EXIT_OK, EXIT_PARTIAL};

pub struct FitBoundaryArgs {
    pub masks: PathBuf,
    pub out: PathBuf,
    pub config: Option<PathBuf>,
    pub seed: Option<u64>,
    pub workers: Option<usize>,
}

/// Fits one boundary tensor per label mask in the input directory.
///
/// Masks with fewer than two distinct non-ignore classes carry no
/// different-class pairs and are skipped with a warning entry.
pub fn cmd_fit_boundary(args: &FitBoundaryArgs) -> anyhow::Result<i32> {
    let started = Instant::now();
    let mut config = RunConfig::load(args.config.as_deref())?;
    if let Some(seed) = args.seed {
        config.fit.seed = seed;
    }
    config.validate()?;
    std::fs::create_dir_all(&args.out).map_err(|e| DataError::io(&args.out, e))?;

    let mut mask_paths: Vec<PathBuf> = std::fs::read_dir(&args.masks)
        .map_err(|e| DataError::io(&args.masks, e))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|ext| ext == "png"))
        .collect();
    mask_paths.sort();

    let results: Vec<(String, Status, std::time::Duration)> = with_pool(args.workers, || {
        mask_paths
            .par_iter()
            .map(|path| {
                let begun = Instant::now();
                let name = path
                    .file_name()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_default();
                let status = match process_mask(path, args, &config) {
                    Ok(status) => status,
                    Err(e) => Status::Failed(e.to_string()),
                };
                (name, status, begun.elapsed())
            })
            .collect()
    })?;

    let seed = args.seed.unwrap_or(config.fit.seed);
    let mut manifest = RunManifest::new("fit-boundary", config, seed);
    manifest.inputs.push(args.masks.display().to_string());
    manifest.outputs.push(args.out.display().to_string());
    for (name, status, elapsed) in results {
        manifest.record(&name, status, elapsed);
    }
    manifest.finalize(started.elapsed());
    let failed = manifest.n_failed();
    manifest.write(&args.out)?;
    Ok(if failed > 0 { EXIT_PARTIAL } else { EXIT_OK })
}

fn process_mask(
    path: &std::path::Path,
    args: &FitBoundaryArgs,
    config: &RunConfig,
) -> Result<Status, DataError> {
    let mask = read_mask(path)?;
    if !has_class_contrast(&mask) {
        return Ok(Status::Skipped(
            "single non-ignore class, no different-class pairs".to_string(),
        ));
    }
    let boundary = fit_boundary_map(&mask, &config.fit, &config.pipeline)?;
    let stem = stem_of(&path.file_name().unwrap_or_default().to_string_lossy());
    write_tensor(
        &Tensor::from_boundary_map(&boundary),
        &args.out.join(format!("{stem}.uact")),
    )?;
    Ok(Status::Ok)
}

fn has_class_contrast(mask: &LabelMask) -> bool {
    let mut first = None;
    for &value in mask.values() {
        if value.is_ignore() {
            continue;
        }
        match first {
            None => first = Some(value),
            Some(seen) if seen != value => return true,
            _ => {}
        }
    }
    false
}
