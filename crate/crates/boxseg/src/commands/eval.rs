use std::path::PathBuf;

use boxseg_core::eval::{
    box_fill_fallback, confusion, miou, render_comparison_table, ConfusionCounts,
};

use crate::annotations::parse_annotations;
use crate::error::DataError;
use crate::masks::{read_mask, write_atomic};

use super::{stem_of, EXIT_OK, EXIT_PARTIAL};

pub struct EvalArgs {
    pub pred: PathBuf,
    pub gt: PathBuf,
    pub ann: PathBuf,
    pub box_fill: bool,
    pub csv: Option<PathBuf>,
}

/// Aggregates confusion counts over the annotated images and prints the
/// IoU report. `--box-fill` applies the fairness fallback to each
/// prediction before scoring. Missing or unreadable pairs are listed and
/// the evaluation continues over the remainder.
pub fn cmd_eval(args: &EvalArgs) -> anyhow::Result<i32> {
    let set = parse_annotations(&args.ann)?;
    let mut total = ConfusionCounts::default();
    let mut problems: Vec<String> = Vec::new();
    let mut scored = 0usize;
    for image in set.images() {
        let stem = stem_of(&image.file_name);
        match score_image(args, &set, image.id, &stem) {
            Ok(counts) => {
                total.merge(&counts);
                scored += 1;
            }
            Err(e) => problems.push(format!("{stem}: {e}")),
        }
    }
    for problem in &problems {
        eprintln!("skipped {problem}");
    }
    if scored == 0 {
        anyhow::bail!("no image pairs could be scored");
    }
    let report = miou(&total)?;
    print!(
        "{}",
        render_comparison_table(&[report.comparison_row("overall")])
    );
    print!("{}", report.render_text());
    if let Some(csv_path) = &args.csv {
        write_atomic(csv_path, report.render_csv().as_bytes())?;
    }
    Ok(if problems.is_empty() {
        EXIT_OK
    } else {
        EXIT_PARTIAL
    })
}

fn score_image(
    args: &EvalArgs,
    set: &crate::annotations::AnnotationSet,
    image_id: u64,
    stem: &str,
) -> Result<ConfusionCounts, DataError> {
    let pred = read_mask(&args.pred.join(format!("{stem}.png")))?;
    let gt = read_mask(&args.gt.join(format!("{stem}.png")))?;
    let pred = if args.box_fill {
        box_fill_fallback(&pred, &set.boxes_for(image_id))
    } else {
        pred
    };
    Ok(confusion(&pred, &gt)?)
}
