//! Synthetic fixture set shared by the CLI and acceptance tests: eight
//! 32x32 grayscale images with bright rectangular blobs, box annotations
//! covering the blobs, and a small config tuned for test runtimes.

// Each test binary compiles this module and uses a different subset of it.
#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::Command;

pub const N_IMAGES: usize = 8;
pub const SIDE: u32 = 32;

pub struct Fixture {
    pub ann: PathBuf,
    pub images: PathBuf,
    pub config: PathBuf,
}

/// A blob is a filled rectangle of bright intensity matching one box.
struct Blob {
    x: u32,
    y: u32,
    w: u32,
    h: u32,
    category: u32,
}

fn blobs_for(image_idx: usize) -> Vec<Blob> {
    let k = image_idx as u32;
    let mut blobs = vec![Blob {
        x: 4 + (k % 3),
        y: 5 + (k % 2),
        w: 12,
        h: 10,
        category: 1 + (k % 4),
    }];
    if image_idx >= 4 {
        blobs.push(Blob {
            x: 18,
            y: 17,
            w: 10,
            h: 11,
            category: 1 + ((k + 1) % 4),
        });
    }
    blobs
}

pub fn build_fixture(root: &Path) -> Fixture {
    let images = root.join("images");
    std::fs::create_dir_all(&images).unwrap();

    let mut image_rows = Vec::new();
    let mut ann_rows = Vec::new();
    let mut ann_id = 0;
    for idx in 0..N_IMAGES {
        let file_name = format!("img{idx}.png");
        image_rows.push(format!(
            r#"{{"id": {idx}, "file_name": "{file_name}", "height": {SIDE}, "width": {SIDE}}}"#
        ));
        let blobs = blobs_for(idx);
        let mut pixels = vec![40u8 + idx as u8; (SIDE * SIDE) as usize];
        for blob in &blobs {
            for row in blob.y..blob.y + blob.h {
                for col in blob.x..blob.x + blob.w {
                    pixels[(row * SIDE + col) as usize] = 200;
                }
            }
            ann_rows.push(format!(
                r#"{{"id": {ann_id}, "image_id": {idx}, "category_id": {}, "bbox": [{}.0, {}.0, {}.0, {}.0]}}"#,
                blob.category, blob.x, blob.y, blob.w, blob.h
            ));
            ann_id += 1;
        }
        write_gray_png(&images.join(&file_name), SIDE, SIDE, &pixels);
    }

    let ann = root.join("annotations.json");
    std::fs::write(
        &ann,
        format!(
            r#"{{
  "images": [{}],
  "categories": [
    {{"id": 1, "name": "holothurian"}},
    {{"id": 2, "name": "echinus"}},
    {{"id": 3, "name": "scallop"}},
    {{"id": 4, "name": "starfish"}}
  ],
  "annotations": [{}]
}}"#,
            image_rows.join(",\n    "),
            ann_rows.join(",\n    ")
        ),
    )
    .unwrap();

    let config = root.join("run.conf");
    std::fs::write(
        &config,
        "fit.steps = 120\nfit.learning_rate = 8\nrw_iters = 4\ncrf.n_iters = 3\n",
    )
    .unwrap();

    Fixture {
        ann,
        images,
        config,
    }
}

pub fn write_gray_png(path: &Path, width: u32, height: u32, pixels: &[u8]) {
    let file = std::fs::File::create(path).unwrap();
    let mut encoder = png::Encoder::new(std::io::BufWriter::new(file), width, height);
    encoder.set_color(png::ColorType::Grayscale);
    encoder.set_depth(png::BitDepth::Eight);
    encoder
        .write_header()
        .unwrap()
        .write_image_data(pixels)
        .unwrap();
}

/// A fresh scratch directory under the target-adjacent temp root.
pub fn scratch(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!(
        "boxseg-it-{}-{}-{}",
        tag,
        std::process::id(),
        std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .unwrap()
            .as_nanos()
    ));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

pub fn boxseg_cmd() -> Command {
    Command::new(env!("CARGO_BIN_EXE_boxseg"))
}

/// Full byte map of a directory's files (non-recursive), keyed by name.
pub fn dir_bytes(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut entries: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .filter_map(|e| e.ok())
        .filter(|e| e.path().is_file())
        .map(|e| {
            (
                e.file_name().to_string_lossy().into_owned(),
                std::fs::read(e.path()).unwrap(),
            )
        })
        .collect();
    entries.sort_by(|a, b| a.0.cmp(&b.0));
    entries
}

/// Like [`dir_bytes`] without the run manifest, whose timing fields are
/// allowed to differ between runs.
pub fn dir_bytes_sans_manifest(dir: &Path) -> Vec<(String, Vec<u8>)> {
    dir_bytes(dir)
        .into_iter()
        .filter(|(name, _)| name != "manifest.json")
        .collect()
}
