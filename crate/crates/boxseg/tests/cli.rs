//! CLI behavior: exit codes, report shapes, and CLI-vs-library parity.

mod common;

use boxseg::masks::read_mask;
use boxseg_core::attention::GaussianParams;
use boxseg_core::fusion::pseudo_label;
use boxseg_core::PipelineConfig;
use common::{boxseg_cmd, build_fixture, scratch};

#[test]
fn stats_reports_counts() {
    let dir = scratch("stats");
    let fixture = build_fixture(&dir);
    let out = boxseg_cmd()
        .args(["stats", "--ann"])
        .arg(&fixture.ann)
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("width<=720   8"), "{text}");
    // 8 single-blob images cycle through all four classes, plus 4 second blobs
    assert!(text.contains("holothurian"), "{text}");
}

#[test]
fn stats_parse_error_exits_2() {
    let dir = scratch("stats-bad");
    let bad = dir.join("broken.json");
    std::fs::write(&bad, "{ not json").unwrap();
    let out = boxseg_cmd()
        .args(["stats", "--ann"])
        .arg(&bad)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("parse error"), "{err}");
}

#[test]
fn gen_pseudo_matches_library_composition() {
    let dir = scratch("gen");
    let fixture = build_fixture(&dir);
    let out_dir = dir.join("pseudo");
    let status = boxseg_cmd()
        .args(["gen-pseudo", "--ann"])
        .arg(&fixture.ann)
        .arg("--out")
        .arg(&out_dir)
        .arg("--config")
        .arg(&fixture.config)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    assert!(out_dir.join("manifest.json").exists());

    let set = boxseg::annotations::parse_annotations(&fixture.ann).unwrap();
    for image in set.images() {
        let from_cli = read_mask(&out_dir.join(format!(
            "img{}.png",
            image.id
        )))
        .unwrap();
        let cfg = PipelineConfig::default();
        let direct = pseudo_label(
            &set.boxes_for(image.id),
            None,
            image.dims,
            cfg.epsilon,
            cfg.theta_fg,
            cfg.theta_bg,
            &GaussianParams::default(),
        )
        .unwrap();
        assert_eq!(from_cli, direct, "image {}", image.id);
    }
}

#[test]
fn gen_pseudo_empty_annotations_is_ok() {
    let dir = scratch("gen-empty");
    let ann = dir.join("empty.json");
    std::fs::write(&ann, r#"{"images": [], "categories": [], "annotations": []}"#).unwrap();
    let out_dir = dir.join("pseudo");
    let status = boxseg_cmd()
        .args(["gen-pseudo", "--ann"])
        .arg(&ann)
        .arg("--out")
        .arg(&out_dir)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let masks = std::fs::read_dir(&out_dir)
        .unwrap()
        .filter_map(|e| e.ok())
        .filter(|e| e.path().extension().is_some_and(|x| x == "png"))
        .count();
    assert_eq!(masks, 0);
}

#[test]
fn eval_identical_dirs_score_100() {
    let dir = scratch("eval");
    let fixture = build_fixture(&dir);
    let out_dir = dir.join("pseudo");
    assert!(boxseg_cmd()
        .args(["gen-pseudo", "--ann"])
        .arg(&fixture.ann)
        .arg("--out")
        .arg(&out_dir)
        .arg("--config")
        .arg(&fixture.config)
        .status()
        .unwrap()
        .success());
    let out = boxseg_cmd()
        .args(["eval", "--pred"])
        .arg(&out_dir)
        .arg("--gt")
        .arg(&out_dir)
        .arg("--ann")
        .arg(&fixture.ann)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(
        text.contains("method\tholothurian\techinus\tscallop\tstarfish\tmean_incl_bg"),
        "{text}"
    );
    assert!(text.contains("overall\t100.0\t100.0\t100.0\t100.0\t100.0"), "{text}");
    assert!(text.contains("miou          100.0"), "{text}");
}

#[test]
fn eval_missing_pred_dir_lists_and_fails_partially() {
    let dir = scratch("eval-missing");
    let fixture = build_fixture(&dir);
    let gt_dir = dir.join("pseudo");
    assert!(boxseg_cmd()
        .args(["gen-pseudo", "--ann"])
        .arg(&fixture.ann)
        .arg("--out")
        .arg(&gt_dir)
        .status()
        .unwrap()
        .success());
    // prediction dir holds only one of the eight masks
    let pred_dir = dir.join("pred");
    std::fs::create_dir_all(&pred_dir).unwrap();
    std::fs::copy(gt_dir.join("img0.png"), pred_dir.join("img0.png")).unwrap();
    let out = boxseg_cmd()
        .args(["eval", "--pred"])
        .arg(&pred_dir)
        .arg("--gt")
        .arg(&gt_dir)
        .arg("--ann")
        .arg(&fixture.ann)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("img1"), "{err}");
}

#[test]
fn gradcheck_deterministic_across_runs() {
    let a = boxseg_cmd()
        .args(["gradcheck", "--seed", "5", "--size", "12"])
        .output()
        .unwrap();
    let b = boxseg_cmd()
        .args(["gradcheck", "--seed", "5", "--size", "12"])
        .output()
        .unwrap();
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn fit_boundary_skips_single_class_masks() {
    let dir = scratch("fit-skip");
    let masks = dir.join("masks");
    std::fs::create_dir_all(&masks).unwrap();
    let dims = boxseg_core::ImageDims::new(8, 8).unwrap();
    let uniform = boxseg_core::LabelMask::from_bytes(dims, &[1u8; 64]).unwrap();
    boxseg::masks::write_mask(&uniform, &masks.join("flat.png")).unwrap();
    let out_dir = dir.join("boundaries");
    let out = boxseg_cmd()
        .args(["fit-boundary", "--masks"])
        .arg(&masks)
        .arg("--out")
        .arg(&out_dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(!out_dir.join("flat.uact").exists());
    let manifest = std::fs::read_to_string(out_dir.join("manifest.json")).unwrap();
    assert!(manifest.contains("skipped"), "{manifest}");
}
