//! Indexed-PNG label masks and intensity-image loading.
//!
//! Masks are 8-bit single-channel indexed PNGs whose palette indices are the
//! class values themselves (0 background, 1..=4 objects, 255 ignore), so
//! round trips are bit-exact. Palette colors: black, red, green, yellow,
//! blue; 255 is white.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use boxseg_core::{ImageDims, IntensityImage, LabelMask};

use crate::error::DataError;

/// RGB palette: class values are palette indices.
pub fn mask_palette() -> Vec<u8> {
    let mut palette = vec![0u8; 256 * 3];
    let colors: [(u8, [u8; 3]); 6] = [
        (0, [0, 0, 0]),
        (1, [255, 0, 0]),
        (2, [0, 255, 0]),
        (3, [255, 255, 0]),
        (4, [0, 0, 255]),
        (255, [255, 255, 255]),
    ];
    for (idx, rgb) in colors {
        palette[idx as usize * 3..idx as usize * 3 + 3].copy_from_slice(&rgb);
    }
    palette
}

/// Writes a label mask as an indexed PNG, atomically (temp file + rename).
pub fn write_mask(mask: &LabelMask, path: &Path) -> Result<(), DataError> {
    let dims = mask.dims();
    let mut encoded = Vec::new();
    {
        let mut encoder = png::Encoder::new(&mut encoded, dims.width(), dims.height());
        encoder.set_color(png::ColorType::Indexed);
        encoder.set_depth(png::BitDepth::Eight);
        encoder.set_palette(mask_palette());
        let mut writer = encoder
            .write_header()
            .map_err(|e| DataError::PngEncode {
                path: path.to_path_buf(),
                source: e,
            })?;
        writer
            .write_image_data(&mask.as_bytes())
            .map_err(|e| DataError::PngEncode {
                path: path.to_path_buf(),
                source: e,
            })?;
    }
    write_atomic(path, &encoded)
}

/// Reads an 8-bit indexed PNG into a label mask.
///
/// Non-indexed or multi-channel files and palette indices outside the class
/// set are rejected.
pub fn read_mask(path: &Path) -> Result<LabelMask, DataError> {
    let file = File::open(path).map_err(|e| DataError::io(path, e))?;
    let decoder = png::Decoder::new(BufReader::new(file));
    let mut reader = decoder.read_info().map_err(|e| DataError::PngDecode {
        path: path.to_path_buf(),
        source: e,
    })?;
    let info = reader.info();
    if info.color_type != png::ColorType::Indexed {
        return Err(DataError::MaskFormat(format!(
            "{}: expected an indexed PNG, got {:?}",
            path.display(),
            info.color_type
        )));
    }
    if info.bit_depth != png::BitDepth::Eight {
        return Err(DataError::MaskFormat(format!(
            "{}: expected 8-bit palette indices, got {:?}",
            path.display(),
            info.bit_depth
        )));
    }
    let dims = ImageDims::new(info.height, info.width)?;
    let mut buf = vec![0u8; dims.n_pixels()];
    reader
        .next_frame(&mut buf)
        .map_err(|e| DataError::PngDecode {
            path: path.to_path_buf(),
            source: e,
        })?;
    LabelMask::from_bytes(dims, &buf).map_err(|e| {
        DataError::MaskFormat(format!("{}: {e}", path.display()))
    })
}

/// Reads a grayscale or RGB 8-bit PNG as an intensity image for the CRF.
pub fn read_intensity_image(path: &Path) -> Result<IntensityImage, DataError> {
    let file = File::open(path).map_err(|e| DataError::io(path, e))?;
    let decoder = png::Decoder::new(BufReader::new(file));
    let mut reader = decoder.read_info().map_err(|e| DataError::PngDecode {
        path: path.to_path_buf(),
        source: e,
    })?;
    let info = reader.info();
    let channels = match info.color_type {
        png::ColorType::Grayscale => 1usize,
        png::ColorType::Rgb => 3usize,
        other => {
            return Err(DataError::MaskFormat(format!(
                "{}: expected a grayscale or RGB image, got {other:?}",
                path.display()
            )))
        }
    };
    if info.bit_depth != png::BitDepth::Eight {
        return Err(DataError::MaskFormat(format!(
            "{}: expected 8-bit samples, got {:?}",
            path.display(),
            info.bit_depth
        )));
    }
    let dims = ImageDims::new(info.height, info.width)?;
    let n = dims.n_pixels();
    let mut buf = vec![0u8; n * channels];
    reader
        .next_frame(&mut buf)
        .map_err(|e| DataError::PngDecode {
            path: path.to_path_buf(),
            source: e,
        })?;
    // interleaved samples to channel-major floats
    let mut data = vec![0.0_f64; n * channels];
    for idx in 0..n {
        for ch in 0..channels {
            data[ch * n + idx] = buf[idx * channels + ch] as f64;
        }
    }
    Ok(IntensityImage::new(dims, channels, data)?)
}

/// Writes bytes to `path` via a temp file in the same directory plus rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), DataError> {
    let file_name = path
        .file_name()
        .ok_or_else(|| DataError::io(path, std::io::Error::other("path has no file name")))?;
    let tmp = path.with_file_name(format!(".{}.tmp", file_name.to_string_lossy()));
    {
        let mut out = BufWriter::new(File::create(&tmp).map_err(|e| DataError::io(&tmp, e))?);
        out.write_all(bytes).map_err(|e| DataError::io(&tmp, e))?;
        out.flush().map_err(|e| DataError::io(&tmp, e))?;
    }
    std::fs::rename(&tmp, path).map_err(|e| DataError::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use boxseg_core::rng::SplitMix64;

    fn tmp_path(name: &str) -> std::path::PathBuf {
        let dir = std::env::temp_dir().join(format!("boxseg-mask-tests-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        dir.join(name)
    }

    #[test]
    fn round_trip_random_mask() {
        let dims = ImageDims::new(9, 13).unwrap();
        let mut rng = SplitMix64::new(1);
        let vals: Vec<u8> = (0..dims.n_pixels())
            .map(|_| [0u8, 1, 2, 3, 4, 255][rng.next_below(6)])
            .collect();
        let mask = LabelMask::from_bytes(dims, &vals).unwrap();
        let path = tmp_path("round_trip.png");
        write_mask(&mask, &path).unwrap();
        assert_eq!(read_mask(&path).unwrap(), mask);
    }

    #[test]
    fn all_ignore_mask_round_trips() {
        let dims = ImageDims::new(4, 4).unwrap();
        let mask = LabelMask::from_bytes(dims, &[255; 16]).unwrap();
        let path = tmp_path("ignore.png");
        write_mask(&mask, &path).unwrap();
        let back = read_mask(&path).unwrap();
        assert!(back.values().iter().all(|c| c.is_ignore()));
    }

    #[test]
    fn grayscale_png_is_not_a_mask() {
        let path = tmp_path("gray.png");
        let mut bytes = Vec::new();
        {
            let mut enc = png::Encoder::new(&mut bytes, 2, 2);
            enc.set_color(png::ColorType::Grayscale);
            enc.set_depth(png::BitDepth::Eight);
            enc.write_header()
                .unwrap()
                .write_image_data(&[0, 1, 2, 3])
                .unwrap();
        }
        std::fs::write(&path, &bytes).unwrap();
        assert!(matches!(read_mask(&path), Err(DataError::MaskFormat(_))));
        // but it is a valid intensity image
        let img = read_intensity_image(&path).unwrap();
        assert_eq!(img.channels(), 1);
    }

    #[test]
    fn rgb_intensity_image_loads_channel_major() {
        let path = tmp_path("rgb.png");
        let mut bytes = Vec::new();
        {
            let mut enc = png::Encoder::new(&mut bytes, 2, 1);
            enc.set_color(png::ColorType::Rgb);
            enc.set_depth(png::BitDepth::Eight);
            enc.write_header()
                .unwrap()
                .write_image_data(&[10, 20, 30, 40, 50, 60])
                .unwrap();
        }
        std::fs::write(&path, &bytes).unwrap();
        let img = read_intensity_image(&path).unwrap();
        assert_eq!(img.channels(), 3);
        // pixel 0 = (10, 20, 30), pixel 1 = (40, 50, 60)
        assert_eq!(img.sq_distance(0, 1), 3.0 * 30.0 * 30.0);
    }

    #[test]
    fn invalid_palette_index_rejected() {
        // hand-build an indexed png carrying index 9
        let path = tmp_path("badindex.png");
        let mut bytes = Vec::new();
        {
            let mut enc = png::Encoder::new(&mut bytes, 1, 1);
            enc.set_color(png::ColorType::Indexed);
            enc.set_depth(png::BitDepth::Eight);
            enc.set_palette(mask_palette());
            enc.write_header()
                .unwrap()
                .write_image_data(&[9])
                .unwrap();
        }
        std::fs::write(&path, &bytes).unwrap();
        assert!(matches!(read_mask(&path), Err(DataError::MaskFormat(_))));
    }
}
