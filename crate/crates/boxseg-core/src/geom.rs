//! Grid dimensions, pixel indexing, and bounding boxes.
//!
//! Pixels are integer grid positions; a pixel at `(row, col)` sits at the
//! point `(x, y) = (col, row)`. Distances between pixels use the Euclidean
//! metric on those integer coordinates.

use crate::class::ClassId;
use crate::error::CoreError;

/// Height and width of a pixel grid. Both are at least 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ImageDims {
    height: u32,
    width: u32,
}

impl ImageDims {
    pub fn new(height: u32, width: u32) -> Result<Self, CoreError> {
        if height == 0 || width == 0 {
            return Err(CoreError::InvalidArgument(alloc::format!(
                "image dimensions must be positive, got {height}x{width}"
            )));
        }
        Ok(Self { height, width })
    }

    pub fn height(self) -> u32 {
        self.height
    }

    pub fn width(self) -> u32 {
        self.width
    }

    pub fn n_pixels(self) -> usize {
        self.height as usize * self.width as usize
    }

    /// Row-major flat index of `(row, col)`; bijective over the grid.
    pub fn index(self, row: usize, col: usize) -> Result<usize, CoreError> {
        if row >= self.height as usize || col >= self.width as usize {
            return Err(CoreError::OutOfBounds {
                row,
                col,
                height: self.height,
                width: self.width,
            });
        }
        Ok(row * self.width as usize + col)
    }

    /// Inverse of [`ImageDims::index`].
    pub fn coords(self, index: usize) -> Result<(usize, usize), CoreError> {
        if index >= self.n_pixels() {
            return Err(CoreError::OutOfBounds {
                row: index / self.width as usize,
                col: index % self.width as usize,
                height: self.height,
                width: self.width,
            });
        }
        Ok((index / self.width as usize, index % self.width as usize))
    }

    #[inline]
    pub(crate) fn at(self, row: usize, col: usize) -> usize {
        debug_assert!(row < self.height as usize && col < self.width as usize);
        row * self.width as usize + col
    }
}

/// Axis-aligned bounding box in the canonical top-left + size convention.
///
/// `x`/`y` may be negative and `x + w` / `y + h` may overhang the image;
/// [`BBox::clamp`] intersects the box with a grid. The centre form used by
/// the Gaussian attention map is exposed via [`BBox::center`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BBox {
    x: i32,
    y: i32,
    w: u32,
    h: u32,
    class: ClassId,
}

impl BBox {
    /// `class` must be one of the object classes.
    pub fn new(x: i32, y: i32, w: u32, h: u32, class: ClassId) -> Result<Self, CoreError> {
        if w == 0 || h == 0 {
            return Err(CoreError::InvalidBox("width and height must be positive"));
        }
        if !class.is_object() {
            return Err(CoreError::InvalidBox("class must be an object class"));
        }
        Ok(Self { x, y, w, h, class })
    }

    pub fn x(&self) -> i32 {
        self.x
    }

    pub fn y(&self) -> i32 {
        self.y
    }

    pub fn w(&self) -> u32 {
        self.w
    }

    pub fn h(&self) -> u32 {
        self.h
    }

    pub fn class(&self) -> ClassId {
        self.class
    }

    /// Box centre `(x + w/2, y + h/2)` in pixel coordinates.
    pub fn center(&self) -> (f64, f64) {
        (
            self.x as f64 + self.w as f64 / 2.0,
            self.y as f64 + self.h as f64 / 2.0,
        )
    }

    pub fn area(&self) -> u64 {
        self.w as u64 * self.h as u64
    }

    /// Intersects the box with the image grid, preserving the class.
    ///
    /// Fails with [`CoreError::EmptyBox`] when the intersection is empty.
    pub fn clamp(&self, dims: ImageDims) -> Result<BBox, CoreError> {
        let x0 = self.x.max(0) as i64;
        let y0 = self.y.max(0) as i64;
        let x1 = (self.x as i64 + self.w as i64).min(dims.width() as i64);
        let y1 = (self.y as i64 + self.h as i64).min(dims.height() as i64);
        if x1 <= x0 || y1 <= y0 {
            return Err(CoreError::EmptyBox {
                height: dims.height(),
                width: dims.width(),
            });
        }
        Ok(BBox {
            x: x0 as i32,
            y: y0 as i32,
            w: (x1 - x0) as u32,
            h: (y1 - y0) as u32,
            class: self.class,
        })
    }

    /// Row range of a clamped box. Callers must clamp first.
    pub(crate) fn rows(&self) -> core::ops::Range<usize> {
        debug_assert!(self.y >= 0);
        self.y as usize..(self.y as usize + self.h as usize)
    }

    pub(crate) fn cols(&self) -> core::ops::Range<usize> {
        debug_assert!(self.x >= 0);
        self.x as usize..(self.x as usize + self.w as usize)
    }
}
