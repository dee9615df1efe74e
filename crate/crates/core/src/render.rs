//! Basin rasters and their image encodings.

use std::fs;
use std::io;
use std::path::Path;

use crate::dynamics::{AttractorTable, CaptureKind, Verdict, Viewport};
use crate::{Error, Result};

pub type Rgb = [u8; 3];

/// Per-pixel fates over a viewport, row-major with the top row first.
#[derive(Clone, Debug, PartialEq)]
pub struct BasinRaster {
    width: usize,
    height: usize,
    fates: Vec<Verdict>,
    viewport: Viewport,
    /// Largest iteration count any pixel could report.
    max_iter: usize,
}

impl BasinRaster {
    pub fn new(width: usize, height: usize, fates: Vec<Verdict>, viewport: Viewport, max_iter: usize) -> Self {
        assert_eq!(fates.len(), width * height, "raster size mismatch");
        BasinRaster {
            width,
            height,
            fates,
            viewport,
            max_iter,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn viewport(&self) -> Viewport {
        self.viewport
    }

    pub fn max_iter(&self) -> usize {
        self.max_iter
    }

    pub fn fates(&self) -> &[Verdict] {
        &self.fates
    }

    pub fn get(&self, col: usize, row: usize) -> Verdict {
        self.fates[row * self.width + col]
    }

    /// Whether row `r` equals row `h - 1 - r` after relabelling attractors by
    /// `sigma`, the conjugation permutation of the attractor table.
    pub fn is_mirror_symmetric(&self, sigma: &[usize]) -> bool {
        self.mirror_mismatches(sigma) == 0
    }

    pub fn mirror_mismatches(&self, sigma: &[usize]) -> usize {
        (0..self.height)
            .flat_map(|row| (0..self.width).map(move |col| (col, row)))
            .filter(|&(col, row)| self.get(col, row) != self.get(col, self.height - 1 - row).relabel(sigma))
            .count()
    }

    /// Number of pixels for each attractor index, then escaped, then undetermined.
    pub fn histogram(&self, attractors: usize) -> Vec<usize> {
        let mut counts = vec![0; attractors + 2];
        for v in &self.fates {
            match v {
                Verdict::Converged { attractor, .. } | Verdict::Parabolic { attractor, .. } => counts[*attractor] += 1,
                Verdict::EscapedToInfinity { .. } => counts[attractors] += 1,
                Verdict::Undetermined => counts[attractors + 1] += 1,
            }
        }
        counts
    }
}

const YELLOWS: [Rgb; 4] = [[240, 200, 20], [255, 238, 140], [230, 150, 30], [200, 220, 60]];
const BLUES: [Rgb; 4] = [[40, 90, 220], [120, 170, 255], [20, 50, 140], [70, 200, 230]];

/// Colours by attractor index, shaded darker with iteration count.
#[derive(Clone, Debug, PartialEq)]
pub struct Palette {
    pub attractors: Vec<Rgb>,
    pub escaped: Rgb,
    pub undetermined: Rgb,
    /// Iteration count at which shading reaches its darkest.
    pub max_iter: usize,
}

impl Palette {
    pub fn new(attractors: Vec<Rgb>, max_iter: usize) -> Self {
        Palette {
            attractors,
            escaped: [110, 15, 25],
            undetermined: [0, 0, 0],
            max_iter,
        }
    }

    /// Yellow shades for attracting entries and blue shades for parabolic
    /// ones, each family assigned in table order.
    pub fn for_table(table: &AttractorTable, max_iter: usize) -> Self {
        let (mut yellow, mut blue) = (0, 0);
        let colors = table
            .entries()
            .iter()
            .map(|e| match e.kind() {
                CaptureKind::Attracting => {
                    yellow += 1;
                    YELLOWS[(yellow - 1) % YELLOWS.len()]
                }
                CaptureKind::Parabolic => {
                    blue += 1;
                    BLUES[(blue - 1) % BLUES.len()]
                }
            })
            .collect();
        Palette::new(colors, max_iter)
    }

    pub fn color(&self, fate: Verdict) -> Rgb {
        let base = match fate {
            Verdict::Converged { attractor, .. } | Verdict::Parabolic { attractor, .. } => {
                self.attractors.get(attractor).copied().unwrap_or(self.undetermined)
            }
            Verdict::EscapedToInfinity { .. } => self.escaped,
            Verdict::Undetermined => return self.undetermined,
        };
        let depth = if self.max_iter == 0 {
            0.0
        } else {
            ((1.0 + fate.iterations() as f64).ln() / (1.0 + self.max_iter as f64).ln()).min(1.0)
        };
        let factor = 1.0 - 0.75 * depth;
        base.map(|c| (c as f64 * factor).round() as u8)
    }
}

pub fn rgb_bytes(raster: &BasinRaster, palette: &Palette) -> Vec<u8> {
    raster.fates().iter().flat_map(|&v| palette.color(v)).collect()
}

pub fn ppm_bytes(raster: &BasinRaster, palette: &Palette) -> Vec<u8> {
    let mut out = format!("P6\n{} {}\n255\n", raster.width(), raster.height()).into_bytes();
    out.extend(rgb_bytes(raster, palette));
    out
}

fn io_error(path: &Path, source: io::Error) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

pub fn write_ppm(raster: &BasinRaster, palette: &Palette, path: &Path) -> Result<()> {
    fs::write(path, ppm_bytes(raster, palette)).map_err(|e| io_error(path, e))
}

pub fn write_png(raster: &BasinRaster, palette: &Palette, path: &Path) -> Result<()> {
    let image = image::RgbImage::from_raw(raster.width() as u32, raster.height() as u32, rgb_bytes(raster, palette))
        .expect("buffer length matches dimensions");
    image.save_with_format(path, image::ImageFormat::Png).map_err(|e| match e {
        image::ImageError::IoError(source) => io_error(path, source),
        other => io_error(path, io::Error::other(other)),
    })
}

/// PNG for a `.png` extension, PPM otherwise.
pub fn write_image(raster: &BasinRaster, palette: &Palette, path: &Path) -> Result<()> {
    let is_png = path
        .extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("png"));
    if is_png {
        write_png(raster, palette, path)
    } else {
        write_ppm(raster, palette, path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn view() -> Viewport {
        Viewport::new(Complex64::ZERO, 1.0).unwrap()
    }

    fn converged(attractor: usize) -> Verdict {
        Verdict::Converged {
            attractor,
            iterations: 0,
        }
    }

    #[test]
    fn one_pixel_ppm() {
        let raster = BasinRaster::new(1, 1, vec![converged(0)], view(), 100);
        let palette = Palette::new(vec![[255, 255, 0]], 100);
        let mut expected = b"P6\n1 1\n255\n".to_vec();
        expected.extend([0xFF, 0xFF, 0x00]);
        assert_eq!(ppm_bytes(&raster, &palette), expected);
    }

    #[test]
    fn two_pixels_in_palette_order() {
        let raster = BasinRaster::new(2, 1, vec![converged(0), converged(1)], view(), 100);
        let palette = Palette::new(vec![[1, 2, 3], [4, 5, 6]], 100);
        let bytes = ppm_bytes(&raster, &palette);
        assert_eq!(&bytes[bytes.len() - 6..], &[1, 2, 3, 4, 5, 6]);
        assert_eq!(bytes.len(), b"P6\n2 1\n255\n".len() + 6);
    }

    #[test]
    fn shading_darkens_with_iterations() {
        let palette = Palette::new(vec![[200, 200, 200]], 100);
        let fast = palette.color(converged(0));
        let slow = palette.color(Verdict::Converged {
            attractor: 0,
            iterations: 100,
        });
        assert_eq!(fast, [200, 200, 200]);
        assert_eq!(slow, [50, 50, 50]);
        assert_eq!(palette.color(Verdict::Undetermined), [0, 0, 0]);
    }

    #[test]
    fn png_and_ppm_hold_the_same_pixels() {
        let fates: Vec<Verdict> = (0..64 * 64)
            .map(|i| match i % 4 {
                0 => converged(0),
                1 => Verdict::Parabolic {
                    attractor: 1,
                    iterations: i % 97,
                },
                2 => Verdict::EscapedToInfinity { iterations: 3 },
                _ => Verdict::Undetermined,
            })
            .collect();
        let raster = BasinRaster::new(64, 64, fates, view(), 200);
        let palette = Palette::new(vec![[240, 200, 20], [40, 90, 220]], 200);
        let dir = tempfile::tempdir().unwrap();
        let png = dir.path().join("a.png");
        let ppm = dir.path().join("a.ppm");
        write_image(&raster, &palette, &png).unwrap();
        write_image(&raster, &palette, &ppm).unwrap();
        let decoded = image::open(&png).unwrap().to_rgb8();
        assert_eq!(decoded.as_raw(), &rgb_bytes(&raster, &palette));
        let ppm_data = std::fs::read(&ppm).unwrap();
        assert_eq!(&ppm_data[b"P6\n64 64\n255\n".len()..], decoded.as_raw().as_slice());
    }

    #[test]
    fn unwritable_path_reports_io_error() {
        let raster = BasinRaster::new(1, 1, vec![converged(0)], view(), 10);
        let palette = Palette::new(vec![[1, 1, 1]], 10);
        let err = write_ppm(&raster, &palette, Path::new("/nonexistent-dir/x.ppm")).unwrap_err();
        assert!(matches!(err, Error::Io { .. }));
    }

    #[test]
    fn mirror_check_uses_the_relabelling() {
        let fates = vec![converged(0), converged(1)];
        let raster = BasinRaster::new(1, 2, fates, view(), 10);
        assert!(!raster.is_mirror_symmetric(&[0, 1]));
        assert!(raster.is_mirror_symmetric(&[1, 0]));
    }
}
