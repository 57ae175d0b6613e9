//! Component rasters as 16-bit binary PGM with a JSON sidecar.
//!
//! Pixel value 0 marks unresolved cells; a component with id `k` is
//! stored as `k % 65534 + 1`. Rows are written top (maximum imaginary
//! part) first, as image viewers expect.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dynamics::components::ComponentMap;
use crate::dynamics::grid::{CellLabel, Grid};
use crate::error::FormatError;
use crate::geometry::BoundingBox;

const LEVELS: u32 = 65534;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RasterHeader {
    pub bbox: BoundingBox,
    pub width: usize,
    pub height: usize,
    pub cell: f64,
    pub resolution: usize,
    pub map: Option<String>,
    #[serde(default)]
    pub parameters: BTreeMap<String, serde_json::Value>,
    /// Set when more than 65534 components forced ids to wrap.
    pub quantized: bool,
}

/// Pixel values with row 0 at the bottom.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RasterImage {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<u16>,
}

impl RasterImage {
    pub fn from_components(map: &ComponentMap) -> (Self, bool) {
        let mut pixels = vec![0u16; map.width * map.height];
        for j in 0..map.height {
            for i in 0..map.width {
                if let Some(c) = map.component_at(i, j) {
                    pixels[j * map.width + i] = (c % LEVELS + 1) as u16;
                }
            }
        }
        let image = Self {
            width: map.width,
            height: map.height,
            pixels,
        };
        (image, map.len() > LEVELS as usize)
    }

    /// Grid whose basins are the pixel classes, ready for relabelling.
    pub fn to_grid(&self, bbox: BoundingBox) -> Grid {
        let labels = self
            .pixels
            .iter()
            .map(|&p| match p {
                0 => CellLabel::Unresolved,
                p => CellLabel::Basin {
                    attractor: p as u32 - 1,
                    iters: 0,
                },
            })
            .collect();
        Grid::from_labels(bbox, self.width, self.height, labels)
    }

    pub fn write_pgm<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        write!(out, "P5\n{} {}\n65535\n", self.width, self.height)?;
        let mut row = Vec::with_capacity(self.width * 2);
        for j in (0..self.height).rev() {
            row.clear();
            for &p in &self.pixels[j * self.width..(j + 1) * self.width] {
                row.extend_from_slice(&p.to_be_bytes());
            }
            out.write_all(&row)?;
        }
        out.flush()
    }

    pub fn read_pgm<R: Read>(mut input: R) -> Result<Self, FormatError> {
        let mut bytes = Vec::new();
        input.read_to_end(&mut bytes)?;
        let mut pos = 0;
        let mut fields = Vec::new();
        while fields.len() < 4 {
            while pos < bytes.len() && (bytes[pos].is_ascii_whitespace() || bytes[pos] == b'#') {
                if bytes[pos] == b'#' {
                    while pos < bytes.len() && bytes[pos] != b'\n' {
                        pos += 1;
                    }
                } else {
                    pos += 1;
                }
            }
            let start = pos;
            while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if start == pos {
                return Err(FormatError::Raster("truncated header".into()));
            }
            fields.push(String::from_utf8_lossy(&bytes[start..pos]).into_owned());
        }
        // exactly one whitespace byte separates the header from the samples
        pos += 1;
        if fields[0] != "P5" {
            return Err(FormatError::Raster(format!("expected P5, found {}", fields[0])));
        }
        let parse = |s: &str, what: &str| {
            s.parse::<usize>()
                .map_err(|_| FormatError::Raster(format!("bad {what}: {s}")))
        };
        let width = parse(&fields[1], "width")?;
        let height = parse(&fields[2], "height")?;
        if parse(&fields[3], "maxval")? != 65535 {
            return Err(FormatError::Raster("expected 16-bit samples (maxval 65535)".into()));
        }
        let data = bytes.get(pos..).unwrap_or(&[]);
        if data.len() != width * height * 2 {
            return Err(FormatError::Raster(format!(
                "expected {} sample bytes, found {}",
                width * height * 2,
                data.len()
            )));
        }
        let mut pixels = vec![0u16; width * height];
        for (r, chunk) in data.chunks_exact(width * 2).enumerate() {
            let j = height - 1 - r;
            for (i, b) in chunk.chunks_exact(2).enumerate() {
                pixels[j * width + i] = u16::from_be_bytes([b[0], b[1]]);
            }
        }
        Ok(Self { width, height, pixels })
    }
}

pub fn sidecar_path(pgm: &Path) -> PathBuf {
    pgm.with_extension("json")
}

pub fn write_raster(pgm: &Path, image: &RasterImage, header: &RasterHeader) -> Result<(), FormatError> {
    image.write_pgm(BufWriter::new(File::create(pgm)?))?;
    let json = serde_json::to_string_pretty(header).map_err(|e| FormatError::Raster(e.to_string()))?;
    std::fs::write(sidecar_path(pgm), json + "\n")?;
    Ok(())
}

pub fn read_raster(pgm: &Path) -> Result<(RasterImage, RasterHeader), FormatError> {
    let image = RasterImage::read_pgm(BufReader::new(File::open(pgm)?))?;
    let text = std::fs::read_to_string(sidecar_path(pgm))?;
    let header: RasterHeader = serde_json::from_str(&text).map_err(|e| FormatError::Raster(e.to_string()))?;
    if header.width != image.width || header.height != image.height {
        return Err(FormatError::Raster("sidecar size does not match image".into()));
    }
    Ok((image, header))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::components::label_components;
    use crate::generators::carpet::carpet_raster;

    #[test]
    fn pgm_round_trip_is_bit_exact() {
        let g = carpet_raster(2, 18).unwrap();
        let m = label_components(&g);
        let (img, quantized) = RasterImage::from_components(&m);
        assert!(!quantized);
        let mut buf = Vec::new();
        img.write_pgm(&mut buf).unwrap();
        assert!(buf.starts_with(b"P5\n18 18\n65535\n"));
        let back = RasterImage::read_pgm(&buf[..]).unwrap();
        assert_eq!(back, img);
        let mut again = Vec::new();
        back.write_pgm(&mut again).unwrap();
        assert_eq!(again, buf);
        // relabelling the re-imported raster recovers the same partition
        let m2 = label_components(&back.to_grid(g.bbox));
        assert_eq!(m2.len(), m.len());
        for j in 0..18 {
            for i in 0..18 {
                assert_eq!(m2.component_at(i, j), m.component_at(i, j));
            }
        }
    }

    #[test]
    fn rejects_malformed_input() {
        assert!(RasterImage::read_pgm(&b"P2\n1 1\n65535\n00"[..]).is_err());
        assert!(RasterImage::read_pgm(&b"P5\n2 2\n65535\n\0\0"[..]).is_err());
        assert!(RasterImage::read_pgm(&b"P5\n2"[..]).is_err());
    }
}
