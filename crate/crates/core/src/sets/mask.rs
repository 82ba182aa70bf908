use std::path::Path;

use serde::{Deserialize, Serialize};

use super::AnalyticSet;
use crate::error::{Error, Result};
use crate::geometry::{convex_hull, BBox, NeighborIndex, Point};

/// Binary raster. Pixel `(col, row)` covers the closed square
/// `[col*s, (col+1)*s] x [row*s, (row+1)*s]` with `s = pixel_size`; rows are
/// stored top to bottom as read from the file.
#[derive(Debug, Clone, PartialEq)]
pub struct MaskSet {
    width: usize,
    height: usize,
    bits: Vec<bool>,
    pixel_size: f64,
    on: Vec<(u32, u32)>,
    bbox: BBox,
    label: String,
}

impl MaskSet {
    pub fn new(width: usize, height: usize, bits: Vec<bool>, pixel_size: f64) -> Result<Self> {
        if bits.len() != width * height {
            return Err(Error::DimensionMismatch(format!(
                "{} bits for a {width}x{height} mask",
                bits.len()
            )));
        }
        if !(pixel_size > 0.0 && pixel_size.is_finite()) {
            return Err(Error::InvalidConfig(format!("pixel size must be positive, got {pixel_size}")));
        }
        let mut on = Vec::new();
        for row in 0..height {
            for col in 0..width {
                if bits[row * width + col] {
                    on.push((col as u32, row as u32));
                }
            }
        }
        if on.is_empty() {
            return Err(Error::EmptyMask);
        }
        let (mut c0, mut c1, mut r0, mut r1) = (u32::MAX, 0, u32::MAX, 0);
        for &(c, r) in &on {
            c0 = c0.min(c);
            c1 = c1.max(c);
            r0 = r0.min(r);
            r1 = r1.max(r);
        }
        let bbox = BBox::new(
            Point::new(c0 as f64 * pixel_size, r0 as f64 * pixel_size),
            Point::new((c1 + 1) as f64 * pixel_size, (r1 + 1) as f64 * pixel_size),
        );
        Ok(MaskSet {
            width,
            height,
            bits,
            pixel_size,
            on,
            bbox,
            label: format!("mask {width}x{height}"),
        })
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixel_size(&self) -> f64 {
        self.pixel_size
    }

    pub fn get(&self, col: usize, row: usize) -> bool {
        col < self.width && row < self.height && self.bits[row * self.width + col]
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// Foreground pixels as `(col, row)`, row-major.
    pub fn foreground(&self) -> &[(u32, u32)] {
        &self.on
    }

    pub fn pixel_min_corner(&self, col: u32, row: u32) -> Point {
        Point::new(col as f64 * self.pixel_size, row as f64 * self.pixel_size)
    }

    /// Distance from `p` to the closed pixel square.
    fn pixel_distance(&self, p: Point, col: u32, row: u32) -> f64 {
        let lo = self.pixel_min_corner(col, row);
        let s = self.pixel_size;
        let dx = (lo.x - p.x).max(0.0).max(p.x - (lo.x + s));
        let dy = (lo.y - p.y).max(0.0).max(p.y - (lo.y + s));
        (dx * dx + dy * dy).sqrt()
    }
}

impl AnalyticSet for MaskSet {
    fn contains(&self, p: Point) -> bool {
        if !self.bbox.contains(p) {
            return false;
        }
        let fx = p.x / self.pixel_size;
        let fy = p.y / self.pixel_size;
        let (cx, cy) = (fx.floor(), fy.floor());
        // a point on a pixel edge belongs to the pixels on both sides
        let cols: &[f64] = if fx == cx { &[cx, cx - 1.0] } else { &[cx] };
        let rows: &[f64] = if fy == cy { &[cy, cy - 1.0] } else { &[cy] };
        cols.iter().any(|&c| {
            rows.iter()
                .any(|&r| c >= 0.0 && r >= 0.0 && self.get(c as usize, r as usize))
        })
    }

    fn bbox(&self) -> BBox {
        self.bbox
    }

    fn area(&self) -> Option<f64> {
        Some(self.on.len() as f64 * self.pixel_size * self.pixel_size)
    }

    fn label(&self) -> String {
        self.label.clone()
    }
}

/// Pixel-count symmetric difference times the pixel area.
pub fn symmetric_difference_area(a: &MaskSet, b: &MaskSet) -> Result<f64> {
    if a.width != b.width || a.height != b.height || a.pixel_size != b.pixel_size {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} (pixel {}) vs {}x{} (pixel {})",
            a.width, a.height, a.pixel_size, b.width, b.height, b.pixel_size
        )));
    }
    let differ = a.bits.iter().zip(&b.bits).filter(|(x, y)| x != y).count();
    Ok(differ as f64 * a.pixel_size * a.pixel_size)
}

/// Exact or grid-evaluated `D` and `M` of a mask.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaskMeasures {
    /// `D`, with the supremum taken over a half-pixel lattice.
    pub d: f64,
    /// `M`, exact.
    pub m: f64,
    pub area: f64,
    pub hull_area: f64,
    pub diameter: f64,
    /// Largest distance from a hull grid point to the mask.
    pub max_gap: f64,
}

/// `M` is exact: the hull of the pixel corners minus the pixel area. `D`
/// maximises the distance to the mask over a half-pixel lattice inside the
/// hull, so it can fall short of the true supremum by at most a quarter of
/// a pixel diagonal.
pub fn mask_measures(mask: &MaskSet) -> Result<MaskMeasures> {
    let s = mask.pixel_size;
    // the hull only needs the outermost corners of each row
    let mut corners = Vec::new();
    let mut row_start = 0;
    let on = &mask.on;
    while row_start < on.len() {
        let row = on[row_start].1;
        let mut row_end = row_start;
        while row_end + 1 < on.len() && on[row_end + 1].1 == row {
            row_end += 1;
        }
        for &(col, r) in [on[row_start], on[row_end]].iter() {
            let lo = mask.pixel_min_corner(col, r);
            corners.extend([
                lo,
                Point::new(lo.x + s, lo.y),
                Point::new(lo.x, lo.y + s),
                Point::new(lo.x + s, lo.y + s),
            ]);
        }
        row_start = row_end + 1;
    }
    let hull = convex_hull(&corners)?;
    let hull_area = hull.area();
    let area = mask.area().expect("mask area");
    let diameter = hull.diameter();

    let centers: Vec<Point> = on
        .iter()
        .map(|&(c, r)| mask.pixel_min_corner(c, r).add(Point::new(0.5 * s, 0.5 * s)))
        .collect();
    let index = NeighborIndex::new(&centers);
    let half_diag = 0.5 * s * 2f64.sqrt();
    let mut max_gap = 0.0f64;
    let bb = mask.bbox;
    let (k0, l0) = ((2.0 * bb.min.x / s).round() as usize, (2.0 * bb.min.y / s).round() as usize);
    let (k1, l1) = ((2.0 * bb.max.x / s).round() as usize, (2.0 * bb.max.y / s).round() as usize);
    for l in l0..=l1 {
        for k in k0..=k1 {
            let p = Point::new(k as f64 * 0.5 * s, l as f64 * 0.5 * s);
            if mask.contains(p) || !hull.contains(p) {
                continue;
            }
            let (_, dc) = index.nearest(p).expect("non-empty mask");
            let gap = index
                .within_radius(p, dc + half_diag)
                .into_iter()
                .map(|i| mask.pixel_distance(p, on[i].0, on[i].1))
                .fold(f64::INFINITY, f64::min);
            max_gap = max_gap.max(gap);
        }
    }
    Ok(MaskMeasures {
        d: max_gap / diameter,
        m: ((hull_area - area) / hull_area).max(0.0),
        area,
        hull_area,
        diameter,
        max_gap,
    })
}

fn threshold(v: u32) -> bool {
    v > 127
}

/// Parses a PGM image (`P2` or `P5`); values above 127 are foreground.
pub fn parse_pgm(bytes: &[u8], pixel_size: f64) -> Result<MaskSet> {
    let mut pos = 0usize;
    let mut token = |bytes: &[u8]| -> Result<String> {
        loop {
            while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if pos < bytes.len() && bytes[pos] == b'#' {
                while pos < bytes.len() && bytes[pos] != b'\n' {
                    pos += 1;
                }
                continue;
            }
            break;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() && bytes[pos] != b'#' {
            pos += 1;
        }
        if start == pos {
            return Err(Error::Parse("unexpected end of PGM header".into()));
        }
        Ok(String::from_utf8_lossy(&bytes[start..pos]).into_owned())
    };
    let magic = token(bytes)?;
    let number = |s: String| s.parse::<usize>().map_err(|_| Error::Parse(format!("bad PGM header field {s:?}")));
    let width = number(token(bytes)?)?;
    let height = number(token(bytes)?)?;
    let maxval = number(token(bytes)?)?;
    if maxval == 0 || maxval > 65535 {
        return Err(Error::Parse(format!("PGM maxval {maxval} out of range")));
    }
    let count = width * height;
    let bits: Vec<bool> = match magic.as_str() {
        "P2" => {
            let mut bits = Vec::with_capacity(count);
            for _ in 0..count {
                let v = token(bytes)?
                    .parse::<u32>()
                    .map_err(|_| Error::Parse("bad PGM pixel value".into()))?;
                bits.push(threshold(v));
            }
            bits
        }
        "P5" => {
            // exactly one whitespace byte separates the header from the raster
            let data = bytes.get(pos + 1..).unwrap_or(&[]);
            let wide = maxval > 255;
            let need = if wide { 2 * count } else { count };
            if data.len() < need {
                return Err(Error::Parse(format!("PGM raster has {} bytes, need {need}", data.len())));
            }
            if wide {
                data.chunks_exact(2)
                    .take(count)
                    .map(|b| threshold(u16::from_be_bytes([b[0], b[1]]) as u32))
                    .collect()
            } else {
                data[..count].iter().map(|&b| threshold(b as u32)).collect()
            }
        }
        other => return Err(Error::Parse(format!("not a PGM file (magic {other:?})"))),
    };
    MaskSet::new(width, height, bits, pixel_size)
}

/// Parses a grid of `0`/`1` values, one row per line, comma separated.
pub fn parse_mask_csv(text: &str, pixel_size: f64) -> Result<MaskSet> {
    let mut bits = Vec::new();
    let mut width = None;
    let mut height = 0;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let row: Vec<bool> = line
            .split(',')
            .map(|v| match v.trim() {
                "0" => Ok(false),
                "1" => Ok(true),
                other => Err(Error::Parse(format!("line {}: expected 0 or 1, got {other:?}", lineno + 1))),
            })
            .collect::<Result<_>>()?;
        match width {
            None => width = Some(row.len()),
            Some(w) if w != row.len() => {
                return Err(Error::Parse(format!("line {}: {} columns, expected {w}", lineno + 1, row.len())))
            }
            _ => {}
        }
        bits.extend(row);
        height += 1;
    }
    MaskSet::new(width.unwrap_or(0), height, bits, pixel_size)
}

/// Reads a PGM or CSV mask, sniffing the format from the first bytes.
pub fn load_mask(path: &Path, pixel_size: f64) -> Result<MaskSet> {
    let bytes = std::fs::read(path)?;
    let label = path.display().to_string();
    let mask = if bytes.starts_with(b"P2") || bytes.starts_with(b"P5") {
        parse_pgm(&bytes, pixel_size)?
    } else {
        let text = std::str::from_utf8(&bytes).map_err(|_| Error::Parse(format!("{label}: not UTF-8 text")))?;
        parse_mask_csv(text, pixel_size)?
    };
    Ok(mask.with_label(label))
}

/// Writes a binary `P5` PGM with values 0 and 255.
pub fn write_pgm(mask: &MaskSet, path: &Path) -> Result<()> {
    let mut out = format!("P5\n{} {}\n255\n", mask.width, mask.height).into_bytes();
    out.extend(mask.bits.iter().map(|&b| if b { 255u8 } else { 0 }));
    std::fs::write(path, out)?;
    Ok(())
}
