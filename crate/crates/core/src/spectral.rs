//! Hyperspectral cubes to spectral-word corpora: white-reference
//! normalization, band cropping, block aggregation, discretization into
//! (band, reflectance-bin) words, and the signature-level co-occurrence
//! counts feeding the dependency matrix.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::corpus::{Corpus, SparseDocument, Vocabulary};
use crate::depmat::CooccurrenceCounts;
use crate::error::{Error, Result};

const CUBE_MAGIC: &[u8; 4] = b"HSC1";

/// H x W x B reflectance cube with per-band wavelengths in nm.
#[derive(Debug, Clone, PartialEq)]
pub struct HyperCube {
    height: usize,
    width: usize,
    bands: Vec<f64>,
    /// Band-fastest layout: index (y * width + x) * B + b.
    values: Vec<f64>,
}

impl HyperCube {
    pub fn new(height: usize, width: usize, bands: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if bands.is_empty() {
            return Err(Error::argument("cube needs at least one band"));
        }
        for &b in &bands {
            if !b.is_finite() {
                return Err(Error::argument(format!("non-finite wavelength {b}")));
            }
        }
        for pair in bands.windows(2) {
            if pair[1] <= pair[0] {
                return Err(Error::argument(
                    "band wavelengths must be strictly increasing",
                ));
            }
        }
        if values.len() != height * width * bands.len() {
            return Err(Error::shape(format!(
                "{} values for a {height}x{width}x{} cube",
                values.len(),
                bands.len()
            )));
        }
        for &v in &values {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::argument(format!(
                    "reflectance values must be finite and >= 0, got {v}"
                )));
            }
        }
        Ok(HyperCube {
            height,
            width,
            bands,
            values,
        })
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn bands(&self) -> &[f64] {
        &self.bands
    }

    pub fn num_bands(&self) -> usize {
        self.bands.len()
    }

    pub fn value(&self, y: usize, x: usize, b: usize) -> f64 {
        self.values[(y * self.width + x) * self.bands.len() + b]
    }

    fn pixel(&self, y: usize, x: usize) -> &[f64] {
        let b = self.bands.len();
        let start = (y * self.width + x) * b;
        &self.values[start..start + b]
    }

    /// Binary cube file: magic `HSC1`, u32 LE height, width, band count,
    /// then the wavelengths as f64 LE and the reflectances as f32 LE in
    /// band-fastest order.
    pub fn save(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut out = BufWriter::new(file);
        let io_err = |e| Error::io(path, e);
        out.write_all(CUBE_MAGIC).map_err(io_err)?;
        for dim in [self.height as u32, self.width as u32, self.bands.len() as u32] {
            out.write_all(&dim.to_le_bytes()).map_err(io_err)?;
        }
        for &b in &self.bands {
            out.write_all(&b.to_le_bytes()).map_err(io_err)?;
        }
        for &v in &self.values {
            out.write_all(&(v as f32).to_le_bytes()).map_err(io_err)?;
        }
        out.flush().map_err(io_err)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let mut input = BufReader::new(file);
        let io_err = |e| Error::io(path, e);
        let format_err = |msg: &str| Error::Format {
            path: path.to_path_buf(),
            msg: msg.into(),
        };

        let mut magic = [0u8; 4];
        input.read_exact(&mut magic).map_err(io_err)?;
        if &magic != CUBE_MAGIC {
            return Err(format_err("bad magic, not a cube file"));
        }
        let mut u32_buf = [0u8; 4];
        let mut read_u32 = |input: &mut BufReader<File>| -> Result<u32> {
            input.read_exact(&mut u32_buf).map_err(io_err)?;
            Ok(u32::from_le_bytes(u32_buf))
        };
        let height = read_u32(&mut input)? as usize;
        let width = read_u32(&mut input)? as usize;
        let num_bands = read_u32(&mut input)? as usize;
        if num_bands == 0 {
            return Err(format_err("cube has zero bands"));
        }

        let mut bands = Vec::with_capacity(num_bands);
        let mut f64_buf = [0u8; 8];
        for _ in 0..num_bands {
            input.read_exact(&mut f64_buf).map_err(io_err)?;
            bands.push(f64::from_le_bytes(f64_buf));
        }
        let count = height * width * num_bands;
        let mut values = Vec::with_capacity(count);
        let mut f32_buf = [0u8; 4];
        for _ in 0..count {
            input.read_exact(&mut f32_buf).map_err(io_err)?;
            values.push(f32::from_le_bytes(f32_buf) as f64);
        }
        if input.read(&mut [0u8; 1]).map_err(io_err)? != 0 {
            return Err(format_err("trailing bytes after cube payload"));
        }
        HyperCube::new(height, width, bands, values)
    }
}

/// Keep/drop map over the cube's pixel grid (true = keep).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PixelMask {
    height: usize,
    width: usize,
    keep: Vec<bool>,
}

impl PixelMask {
    pub fn new(height: usize, width: usize, keep: Vec<bool>) -> Result<Self> {
        if keep.len() != height * width {
            return Err(Error::shape(format!(
                "{} flags for a {height}x{width} mask",
                keep.len()
            )));
        }
        Ok(PixelMask {
            height,
            width,
            keep,
        })
    }

    pub fn all(height: usize, width: usize) -> Self {
        PixelMask {
            height,
            width,
            keep: vec![true; height * width],
        }
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn keep(&self, y: usize, x: usize) -> bool {
        self.keep[y * self.width + x]
    }

    pub fn kept(&self) -> usize {
        self.keep.iter().filter(|&&k| k).count()
    }

    /// Tiles the mask like [`aggregate_blocks`]: an aggregated pixel is kept
    /// only when every pixel of its tile is kept.
    pub fn aggregate_blocks(&self, block: usize) -> Result<PixelMask> {
        if block == 0 {
            return Err(Error::argument("block size must be >= 1"));
        }
        let oh = self.height / block;
        let ow = self.width / block;
        let mut keep = Vec::with_capacity(oh * ow);
        for ty in 0..oh {
            for tx in 0..ow {
                let mut all = true;
                'tile: for dy in 0..block {
                    for dx in 0..block {
                        if !self.keep(ty * block + dy, tx * block + dx) {
                            all = false;
                            break 'tile;
                        }
                    }
                }
                keep.push(all);
            }
        }
        PixelMask::new(oh, ow, keep)
    }

    /// PBM-style text grid: `P1`, then `width height`, then rows of 0/1
    /// where 1 marks a kept pixel.
    pub fn save(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut out = BufWriter::new(file);
        writeln!(out, "P1").map_err(|e| Error::io(path, e))?;
        writeln!(out, "{} {}", self.width, self.height).map_err(|e| Error::io(path, e))?;
        for y in 0..self.height {
            let row: Vec<&str> = (0..self.width)
                .map(|x| if self.keep(y, x) { "1" } else { "0" })
                .collect();
            writeln!(out, "{}", row.join(" ")).map_err(|e| Error::io(path, e))?;
        }
        out.flush().map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let mut tokens = Vec::new();
        for line in BufReader::new(file).lines() {
            let line = line.map_err(|e| Error::io(path, e))?;
            tokens.extend(line.split_whitespace().map(String::from));
        }
        let format_err = |msg: String| Error::Format {
            path: path.to_path_buf(),
            msg,
        };
        if tokens.first().map(String::as_str) != Some("P1") {
            return Err(format_err("mask file must start with P1".into()));
        }
        if tokens.len() < 3 {
            return Err(format_err("truncated mask header".into()));
        }
        let width: usize = tokens[1]
            .parse()
            .map_err(|_| format_err(format!("bad width {:?}", tokens[1])))?;
        let height: usize = tokens[2]
            .parse()
            .map_err(|_| format_err(format!("bad height {:?}", tokens[2])))?;
        let bits = &tokens[3..];
        if bits.len() != width * height {
            return Err(format_err(format!(
                "expected {} mask bits, found {}",
                width * height,
                bits.len()
            )));
        }
        let keep = bits
            .iter()
            .map(|t| match t.as_str() {
                "1" => Ok(true),
                "0" => Ok(false),
                other => Err(format_err(format!("mask bit must be 0 or 1, got {other:?}"))),
            })
            .collect::<Result<Vec<bool>>>()?;
        PixelMask::new(height, width, keep)
    }
}

/// White-reference spectrum: one positive float per line, one per band.
pub fn load_white_reference(path: &Path) -> Result<Vec<f64>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let v: f64 = line.trim().parse().map_err(|_| Error::Parse {
            path: path.to_path_buf(),
            line: i + 1,
            msg: format!("bad reference value {line:?}"),
        })?;
        out.push(v);
    }
    Ok(out)
}

/// Divides every pixel's spectrum by the white-reference spectrum.
pub fn normalize_reflectance(cube: &HyperCube, reference: &[f64]) -> Result<HyperCube> {
    if reference.len() != cube.num_bands() {
        return Err(Error::argument(format!(
            "reference of length {} for {} bands",
            reference.len(),
            cube.num_bands()
        )));
    }
    for (b, &r) in reference.iter().enumerate() {
        if !r.is_finite() || r <= 0.0 {
            return Err(Error::argument(format!(
                "reference value for band {b} must be positive, got {r}"
            )));
        }
    }
    let nb = cube.num_bands();
    let values = cube
        .values
        .iter()
        .enumerate()
        .map(|(i, &v)| v / reference[i % nb])
        .collect();
    HyperCube::new(cube.height, cube.width, cube.bands.clone(), values)
}

/// Keeps the bands with lo_nm <= wavelength <= hi_nm.
pub fn crop_bands(cube: &HyperCube, lo_nm: f64, hi_nm: f64) -> Result<HyperCube> {
    if !lo_nm.is_finite() || !hi_nm.is_finite() || lo_nm >= hi_nm {
        return Err(Error::argument(format!(
            "band range [{lo_nm}, {hi_nm}] is empty"
        )));
    }
    let keep: Vec<usize> = cube
        .bands
        .iter()
        .enumerate()
        .filter(|&(_, &b)| b >= lo_nm && b <= hi_nm)
        .map(|(i, _)| i)
        .collect();
    if keep.is_empty() {
        return Err(Error::argument(format!(
            "no bands inside [{lo_nm}, {hi_nm}] nm"
        )));
    }
    let bands: Vec<f64> = keep.iter().map(|&i| cube.bands[i]).collect();
    let mut values = Vec::with_capacity(cube.height * cube.width * keep.len());
    for y in 0..cube.height {
        for x in 0..cube.width {
            let pixel = cube.pixel(y, x);
            values.extend(keep.iter().map(|&i| pixel[i]));
        }
    }
    HyperCube::new(cube.height, cube.width, bands, values)
}

/// Replaces each non-overlapping block x block tile by its per-band mean;
/// trailing partial tiles are dropped.
pub fn aggregate_blocks(cube: &HyperCube, block: usize) -> Result<HyperCube> {
    if block == 0 {
        return Err(Error::argument("block size must be >= 1"));
    }
    if block == 1 {
        return Ok(cube.clone());
    }
    let oh = cube.height / block;
    let ow = cube.width / block;
    let nb = cube.num_bands();
    let mut values = Vec::with_capacity(oh * ow * nb);
    let norm = (block * block) as f64;
    for ty in 0..oh {
        for tx in 0..ow {
            let mut acc = vec![0.0f64; nb];
            for dy in 0..block {
                for dx in 0..block {
                    let pixel = cube.pixel(ty * block + dy, tx * block + dx);
                    for (a, &v) in acc.iter_mut().zip(pixel) {
                        *a += v;
                    }
                }
            }
            values.extend(acc.into_iter().map(|v| v / norm));
        }
    }
    HyperCube::new(oh, ow, cube.bands.clone(), values)
}

/// How a reflectance value maps to one of the R bins.
#[derive(Debug, Clone, PartialEq)]
pub enum Binning {
    /// Equal-width bins over a single global range.
    EqualWidth { lo: f64, hi: f64 },
    /// Equal-width bins over per-band ranges.
    PerBand(Vec<(f64, f64)>),
    /// Explicit global bin edges (length R - 1, ascending); values fall in
    /// the bin whose edge interval contains them.
    Edges(Vec<f64>),
}

/// Discretization descriptor: word id = band_index * R + bin_index, so the
/// vocabulary holds exactly Wl x R spectral words.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralWordSpec {
    pub wl: usize,
    pub r_bins: usize,
    pub band_lo: f64,
    pub band_hi: f64,
    pub binning: Binning,
}

impl SpectralWordSpec {
    /// Global equal-width bins (the default scheme).
    pub fn equal_width(cube: &HyperCube, r_bins: usize, lo: f64, hi: f64) -> Result<Self> {
        if r_bins == 0 {
            return Err(Error::argument("need at least one reflectance bin"));
        }
        if !lo.is_finite() || !hi.is_finite() || lo >= hi {
            return Err(Error::argument(format!(
                "reflectance range [{lo}, {hi}] is empty"
            )));
        }
        Ok(SpectralWordSpec {
            wl: cube.num_bands(),
            r_bins,
            band_lo: cube.bands[0],
            band_hi: *cube.bands.last().unwrap(),
            binning: Binning::EqualWidth { lo, hi },
        })
    }

    /// Equal-width bins over each band's observed min/max among kept pixels.
    pub fn per_band(cube: &HyperCube, mask: &PixelMask, r_bins: usize) -> Result<Self> {
        if r_bins == 0 {
            return Err(Error::argument("need at least one reflectance bin"));
        }
        check_mask(cube, mask)?;
        let nb = cube.num_bands();
        let mut ranges = vec![(f64::INFINITY, f64::NEG_INFINITY); nb];
        for y in 0..cube.height {
            for x in 0..cube.width {
                if !mask.keep(y, x) {
                    continue;
                }
                for (b, &v) in cube.pixel(y, x).iter().enumerate() {
                    ranges[b].0 = ranges[b].0.min(v);
                    ranges[b].1 = ranges[b].1.max(v);
                }
            }
        }
        for r in ranges.iter_mut() {
            if !r.0.is_finite() || r.0 == r.1 {
                // Constant or empty band: widen so binning stays defined.
                *r = (r.0.min(0.0), r.1.max(r.0 + 1.0));
            }
        }
        Ok(SpectralWordSpec {
            wl: nb,
            r_bins,
            band_lo: cube.bands[0],
            band_hi: *cube.bands.last().unwrap(),
            binning: Binning::PerBand(ranges),
        })
    }

    /// Global quantile bins over the kept pixels' pooled reflectances.
    pub fn quantile(cube: &HyperCube, mask: &PixelMask, r_bins: usize) -> Result<Self> {
        if r_bins == 0 {
            return Err(Error::argument("need at least one reflectance bin"));
        }
        check_mask(cube, mask)?;
        let mut pool = Vec::new();
        for y in 0..cube.height {
            for x in 0..cube.width {
                if mask.keep(y, x) {
                    pool.extend_from_slice(cube.pixel(y, x));
                }
            }
        }
        if pool.is_empty() {
            return Err(Error::argument("no kept pixels to take quantiles from"));
        }
        pool.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let edges: Vec<f64> = (1..r_bins)
            .map(|q| pool[(q * pool.len() / r_bins).min(pool.len() - 1)])
            .collect();
        Ok(SpectralWordSpec {
            wl: cube.num_bands(),
            r_bins,
            band_lo: cube.bands[0],
            band_hi: *cube.bands.last().unwrap(),
            binning: Binning::Edges(edges),
        })
    }

    pub fn vocab_size(&self) -> usize {
        self.wl * self.r_bins
    }

    fn bin_of(&self, band: usize, value: f64) -> u32 {
        let r = self.r_bins as f64;
        let bin = match &self.binning {
            Binning::EqualWidth { lo, hi } => ((value - lo) / (hi - lo) * r).floor(),
            Binning::PerBand(ranges) => {
                let (lo, hi) = ranges[band];
                ((value - lo) / (hi - lo) * r).floor()
            }
            Binning::Edges(edges) => edges.partition_point(|&e| e <= value) as f64,
        };
        (bin.max(0.0) as u32).min(self.r_bins as u32 - 1)
    }

    pub fn word_id(&self, band: usize, value: f64) -> u32 {
        band as u32 * self.r_bins as u32 + self.bin_of(band, value)
    }

    /// Vocabulary naming every (band, bin) pair by its wavelength.
    pub fn vocabulary(&self, bands: &[f64]) -> Result<Vocabulary> {
        if bands.len() != self.wl {
            return Err(Error::shape(format!(
                "{} wavelengths for Wl = {}",
                bands.len(),
                self.wl
            )));
        }
        let mut terms = Vec::with_capacity(self.vocab_size());
        for &nm in bands {
            for r in 0..self.r_bins {
                terms.push(format!("{nm:.2}nm/r{r}"));
            }
        }
        Vocabulary::new(terms)
    }
}

fn check_mask(cube: &HyperCube, mask: &PixelMask) -> Result<()> {
    if mask.height() != cube.height || mask.width() != cube.width {
        return Err(Error::argument(format!(
            "mask {}x{} does not match cube {}x{}",
            mask.height(),
            mask.width(),
            cube.height,
            cube.width
        )));
    }
    Ok(())
}

/// One document per kept pixel; each document holds exactly one word per
/// band (count 1), in ascending id order by construction.
pub fn discretize(cube: &HyperCube, spec: &SpectralWordSpec, mask: &PixelMask) -> Result<Corpus> {
    check_mask(cube, mask)?;
    if spec.wl != cube.num_bands() {
        return Err(Error::argument(format!(
            "spec expects {} bands, cube has {}",
            spec.wl,
            cube.num_bands()
        )));
    }
    let mut documents = Vec::with_capacity(mask.kept());
    for y in 0..cube.height {
        for x in 0..cube.width {
            if !mask.keep(y, x) {
                continue;
            }
            let entries: Vec<(u32, u32)> = cube
                .pixel(y, x)
                .iter()
                .enumerate()
                .map(|(b, &v)| (spec.word_id(b, v), 1))
                .collect();
            documents.push(SparseDocument::new(entries)?);
        }
    }
    if documents.is_empty() {
        return Err(Error::argument("mask keeps no pixels"));
    }
    Corpus::new(documents, spec.vocabulary(&cube.bands)?)
}

/// Co-occurrences inside each discretized signature: the words of adjacent
/// bands are paired when their reflectance bins differ by at most one
/// (`bin_constrained`), or unconditionally when the constraint is off.
pub fn spectral_cooccurrences(
    corpus: &Corpus,
    spec: &SpectralWordSpec,
    bin_constrained: bool,
) -> Result<CooccurrenceCounts> {
    if corpus.vocab_size() != spec.vocab_size() {
        return Err(Error::argument(format!(
            "corpus vocabulary {} does not match spec vocabulary {}",
            corpus.vocab_size(),
            spec.vocab_size()
        )));
    }
    let r = spec.r_bins as u32;
    let mut counts = CooccurrenceCounts::new(spec.vocab_size());
    for (d, doc) in corpus.documents().iter().enumerate() {
        let entries = doc.entries();
        if entries.len() != spec.wl {
            return Err(Error::argument(format!(
                "document {d} has {} words, expected one per band ({})",
                entries.len(),
                spec.wl
            )));
        }
        for (b, &(word, count)) in entries.iter().enumerate() {
            if count != 1 || word / r != b as u32 {
                return Err(Error::argument(format!(
                    "document {d} is not a discretized signature at band {b}"
                )));
            }
        }
        for b in 0..spec.wl - 1 {
            let (w0, _) = entries[b];
            let (w1, _) = entries[b + 1];
            let r0 = w0 % r;
            let r1 = w1 % r;
            if !bin_constrained || r0.abs_diff(r1) <= 1 {
                counts.add_pair(w0, w1);
            }
        }
    }
    Ok(counts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn grid_cube(height: usize, width: usize, bands: Vec<f64>, fill: f64) -> HyperCube {
        let n = height * width * bands.len();
        HyperCube::new(height, width, bands, vec![fill; n]).unwrap()
    }

    #[test]
    fn cube_validation() {
        assert!(HyperCube::new(1, 1, vec![500.0, 400.0], vec![0.0, 0.0]).is_err());
        assert!(HyperCube::new(1, 1, vec![400.0], vec![0.1, 0.2]).is_err());
        assert!(HyperCube::new(1, 1, vec![400.0], vec![-0.1]).is_err());
        assert!(HyperCube::new(2, 2, vec![400.0], vec![0.0; 4]).is_ok());
    }

    #[test]
    fn normalization_by_reference() {
        let bands = vec![400.0, 500.0];
        let cube = HyperCube::new(1, 2, bands.clone(), vec![2.0, 4.0, 1.0, 2.0]).unwrap();
        let ones = normalize_reflectance(&cube, &[1.0, 1.0]).unwrap();
        assert_eq!(ones, cube);

        let normalized = normalize_reflectance(&cube, &[2.0, 4.0]).unwrap();
        assert_abs_diff_eq!(normalized.value(0, 0, 0), 1.0, epsilon = 0.0);
        assert_abs_diff_eq!(normalized.value(0, 0, 1), 1.0, epsilon = 0.0);
        assert_abs_diff_eq!(normalized.value(0, 1, 0), 0.5, epsilon = 0.0);
        assert_abs_diff_eq!(normalized.value(0, 1, 1), 0.5, epsilon = 0.0);

        assert!(normalize_reflectance(&cube, &[1.0]).is_err());
        assert!(normalize_reflectance(&cube, &[1.0, 0.0]).is_err());
    }

    #[test]
    fn band_cropping() {
        let cube = HyperCube::new(
            1,
            1,
            vec![400.0, 500.0, 600.0, 700.0],
            vec![0.1, 0.2, 0.3, 0.4],
        )
        .unwrap();
        let same = crop_bands(&cube, 400.0, 700.0).unwrap();
        assert_eq!(same, cube);

        let mid = crop_bands(&cube, 450.0, 650.0).unwrap();
        assert_eq!(mid.bands(), &[500.0, 600.0]);
        assert_abs_diff_eq!(mid.value(0, 0, 0), 0.2, epsilon = 1e-7);

        assert!(crop_bands(&cube, 800.0, 900.0).is_err());
        assert!(crop_bands(&cube, 700.0, 400.0).is_err());
    }

    #[test]
    fn paper_band_grids() {
        // An exact 4 nm grid spanning 394-891 nm has 125 bands; the crop to
        // [470, 750] keeps the 71 grid points 470, 474, ..., 750.
        let bands: Vec<f64> = (0..125).map(|i| 394.0 + 4.0 * i as f64).collect();
        let cube = grid_cube(1, 1, bands, 0.5);
        let cropped = crop_bands(&cube, 470.0, 750.0).unwrap();
        assert_eq!(cropped.num_bands(), 71);

        // The instrument grid is only approximately 4 nm; at 4.05 nm the
        // same crop yields the 69 retained bands reported for the real rig.
        let bands: Vec<f64> = (0..123).map(|i| 394.0 + 4.05 * i as f64).collect();
        assert!(*bands.last().unwrap() <= 891.0);
        let cube = grid_cube(1, 1, bands, 0.5);
        let cropped = crop_bands(&cube, 470.0, 750.0).unwrap();
        assert_eq!(cropped.num_bands(), 69);
        let spec = SpectralWordSpec::equal_width(&cropped, 50, 0.0, 1.2).unwrap();
        assert_eq!(spec.vocab_size(), 3450);
    }

    #[test]
    fn aggregation_means_and_drops_partial_tiles() {
        let cube = HyperCube::new(2, 2, vec![500.0], vec![0.0, 0.0, 1.0, 1.0]).unwrap();
        let agg = aggregate_blocks(&cube, 2).unwrap();
        assert_eq!((agg.height(), agg.width()), (1, 1));
        assert_abs_diff_eq!(agg.value(0, 0, 0), 0.5, epsilon = 0.0);

        let identity = aggregate_blocks(&cube, 1).unwrap();
        assert_eq!(identity, cube);

        let odd = grid_cube(5, 7, vec![500.0], 0.3);
        let agg = aggregate_blocks(&odd, 2).unwrap();
        assert_eq!((agg.height(), agg.width()), (2, 3));
        assert_abs_diff_eq!(agg.value(1, 2, 0), 0.3, epsilon = 1e-12);
    }

    #[test]
    fn discretize_bin_arithmetic() {
        // R = 2 over [0, 1]; reflectance 0.25 in band 3 maps to word 3*2+0.
        let bands = vec![400.0, 450.0, 500.0, 550.0];
        let mut values = vec![0.9; 4];
        values[3] = 0.25;
        let cube = HyperCube::new(1, 1, bands, values).unwrap();
        let spec = SpectralWordSpec::equal_width(&cube, 2, 0.0, 1.0).unwrap();
        let corpus = discretize(&cube, &spec, &PixelMask::all(1, 1)).unwrap();
        let doc = corpus.document(0);
        assert_eq!(doc.entries().len(), 4);
        assert_eq!(doc.entries()[3], (3 * 2, 1));
        // 0.9 in [0.5, 1) is the upper bin.
        assert_eq!(doc.entries()[0], (1, 1));
    }

    #[test]
    fn discretize_clamps_boundaries() {
        let cube = HyperCube::new(1, 2, vec![500.0], vec![1.0, 0.0]).unwrap();
        let spec = SpectralWordSpec::equal_width(&cube, 4, 0.0, 1.0).unwrap();
        let corpus = discretize(&cube, &spec, &PixelMask::all(1, 2)).unwrap();
        // Exactly at the upper boundary: clamped into the last bin.
        assert_eq!(corpus.document(0).entries()[0], (3, 1));
        assert_eq!(corpus.document(1).entries()[0], (0, 1));
    }

    #[test]
    fn discretize_respects_mask_and_total_words() {
        let cube = grid_cube(2, 2, vec![400.0, 500.0, 600.0], 0.4);
        let mask = PixelMask::new(2, 2, vec![true, false, false, true]).unwrap();
        let spec = SpectralWordSpec::equal_width(&cube, 5, 0.0, 1.2).unwrap();
        let corpus = discretize(&cube, &spec, &mask).unwrap();
        assert_eq!(corpus.num_documents(), 2);
        for doc in corpus.documents() {
            assert_eq!(doc.total(), 3);
            assert_eq!(doc.distinct(), 3);
        }
        let wrong_mask = PixelMask::all(3, 2);
        assert!(discretize(&cube, &spec, &wrong_mask).is_err());
    }

    #[test]
    fn aggregation_then_binning_differs_from_binning_then_aggregation() {
        // Averaging 0.1 and 0.9 before binning lands mid-range; binning
        // first puts the pixels in opposite extreme bins. The orders must
        // not be silently interchangeable.
        let cube = HyperCube::new(2, 2, vec![500.0], vec![0.1, 0.1, 0.9, 0.9]).unwrap();
        let spec = SpectralWordSpec::equal_width(&cube, 2, 0.0, 1.0).unwrap();
        let direct = discretize(&cube, &spec, &PixelMask::all(2, 2)).unwrap();
        let bins: Vec<u32> = direct
            .documents()
            .iter()
            .map(|d| d.entries()[0].0)
            .collect();
        assert_eq!(bins, vec![0, 0, 1, 1]);

        let aggregated = aggregate_blocks(&cube, 2).unwrap();
        let spec2 = SpectralWordSpec::equal_width(&aggregated, 2, 0.0, 1.0).unwrap();
        let after = discretize(&aggregated, &spec2, &PixelMask::all(1, 1)).unwrap();
        assert_eq!(after.num_documents(), 1);
        assert_eq!(after.document(0).entries()[0].0, 1, "0.5 rounds up to bin 1");
    }

    #[test]
    fn per_band_and_quantile_binning_modes() {
        let cube = HyperCube::new(
            1,
            4,
            vec![500.0, 600.0],
            vec![0.0, 10.0, 1.0, 20.0, 2.0, 30.0, 3.0, 40.0],
        )
        .unwrap();
        let mask = PixelMask::all(1, 4);
        let per_band = SpectralWordSpec::per_band(&cube, &mask, 2).unwrap();
        let corpus = discretize(&cube, &per_band, &mask).unwrap();
        // Band 0 spans [0, 3], band 1 spans [10, 40]; each band's own range
        // decides the bin.
        assert_eq!(corpus.document(0).entries()[0].0, 0);
        assert_eq!(corpus.document(3).entries()[0].0, 1);
        assert_eq!(corpus.document(0).entries()[1].0, 2);
        assert_eq!(corpus.document(3).entries()[1].0, 3);

        let quant = SpectralWordSpec::quantile(&cube, &mask, 4).unwrap();
        if let Binning::Edges(edges) = &quant.binning {
            assert_eq!(edges.len(), 3);
            for pair in edges.windows(2) {
                assert!(pair[0] <= pair[1]);
            }
        } else {
            panic!("expected explicit edges");
        }
    }

    #[test]
    fn signature_cooccurrence_neighborhood() {
        // Single band: nothing to pair.
        let cube1 = grid_cube(1, 1, vec![500.0], 0.2);
        let spec1 = SpectralWordSpec::equal_width(&cube1, 3, 0.0, 1.0).unwrap();
        let corpus1 = discretize(&cube1, &spec1, &PixelMask::all(1, 1)).unwrap();
        let counts = spectral_cooccurrences(&corpus1, &spec1, true).unwrap();
        assert_eq!(counts.total(), 0);

        // Two bands in the same bin: exactly one pair.
        let cube2 = HyperCube::new(1, 1, vec![500.0, 600.0], vec![0.2, 0.2]).unwrap();
        let spec2 = SpectralWordSpec::equal_width(&cube2, 3, 0.0, 1.0).unwrap();
        let corpus2 = discretize(&cube2, &spec2, &PixelMask::all(1, 1)).unwrap();
        let counts = spectral_cooccurrences(&corpus2, &spec2, true).unwrap();
        let w0 = spec2.word_id(0, 0.2);
        let w1 = spec2.word_id(1, 0.2);
        assert_eq!(counts.get(w0, w1), 1);
        assert_eq!(counts.get(w1, w0), 1);
        assert_eq!(counts.total(), 2);

        // Distant bins are dropped unless the constraint is lifted.
        let cube3 = HyperCube::new(1, 1, vec![500.0, 600.0], vec![0.05, 0.95]).unwrap();
        let spec3 = SpectralWordSpec::equal_width(&cube3, 10, 0.0, 1.0).unwrap();
        let corpus3 = discretize(&cube3, &spec3, &PixelMask::all(1, 1)).unwrap();
        assert_eq!(
            spectral_cooccurrences(&corpus3, &spec3, true).unwrap().total(),
            0
        );
        assert_eq!(
            spectral_cooccurrences(&corpus3, &spec3, false).unwrap().total(),
            2
        );

        // A plain bag-of-words corpus is rejected.
        let bad = crate::corpus::identity_corpus(spec2.vocab_size()).unwrap();
        assert!(spectral_cooccurrences(&bad, &spec2, true).is_err());
    }

    #[test]
    fn cube_file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cube.hsc");
        let values: Vec<f64> = (0..2 * 3 * 2).map(|i| i as f64 * 0.125).collect();
        let cube = HyperCube::new(2, 3, vec![450.5, 600.25], values).unwrap();
        cube.save(&path).unwrap();
        let loaded = HyperCube::load(&path).unwrap();
        assert_eq!(loaded, cube);

        std::fs::write(&path, b"nope").unwrap();
        assert!(HyperCube::load(&path).is_err());
    }

    #[test]
    fn mask_file_round_trip_and_aggregation() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("mask.pbm");
        let mask = PixelMask::new(2, 3, vec![true, false, true, true, true, false]).unwrap();
        mask.save(&path).unwrap();
        let loaded = PixelMask::load(&path).unwrap();
        assert_eq!(loaded, mask);

        let big = PixelMask::new(4, 4, {
            let mut keep = vec![true; 16];
            keep[5] = false;
            keep
        })
        .unwrap();
        let agg = big.aggregate_blocks(2).unwrap();
        assert!(!agg.keep(0, 1) || agg.keep(0, 1));
        assert!(agg.keep(0, 1));
        assert!(!agg.keep(0, 0), "tile containing a dropped pixel is dropped");
    }
}
