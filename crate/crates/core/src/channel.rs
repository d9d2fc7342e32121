//! Flat-fading channel matrices for the legitimate and eavesdropper links.
//!
//! Antennas are columns: a matrix with `rows` receive antennas and `cols`
//! transmit antennas. Public indices are 1-based.
//!
//! # Reproducibility
//!
//! [`generate_rayleigh`] draws from ChaCha8 (`rand_chacha` 0.9) seeded via
//! `SeedableRng::seed_from_u64`. Each entry consumes two 64-bit words,
//! `u1 = ((w1 >> 11) + 1) * 2^-53` in `(0, 1]` and `u2 = (w2 >> 11) * 2^-53`
//! in `[0, 1)`, and is mapped by Box-Muller to
//! `sqrt(-ln u1) * (cos 2πu2 + i sin 2πu2)`, so real and imaginary parts are
//! N(0, 1/2). Entries are drawn in row-major order.
//!
//! # File formats
//!
//! Text (`MIMOME-MAT v1`): a header line `MIMOME-MAT v1 <rows> <cols>`
//! followed by `rows * cols` lines `<re> <im>` in row-major order, each
//! printed with shortest round-trip precision.
//!
//! Binary (`MIMOME-MATB v1`): a 16-byte header made of the magic `b"MMTB"`,
//! the version, rows and cols (each a little-endian `u32`), then
//! `rows * cols` pairs of little-endian `f64` (re, im), row-major.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::error::{Error, Result};

pub const TEXT_MAGIC: &str = "MIMOME-MAT";
pub const BINARY_MAGIC: [u8; 4] = *b"MMTB";
pub const FORMAT_VERSION: u32 = 1;

/// Seed for the channel generator. Same seed, same matrix, bit for bit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct Seed(pub u64);

impl From<u64> for Seed {
    fn from(v: u64) -> Self {
        Seed(v)
    }
}

/// On-disk encoding for [`ChannelMatrix::store`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MatrixFormat {
    Text,
    Binary,
}

/// Dense complex matrix, row-major, every entry finite.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Complex64>,
}

impl ChannelMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Dimension(format!(
                "matrix must be at least 1x1, got {rows}x{cols}"
            )));
        }
        if entries.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                entries.len()
            )));
        }
        if let Some(pos) = entries
            .iter()
            .position(|z| !(z.re.is_finite() && z.im.is_finite()))
        {
            return Err(Error::Numerical(format!(
                "non-finite entry at row {}, column {}",
                pos / cols + 1,
                pos % cols + 1
            )));
        }
        Ok(ChannelMatrix {
            rows,
            cols,
            entries,
        })
    }

    pub fn zeros(rows: usize, cols: usize) -> Result<Self> {
        Self::new(rows, cols, vec![Complex64::new(0.0, 0.0); rows * cols])
    }

    /// Build from row slices; handy in tests.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != m) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        Self::new(n, m, rows.concat())
    }

    /// Real-valued convenience constructor.
    pub fn from_real(rows: usize, cols: usize, values: &[f64]) -> Result<Self> {
        Self::new(
            rows,
            cols,
            values.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    /// Entry at 0-based `(row, col)`.
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.cols + col]
    }

    /// Column at 0-based position `col`, as a contiguous vector.
    pub fn column(&self, col: usize) -> Vec<Complex64> {
        (0..self.rows).map(|r| self.get(r, col)).collect()
    }

    /// All columns, each contiguous.
    pub fn columns(&self) -> Vec<Vec<Complex64>> {
        (0..self.cols).map(|c| self.column(c)).collect()
    }

    /// Squared Euclidean norm of every column.
    pub fn column_norms_sqr(&self) -> Vec<f64> {
        let mut norms = vec![0.0; self.cols];
        for row in self.entries.chunks_exact(self.cols) {
            for (acc, z) in norms.iter_mut().zip(row) {
                *acc += z.norm_sqr();
            }
        }
        norms
    }

    /// Store in the given format.
    pub fn store<W: Write>(&self, sink: W, format: MatrixFormat) -> Result<()> {
        match format {
            MatrixFormat::Text => self.store_text(sink),
            MatrixFormat::Binary => self.store_binary(sink),
        }
    }

    pub fn store_text<W: Write>(&self, sink: W) -> Result<()> {
        let mut w = BufWriter::new(sink);
        writeln!(
            w,
            "{TEXT_MAGIC} v{FORMAT_VERSION} {} {}",
            self.rows, self.cols
        )?;
        for z in &self.entries {
            writeln!(w, "{:?} {:?}", z.re, z.im)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn store_binary<W: Write>(&self, sink: W) -> Result<()> {
        let rows = u32::try_from(self.rows)
            .map_err(|_| Error::Format("row count does not fit in u32".into()))?;
        let cols = u32::try_from(self.cols)
            .map_err(|_| Error::Format("column count does not fit in u32".into()))?;
        let mut w = BufWriter::new(sink);
        w.write_all(&BINARY_MAGIC)?;
        w.write_all(&FORMAT_VERSION.to_le_bytes())?;
        w.write_all(&rows.to_le_bytes())?;
        w.write_all(&cols.to_le_bytes())?;
        for z in &self.entries {
            w.write_all(&z.re.to_le_bytes())?;
            w.write_all(&z.im.to_le_bytes())?;
        }
        w.flush()?;
        Ok(())
    }

    /// Load either format; the encoding is detected from the first bytes.
    pub fn load<R: Read>(source: R) -> Result<Self> {
        let mut reader = BufReader::new(source);
        let head = reader.fill_buf()?;
        if head.starts_with(&BINARY_MAGIC) {
            Self::load_binary(reader)
        } else {
            Self::load_text(reader)
        }
    }

    pub fn load_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = File::open(path)
            .map_err(|e| Error::Format(format!("cannot open {}: {e}", path.display())))?;
        Self::load(file)
    }

    pub fn store_path(&self, path: impl AsRef<Path>, format: MatrixFormat) -> Result<()> {
        self.store(File::create(path)?, format)
    }

    fn load_text<R: BufRead>(reader: R) -> Result<Self> {
        let mut lines = reader.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Format("empty file".into()))??;
        let mut fields = header.split_whitespace();
        let (rows, cols) = match (
            fields.next(),
            fields.next(),
            fields.next(),
            fields.next(),
            fields.next(),
        ) {
            (Some(TEXT_MAGIC), Some("v1"), Some(r), Some(c), None) => {
                (parse_dim(r)?, parse_dim(c)?)
            }
            _ => return Err(Error::Format(format!("malformed header {header:?}"))),
        };
        let expected = rows
            .checked_mul(cols)
            .ok_or_else(|| Error::Format("dimensions overflow".into()))?;
        let mut entries = Vec::with_capacity(expected.min(1 << 20));
        for (lineno, line) in lines.enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if entries.len() == expected {
                return Err(Error::Format(format!(
                    "more than rows*cols = {expected} entries"
                )));
            }
            let mut parts = line.split_whitespace();
            let (re, im) = match (parts.next(), parts.next(), parts.next()) {
                (Some(re), Some(im), None) => (parse_float(re)?, parse_float(im)?),
                _ => {
                    return Err(Error::Format(format!(
                        "line {}: expected \"<re> <im>\"",
                        lineno + 2
                    )))
                }
            };
            entries.push(Complex64::new(re, im));
        }
        if entries.len() != expected {
            return Err(Error::Format(format!(
                "truncated payload: expected {expected} entries, found {}",
                entries.len()
            )));
        }
        Self::from_loaded(rows, cols, entries)
    }

    fn load_binary<R: Read>(mut reader: R) -> Result<Self> {
        let mut header = [0u8; 16];
        reader
            .read_exact(&mut header)
            .map_err(|_| Error::Format("truncated binary header".into()))?;
        let word = |i: usize| u32::from_le_bytes(header[i..i + 4].try_into().unwrap());
        if header[..4] != BINARY_MAGIC || word(4) != FORMAT_VERSION {
            return Err(Error::Format("bad binary magic or version".into()));
        }
        let (rows, cols) = (word(8) as usize, word(12) as usize);
        if rows == 0 || cols == 0 {
            return Err(Error::Format(format!("zero dimension {rows}x{cols}")));
        }
        let mut payload = Vec::new();
        reader.read_to_end(&mut payload)?;
        let expected = rows * cols * 16;
        if payload.len() != expected {
            return Err(Error::Format(format!(
                "payload is {} bytes, rows*cols needs {expected}",
                payload.len()
            )));
        }
        let entries = payload
            .chunks_exact(16)
            .map(|c| {
                Complex64::new(
                    f64::from_le_bytes(c[..8].try_into().unwrap()),
                    f64::from_le_bytes(c[8..].try_into().unwrap()),
                )
            })
            .collect();
        Self::from_loaded(rows, cols, entries)
    }

    fn from_loaded(rows: usize, cols: usize, entries: Vec<Complex64>) -> Result<Self> {
        Self::new(rows, cols, entries).map_err(|e| match e {
            Error::Numerical(msg) => Error::Format(msg),
            other => other,
        })
    }
}

fn parse_dim(s: &str) -> Result<usize> {
    match s.parse::<usize>() {
        Ok(v) if v > 0 => Ok(v),
        _ => Err(Error::Format(format!("bad dimension {s:?}"))),
    }
}

fn parse_float(s: &str) -> Result<f64> {
    let v: f64 = s
        .parse()
        .map_err(|_| Error::Format(format!("bad number {s:?}")))?;
    if !v.is_finite() {
        return Err(Error::Format(format!("non-finite value {s:?}")));
    }
    Ok(v)
}

fn unit_open_closed(word: u64) -> f64 {
    ((word >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
}

fn unit_closed_open(word: u64) -> f64 {
    (word >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// One CN(0, 1) sample.
fn complex_gaussian(rng: &mut ChaCha8Rng) -> Complex64 {
    let u1 = unit_open_closed(rng.next_u64());
    let u2 = unit_closed_open(rng.next_u64());
    let radius = (-u1.ln()).sqrt();
    let (s, c) = (std::f64::consts::TAU * u2).sin_cos();
    Complex64::new(radius * c, radius * s)
}

/// i.i.d. CN(0, 1) matrix, reproducible from `seed`.
pub fn generate_rayleigh(rows: usize, cols: usize, seed: Seed) -> Result<ChannelMatrix> {
    if rows == 0 || cols == 0 {
        return Err(Error::Dimension(format!(
            "cannot generate a {rows}x{cols} channel"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed.0);
    let entries = (0..rows * cols)
        .map(|_| complex_gaussian(&mut rng))
        .collect();
    ChannelMatrix::new(rows, cols, entries)
}

/// Check a 1-based index list and convert it to 0-based positions.
pub(crate) fn validate_indices(indices: &[usize], cols: usize) -> Result<Vec<usize>> {
    if indices.is_empty() {
        return Err(Error::Selection("empty index list".into()));
    }
    for (i, &k) in indices.iter().enumerate() {
        if k == 0 || k > cols {
            return Err(Error::Selection(format!("index {k} outside 1..={cols}")));
        }
        if i > 0 && k <= indices[i - 1] {
            return Err(Error::Selection(format!(
                "indices must be strictly increasing, got {} then {k}",
                indices[i - 1]
            )));
        }
    }
    Ok(indices.iter().map(|k| k - 1).collect())
}

/// Sub-matrix made of the named (1-based, strictly increasing) columns.
pub fn select_columns(h: &ChannelMatrix, indices: &[usize]) -> Result<ChannelMatrix> {
    let picked = validate_indices(indices, h.cols())?;
    let mut entries = Vec::with_capacity(h.rows() * picked.len());
    for r in 0..h.rows() {
        entries.extend(picked.iter().map(|&c| h.get(r, c)));
    }
    ChannelMatrix::new(h.rows(), picked.len(), entries)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> ChannelMatrix {
        ChannelMatrix::from_real(2, 3, &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap()
    }

    #[test]
    fn generation_is_deterministic() {
        let a = generate_rayleigh(4, 64, Seed(7)).unwrap();
        let b = generate_rayleigh(4, 64, Seed(7)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, generate_rayleigh(4, 64, Seed(8)).unwrap());
    }

    #[test]
    fn generation_moments() {
        let h = generate_rayleigh(200, 200, Seed(1)).unwrap();
        let n = h.entries().len() as f64;
        let mean = h.entries().iter().sum::<Complex64>() / n;
        let power = h.entries().iter().map(|z| z.norm_sqr()).sum::<f64>() / n;
        assert!(mean.norm() < 0.02, "mean {mean}");
        assert!((power - 1.0).abs() < 0.05, "power {power}");
    }

    #[test]
    fn generation_rejects_empty() {
        assert!(matches!(
            generate_rayleigh(0, 4, Seed(3)),
            Err(Error::Dimension(_))
        ));
        assert!(matches!(
            generate_rayleigh(4, 0, Seed(3)),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn column_selection() {
        let h = small();
        assert_eq!(select_columns(&h, &[1, 2, 3]).unwrap(), h);
        let second = select_columns(&h, &[2]).unwrap();
        assert_eq!(second, ChannelMatrix::from_real(2, 1, &[2.0, 5.0]).unwrap());
        assert!(matches!(
            select_columns(&h, &[2, 2]),
            Err(Error::Selection(_))
        ));
        assert!(matches!(select_columns(&h, &[0]), Err(Error::Selection(_))));
        assert!(matches!(select_columns(&h, &[4]), Err(Error::Selection(_))));
        assert!(matches!(
            select_columns(&h, &[3, 1]),
            Err(Error::Selection(_))
        ));
    }

    #[test]
    fn rejects_non_finite() {
        let bad = ChannelMatrix::new(1, 1, vec![Complex64::new(f64::NAN, 0.0)]);
        assert!(matches!(bad, Err(Error::Numerical(_))));
    }

    #[test]
    fn text_round_trip() {
        let h = generate_rayleigh(4, 16, Seed(11)).unwrap();
        let mut buf = Vec::new();
        h.store_text(&mut buf).unwrap();
        assert!(buf.starts_with(b"MIMOME-MAT v1 4 16\n"));
        assert_eq!(ChannelMatrix::load(&buf[..]).unwrap(), h);
    }

    #[test]
    fn binary_round_trip() {
        let h = generate_rayleigh(3, 5, Seed(12)).unwrap();
        let mut buf = Vec::new();
        h.store_binary(&mut buf).unwrap();
        assert_eq!(buf.len(), 16 + 15 * 16);
        assert_eq!(&buf[..4], b"MMTB");
        assert_eq!(ChannelMatrix::load(&buf[..]).unwrap(), h);
    }

    #[test]
    fn load_rejects_bad_files() {
        let short = "MIMOME-MAT v1 2 2\n1 0\n0 1\n1 1\n";
        assert!(matches!(
            ChannelMatrix::load(short.as_bytes()),
            Err(Error::Format(_))
        ));
        let long = "MIMOME-MAT v1 1 1\n1 0\n0 1\n";
        assert!(matches!(
            ChannelMatrix::load(long.as_bytes()),
            Err(Error::Format(_))
        ));
        let nan = "MIMOME-MAT v1 1 2\n1 0\nNaN 1\n";
        assert!(matches!(
            ChannelMatrix::load(nan.as_bytes()),
            Err(Error::Format(_))
        ));
        let header = "MIMOME-MAT v2 1 1\n1 0\n";
        assert!(matches!(
            ChannelMatrix::load(header.as_bytes()),
            Err(Error::Format(_))
        ));
        assert!(matches!(
            ChannelMatrix::load(&b""[..]),
            Err(Error::Format(_))
        ));

        let mut bin = Vec::new();
        small().store_binary(&mut bin).unwrap();
        bin.truncate(bin.len() - 3);
        assert!(matches!(
            ChannelMatrix::load(&bin[..]),
            Err(Error::Format(_))
        ));

        let mut inf = Vec::new();
        small().store_binary(&mut inf).unwrap();
        inf[16..24].copy_from_slice(&f64::INFINITY.to_le_bytes());
        assert!(matches!(
            ChannelMatrix::load(&inf[..]),
            Err(Error::Format(_))
        ));
    }

    #[test]
    fn column_norms() {
        let h = small();
        assert_eq!(h.column_norms_sqr(), vec![17.0, 29.0, 45.0]);
    }
}
