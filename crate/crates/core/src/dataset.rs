//! In-memory point sets: file ingestion, synthesis, and CSV persistence.

use std::fs;
use std::path::Path;
use std::str::FromStr;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::fmt::f64_csv;
use crate::seed::rng_from;

/// Supported on-disk layouts; both are one point per line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DatasetFormat {
    /// Comma-separated values.
    DenseCsv,
    /// Whitespace-separated values.
    Whitespace,
}

impl FromStr for DatasetFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "dense-csv" | "csv" => Ok(DatasetFormat::DenseCsv),
            "whitespace" => Ok(DatasetFormat::Whitespace),
            other => Err(Error::Config(format!(
                "unknown dataset format '{other}' (expected dense-csv or whitespace)"
            ))),
        }
    }
}

/// Synthetic dataset generators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SynthKind {
    /// Rows i.i.d. `N(0, I_d)`.
    Gaussian,
    /// Rows uniform on the unit sphere.
    Sphere,
}

impl FromStr for SynthKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "gaussian" => Ok(SynthKind::Gaussian),
            "sphere" => Ok(SynthKind::Sphere),
            other => Err(Error::Config(format!(
                "unknown synthetic dataset kind '{other}' (expected gaussian or sphere)"
            ))),
        }
    }
}

/// An `n × d` matrix of points, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    data: Vec<f64>,
    n: usize,
    d: usize,
    d_original: usize,
    source: String,
}

impl Dataset {
    /// Parses text in the given format. Every row must have the same width
    /// and every field must be a finite number; violations report a 1-based
    /// line number.
    pub fn parse_str(text: &str, format: DatasetFormat, source: &str) -> Result<Self> {
        let mut data = Vec::new();
        let mut d = 0usize;
        let mut n = 0usize;
        for (idx, line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let fields: Vec<&str> = match format {
                DatasetFormat::DenseCsv => line.split(',').collect(),
                DatasetFormat::Whitespace => line.split_whitespace().collect(),
            };
            if fields.len() == 1 && fields[0].trim().is_empty() {
                return Err(Error::Parse {
                    line: line_no,
                    message: "blank line".into(),
                });
            }
            if n == 0 {
                d = fields.len();
            } else if fields.len() != d {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("expected {d} fields, found {}", fields.len()),
                });
            }
            for field in fields {
                let value: f64 = field.trim().parse().map_err(|_| Error::Parse {
                    line: line_no,
                    message: format!("invalid number '{}'", field.trim()),
                })?;
                if !value.is_finite() {
                    return Err(Error::Parse {
                        line: line_no,
                        message: format!("non-finite value '{}'", field.trim()),
                    });
                }
                data.push(value);
            }
            n += 1;
        }
        if n == 0 {
            return Err(Error::Parse {
                line: 1,
                message: "empty dataset".into(),
            });
        }
        Ok(Self {
            data,
            n,
            d,
            d_original: d,
            source: source.to_string(),
        })
    }

    pub fn load(path: &Path, format: DatasetFormat) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        Self::parse_str(&text, format, &path.display().to_string())
    }

    /// Writes one comma-separated row per point, floats with 17 significant
    /// digits so a reload is bit-exact.
    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_csv())?;
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for row in self.rows() {
            let mut first = true;
            for v in row {
                if !first {
                    out.push(',');
                }
                out.push_str(&f64_csv(*v));
                first = false;
            }
            out.push('\n');
        }
        out
    }

    /// Draws a synthetic dataset; deterministic per seed.
    pub fn synth(kind: SynthKind, n: usize, d: usize, seed: u64) -> Result<Self> {
        if n == 0 || d == 0 {
            return Err(Error::Config(format!(
                "synthetic dataset needs n ≥ 1 and d ≥ 1, got n={n}, d={d}"
            )));
        }
        let mut rng = rng_from(seed);
        let mut data = Vec::with_capacity(n * d);
        for _ in 0..n {
            let start = data.len();
            loop {
                data.truncate(start);
                for _ in 0..d {
                    data.push(rng.sample::<f64, _>(StandardNormal));
                }
                match kind {
                    SynthKind::Gaussian => break,
                    SynthKind::Sphere => {
                        let norm: f64 =
                            data[start..].iter().map(|v| v * v).sum::<f64>().sqrt();
                        if norm > 0.0 {
                            for v in &mut data[start..] {
                                *v /= norm;
                            }
                            break;
                        }
                        // Zero draw: resample the row.
                    }
                }
            }
        }
        let source = format!(
            "synth:{}:n={n}:d={d}:seed={seed}",
            match kind {
                SynthKind::Gaussian => "gaussian",
                SynthKind::Sphere => "sphere",
            }
        );
        Ok(Self {
            data,
            n,
            d,
            d_original: d,
            source,
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Stored dimension (after any padding).
    pub fn dim(&self) -> usize {
        self.d
    }

    /// Dimension before padding.
    pub fn d_original(&self) -> usize {
        self.d_original
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.d..(i + 1) * self.d]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.d)
    }

    /// Zero-pads every point to `d_new` columns, keeping `d_original`.
    pub fn pad_to(&self, d_new: usize) -> Result<Self> {
        if d_new < self.d {
            return Err(Error::Config(format!(
                "cannot pad from {} down to {d_new} columns",
                self.d
            )));
        }
        let mut data = Vec::with_capacity(self.n * d_new);
        for row in self.rows() {
            data.extend_from_slice(row);
            data.extend(std::iter::repeat(0.0).take(d_new - self.d));
        }
        Ok(Self {
            data,
            n: self.n,
            d: d_new,
            d_original: self.d_original,
            source: self.source.clone(),
        })
    }
}
