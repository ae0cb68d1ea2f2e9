//! Run configuration: a JSON document whose canonical form prints every
//! float with 17 significant digits.

use std::io;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use torsion_core::Exec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub seed: u64,
    pub exec: Exec,
    /// Output directory; `TORSION_OUT_DIR` and then `.` when absent.
    pub out_dir: Option<PathBuf>,
    pub report_format: ReportFormat,
    pub spectrum: SpectrumConfig,
    pub zeta: ZetaConfig,
    pub mv: MvConfig,
    pub gluing: GluingConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpectrumConfig {
    pub r: f64,
    pub window: [f64; 2],
    /// See `torsion spectrum --help` for the grammar.
    pub family: String,
    /// `full` for `4R`, `boundary` for `2R`.
    pub mode: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ZetaConfig {
    pub c: String,
    pub r: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MvConfig {
    /// `dim H^p(Y)` for `p = 0..n−1`.
    pub h: Vec<usize>,
    pub scenarios: usize,
    pub r_grid: Vec<f64>,
    pub perturbation: f64,
    /// Largest allowed relative error at the last length.
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GluingConfig {
    pub h: Vec<usize>,
    pub scenarios: usize,
    pub r_grid: Vec<f64>,
    pub tolerance: f64,
    /// `(a, b, R)` circle cases.
    pub circles: Vec<[f64; 3]>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 42,
            exec: Exec::Parallel,
            out_dir: None,
            report_format: ReportFormat::Json,
            spectrum: SpectrumConfig::default(),
            zeta: ZetaConfig::default(),
            mv: MvConfig::default(),
            gluing: GluingConfig::default(),
        }
    }
}

impl Default for SpectrumConfig {
    fn default() -> Self {
        Self { r: 1.0, window: [0.0, 6.2832], family: "identity".into(), mode: "full".into() }
    }
}

impl Default for ZetaConfig {
    fn default() -> Self {
        Self { c: "minus-identity".into(), r: 7.0 }
    }
}

impl Default for MvConfig {
    fn default() -> Self {
        Self { h: vec![2, 1, 2], scenarios: 8, r_grid: vec![1e2, 1e3, 1e4], perturbation: 0.1, tolerance: 1e-2 }
    }
}

impl Default for GluingConfig {
    fn default() -> Self {
        Self {
            h: vec![2, 1, 2],
            scenarios: 8,
            r_grid: vec![1.0, 10.0, 100.0],
            tolerance: 1e-10,
            circles: vec![[1.0, 1.0, 0.5], [1.0, 2.0, 1.0], [0.5, 3.0, 2.0]],
        }
    }
}

/// Pretty JSON with floats written as `d.dddddddddddddddde±x`.
struct SeventeenDigits(serde_json::ser::PrettyFormatter<'static>);

impl serde_json::ser::Formatter for SeventeenDigits {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        w.write_all(crate::output::fmt17(value).as_bytes())
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

/// Canonical JSON text of any serializable value, LF-terminated.
pub fn to_canonical_json<T: Serialize>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SeventeenDigits(serde_json::ser::PrettyFormatter::new()));
    value.serialize(&mut ser).expect("config values serialize");
    buf.push(b'\n');
    String::from_utf8(buf).expect("serde_json writes UTF-8")
}

impl RunConfig {
    pub fn to_canonical(&self) -> String {
        to_canonical_json(self)
    }

    pub fn parse(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("parsing {}", path.display()))
    }

    pub fn resolved_out_dir(&self) -> PathBuf {
        self.out_dir
            .clone()
            .or_else(|| std::env::var_os("TORSION_OUT_DIR").map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("."))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_form_is_a_fixed_point() {
        let mut cfg = RunConfig::default();
        cfg.spectrum.r = 0.1;
        cfg.mv.r_grid = vec![1.0 / 3.0, 1e300, 5e-324];
        let text = cfg.to_canonical();
        assert!(text.contains("1.0000000000000001e-1"), "{text}");
        let back = RunConfig::parse(&text).unwrap();
        assert_eq!(back, cfg);
        assert_eq!(back.to_canonical(), text);
    }

    #[test]
    fn missing_sections_take_defaults() {
        let cfg = RunConfig::parse(r#"{"seed": 7}"#).unwrap();
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.gluing, GluingConfig::default());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(RunConfig::parse(r#"{"sede": 7}"#).is_err());
    }
}
