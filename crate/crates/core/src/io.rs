//! Header + raw float32 container used for RF frames, envelopes and maps.
//!
//! A container named `stem` is two files: `stem.hdr`, UTF-8 `key=value`
//! lines (`#` starts a comment), and `stem.f32`, `rows × cols` little-endian
//! 32-bit floats in row-major order.

use std::fs;
use std::path::{Path, PathBuf};

use ndarray::Array2;

use crate::classifier::{optional_label_name, parse_optional_label};
use crate::envelope::{EnvelopeImage, RfFrame};
use crate::error::{Error, Result};

pub const HEADER_EXT: &str = "hdr";
pub const PAYLOAD_EXT: &str = "f32";

/// Ordered `key=value` header. Later `set` calls replace earlier values in place.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Header {
    entries: Vec<(String, String)>,
}

impl Header {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, key: impl Into<String>, value: impl ToString) -> &mut Self {
        let key = key.into();
        let value = value.to_string();
        match self.entries.iter_mut().find(|(k, _)| *k == key) {
            Some(entry) => entry.1 = value,
            None => self.entries.push((key, value)),
        }
        self
    }

    pub fn extend<'a>(&mut self, extra: impl IntoIterator<Item = &'a (String, String)>) -> &mut Self {
        for (k, v) in extra {
            self.set(k.clone(), v);
        }
        self
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }

    fn require(&self, path: &Path, key: &str) -> Result<&str> {
        self.get(key)
            .ok_or_else(|| Error::format(path, format!("missing header field '{key}'")))
    }

    pub(crate) fn parse_field<T: std::str::FromStr>(&self, path: &Path, key: &str) -> Result<T> {
        let raw = self.require(path, key)?;
        raw.trim()
            .parse()
            .map_err(|_| Error::format(path, format!("header field '{key}' has invalid value '{raw}'")))
    }

    fn parse(path: &Path, text: &str) -> Result<Self> {
        let mut header = Header::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::format(path, format!("header line {} is not key=value: '{line}'", lineno + 1)))?;
            let k = k.trim();
            if k.is_empty() {
                return Err(Error::format(
                    path,
                    format!("header line {} has an empty key", lineno + 1),
                ));
            }
            header.set(k, v.trim());
        }
        Ok(header)
    }

    fn render(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.entries {
            out.push_str(k);
            out.push('=');
            out.push_str(v);
            out.push('\n');
        }
        out
    }
}

/// Header and payload paths for a container, given its stem or either file.
pub fn container_paths(path: &Path) -> (PathBuf, PathBuf) {
    let stem = match path.extension().and_then(|e| e.to_str()) {
        Some(HEADER_EXT) | Some(PAYLOAD_EXT) => path.with_extension(""),
        _ => path.to_path_buf(),
    };
    let with = |ext: &str| {
        let mut s = stem.clone().into_os_string();
        s.push(".");
        s.push(ext);
        PathBuf::from(s)
    };
    (with(HEADER_EXT), with(PAYLOAD_EXT))
}

/// Writes `data` with `header`; `rows` and `cols` are set from the matrix.
pub fn write_container(path: &Path, header: &Header, data: &Array2<f64>) -> Result<()> {
    let (hdr_path, payload_path) = container_paths(path);
    if let Some(((r, c), v)) = data.indexed_iter().find(|(_, v)| !v.is_finite()) {
        return Err(Error::argument(format!(
            "refusing to write non-finite value {v} at ({r}, {c}) to {}",
            payload_path.display()
        )));
    }
    let (rows, cols) = data.dim();
    let mut full = Header::new();
    full.set("rows", rows).set("cols", cols);
    for (k, v) in header.entries() {
        if k != "rows" && k != "cols" {
            full.set(k.clone(), v);
        }
    }
    if let Some(parent) = hdr_path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    let mut bytes = Vec::with_capacity(rows * cols * 4);
    for v in data.iter() {
        bytes.extend_from_slice(&(*v as f32).to_le_bytes());
    }
    fs::write(&payload_path, bytes).map_err(|e| Error::io(&payload_path, e))?;
    fs::write(&hdr_path, full.render()).map_err(|e| Error::io(&hdr_path, e))?;
    Ok(())
}

/// Reads a header alone, without touching the payload.
pub fn read_header(path: &Path) -> Result<Header> {
    let (hdr_path, _) = container_paths(path);
    let text = fs::read(&hdr_path).map_err(|e| Error::io(&hdr_path, e))?;
    let text = String::from_utf8(text).map_err(|e| {
        Error::format(
            &hdr_path,
            format!("header is not UTF-8 (byte offset {})", e.utf8_error().valid_up_to()),
        )
    })?;
    Header::parse(&hdr_path, &text)
}

pub fn read_container(path: &Path) -> Result<(Header, Array2<f64>)> {
    let (hdr_path, payload_path) = container_paths(path);
    let header = read_header(path)?;
    let rows: usize = header.parse_field(&hdr_path, "rows")?;
    let cols: usize = header.parse_field(&hdr_path, "cols")?;
    if rows == 0 || cols == 0 {
        return Err(Error::format(&hdr_path, format!("empty shape {rows}x{cols}")));
    }
    let bytes = fs::read(&payload_path).map_err(|e| Error::io(&payload_path, e))?;
    let expected = rows * cols * 4;
    if bytes.len() != expected {
        let row_bytes = cols * 4;
        return Err(Error::format(
            &payload_path,
            format!(
                "payload has {} bytes ({} full rows) but header declares {rows}x{cols} ({expected} bytes); data ends at byte offset {}",
                bytes.len(),
                bytes.len() / row_bytes,
                bytes.len()
            ),
        ));
    }
    let mut values = Vec::with_capacity(rows * cols);
    for (i, chunk) in bytes.chunks_exact(4).enumerate() {
        let v = f32::from_le_bytes([chunk[0], chunk[1], chunk[2], chunk[3]]);
        if !v.is_finite() {
            return Err(Error::format(
                &payload_path,
                format!(
                    "non-finite value at index ({}, {}), byte offset {}",
                    i / cols,
                    i % cols,
                    i * 4
                ),
            ));
        }
        values.push(v as f64);
    }
    let data = Array2::from_shape_vec((rows, cols), values).expect("length checked above");
    Ok((header, data))
}

pub fn save_rf(frame: &RfFrame, path: &Path, extra: &[(String, String)]) -> Result<()> {
    frame.validate()?;
    let mut h = Header::new();
    h.set("kind", "rf")
        .set("sampling_rate_hz", frame.sampling_rate_hz)
        .set("center_frequency_hz", frame.center_frequency_hz)
        .set("frame_id", &frame.frame_id)
        .set("group_id", &frame.group_id)
        .set("class_label", optional_label_name(frame.class_label))
        .extend(extra);
    write_container(path, &h, &frame.samples)
}

pub fn load_rf(path: &Path) -> Result<RfFrame> {
    let (hdr_path, _) = container_paths(path);
    let (h, samples) = read_container(path)?;
    if let Some(kind) = h.get("kind").filter(|k| *k != "rf") {
        return Err(Error::format(&hdr_path, format!("expected kind=rf, found kind={kind}")));
    }
    let frame = RfFrame {
        samples,
        sampling_rate_hz: h.parse_field(&hdr_path, "sampling_rate_hz")?,
        center_frequency_hz: h.parse_field(&hdr_path, "center_frequency_hz")?,
        frame_id: h.require(&hdr_path, "frame_id")?.to_string(),
        group_id: h.require(&hdr_path, "group_id")?.to_string(),
        class_label: label_field(&h, &hdr_path)?,
    };
    frame.validate().map_err(|e| Error::format(&hdr_path, e.to_string()))?;
    Ok(frame)
}

pub fn save_envelope(image: &EnvelopeImage, path: &Path, extra: &[(String, String)]) -> Result<()> {
    let mut h = Header::new();
    h.set("kind", "envelope")
        .set("frame_id", &image.frame_id)
        .set("group_id", &image.group_id)
        .set("class_label", optional_label_name(image.class_label))
        .extend(extra);
    write_container(path, &h, &image.values)
}

pub fn load_envelope(path: &Path) -> Result<EnvelopeImage> {
    let (hdr_path, _) = container_paths(path);
    let (h, values) = read_container(path)?;
    match h.get("kind") {
        Some("envelope") => {}
        other => {
            return Err(Error::format(
                &hdr_path,
                format!("expected kind=envelope, found {}", other.unwrap_or("no kind field")),
            ))
        }
    }
    if let Some(((r, c), v)) = values.indexed_iter().find(|(_, v)| **v < 0.0) {
        return Err(Error::format(
            &hdr_path,
            format!("negative envelope value {v} at index ({r}, {c})"),
        ));
    }
    Ok(EnvelopeImage {
        values,
        frame_id: h.require(&hdr_path, "frame_id")?.to_string(),
        group_id: h.get("group_id").unwrap_or("").to_string(),
        class_label: label_field(&h, &hdr_path)?,
    })
}

fn label_field(h: &Header, path: &Path) -> Result<Option<crate::classifier::ClassLabel>> {
    parse_optional_label(h.get("class_label").unwrap_or("none"))
        .map_err(|e| Error::format(path, format!("header field 'class_label': {e}")))
}
