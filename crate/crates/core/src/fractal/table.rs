//! Delimited text persistence for feature vectors.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::FeatureVector;
use crate::classifier::{optional_label_name, parse_optional_label};
use crate::error::{Error, Result};

const ID_COLUMN: &str = "image_id";
const TRAILING: [&str; 3] = ["group_id", "class_label", "degenerate"];

/// Rows of equally long feature vectors with named columns.
///
/// Written as comma-separated text: `# key=value` provenance lines, a header
/// row `image_id,<features…>,group_id,class_label,degenerate`, then one row
/// per image. Values use the shortest round-trip decimal form.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FeatureTable {
    pub columns: Vec<String>,
    pub rows: Vec<FeatureVector>,
    pub provenance: Vec<(String, String)>,
}

impl FeatureTable {
    pub fn new(columns: Vec<String>) -> Self {
        FeatureTable {
            columns,
            ..Default::default()
        }
    }

    pub fn push(&mut self, row: FeatureVector) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(Error::argument(format!(
                "row '{}' has {} features, table has {} columns",
                row.image_id,
                row.len(),
                self.columns.len()
            )));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.provenance {
            let _ = writeln!(out, "# {k}={v}");
        }
        let header: Vec<&str> = std::iter::once(ID_COLUMN)
            .chain(self.columns.iter().map(String::as_str))
            .chain(TRAILING)
            .collect();
        out.push_str(&header.join(","));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.image_id);
            for v in &row.values {
                let _ = write!(out, ",{v}");
            }
            let _ = writeln!(
                out,
                ",{},{},{}",
                row.group_id,
                optional_label_name(row.class_label),
                row.degenerate
            );
        }
        out
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
            fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
        fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text).map_err(|msg| Error::format(path, msg))
    }

    fn parse(text: &str) -> std::result::Result<Self, String> {
        let mut table = FeatureTable::default();
        let mut header_seen = false;
        for (lineno, line) in text.lines().enumerate() {
            let lineno = lineno + 1;
            if line.trim().is_empty() {
                continue;
            }
            if let Some(comment) = line.strip_prefix('#') {
                if let Some((k, v)) = comment.trim().split_once('=') {
                    table.provenance.push((k.trim().to_string(), v.trim().to_string()));
                }
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if !header_seen {
                let n = fields.len();
                if n < 1 + TRAILING.len() || fields[0] != ID_COLUMN || fields[n - TRAILING.len()..] != TRAILING {
                    return Err(format!(
                        "line {lineno}: header row must be {ID_COLUMN},<features>,{}",
                        TRAILING.join(",")
                    ));
                }
                table.columns = fields[1..n - TRAILING.len()].iter().map(|s| s.to_string()).collect();
                header_seen = true;
                continue;
            }
            let expected = table.columns.len() + 1 + TRAILING.len();
            if fields.len() != expected {
                return Err(format!("line {lineno}: {} fields, expected {expected}", fields.len()));
            }
            let values = fields[1..=table.columns.len()]
                .iter()
                .zip(&table.columns)
                .map(|(f, name)| {
                    f.parse::<f64>()
                        .ok()
                        .filter(|v| v.is_finite())
                        .ok_or_else(|| format!("line {lineno}: column '{name}' has invalid value '{f}'"))
                })
                .collect::<std::result::Result<Vec<f64>, String>>()?;
            let tail = &fields[expected - TRAILING.len()..];
            table.rows.push(FeatureVector {
                values,
                image_id: fields[0].to_string(),
                group_id: tail[0].to_string(),
                class_label: parse_optional_label(tail[1]).map_err(|e| format!("line {lineno}: {e}"))?,
                degenerate: tail[2]
                    .parse()
                    .map_err(|_| format!("line {lineno}: column 'degenerate' has invalid value '{}'", tail[2]))?,
            });
        }
        if !header_seen {
            return Err("no header row".into());
        }
        Ok(table)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifier::ClassLabel;

    #[test]
    fn round_trip_is_exact() {
        let mut t = FeatureTable::new(vec!["a".into(), "b".into()]);
        t.provenance.push(("seed".into(), "9".into()));
        t.push(FeatureVector {
            values: vec![0.1 + 0.2, -1e-300],
            image_id: "i0".into(),
            group_id: "g0".into(),
            class_label: Some(ClassLabel::NonRespondent),
            degenerate: 1,
        })
        .unwrap();
        t.push(FeatureVector {
            values: vec![std::f64::consts::PI, 2.0],
            image_id: "i1".into(),
            group_id: "g1".into(),
            class_label: None,
            degenerate: 0,
        })
        .unwrap();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("t.csv");
        t.write(&p).unwrap();
        assert_eq!(FeatureTable::read(&p).unwrap(), t);
    }

    #[test]
    fn bad_rows_are_reported() {
        assert!(
            FeatureTable::parse("image_id,a,group_id,class_label,degenerate\nx,nope,g,none,0\n")
                .unwrap_err()
                .contains("column 'a'")
        );
        assert!(FeatureTable::parse("x,y\n").is_err());
        let mut t = FeatureTable::new(vec!["a".into()]);
        assert!(t
            .push(FeatureVector {
                values: vec![],
                image_id: "i".into(),
                group_id: "g".into(),
                class_label: None,
                degenerate: 0
            })
            .is_err());
    }
}
