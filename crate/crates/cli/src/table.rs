//! Minimal CSV emission: comma separator, '.' decimal, '\n' endings,
//! mandatory header, shortest round-trip float formatting so identical
//! runs produce identical bytes.

use vervaat::{Error, Result};

#[derive(Debug, Clone)]
pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Table {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push<S: Into<String>>(&mut self, row: impl IntoIterator<Item = S>) {
        let row: Vec<String> = row.into_iter().map(Into::into).collect();
        assert_eq!(row.len(), self.header.len(), "row width != header width");
        self.rows.push(row);
    }

    pub fn rows(&self) -> usize {
        self.rows.len()
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.header.join(","));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    pub fn write(&self, path: &std::path::Path) -> Result<()> {
        if let Some(dir) = path.parent() {
            if !dir.as_os_str().is_empty() {
                std::fs::create_dir_all(dir)
                    .map_err(|e| Error::invalid(format!("mkdir {}: {e}", dir.display())))?;
            }
        }
        std::fs::write(path, self.render())
            .map_err(|e| Error::invalid(format!("write {}: {e}", path.display())))
    }
}

/// Shortest representation that parses back to the same f64.
pub fn num(x: f64) -> String {
    format!("{x}")
}
