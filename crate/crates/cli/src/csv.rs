//! Fixed-format CSV and key/value writers: a header row, `{:.16e}` numbers,
//! `'\n'` line endings.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::CliError;

pub fn number(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn table(header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        debug_assert_eq!(row.len(), header.len());
        let cells: Vec<String> = row.into_iter().map(number).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// `quantity,value` rows with numeric values.
pub fn key_values(rows: &[(&str, f64)]) -> String {
    let mut out = String::from("quantity,value\n");
    for (k, v) in rows {
        let _ = writeln!(out, "{k},{}", number(*v));
    }
    out
}

pub fn write(path: &Path, contents: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| CliError::Io(dir.display().to_string(), e))?;
    }
    fs::write(path, contents).map_err(|e| CliError::Io(path.display().to_string(), e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_format() {
        assert_eq!(number(0.1), "1.0000000000000001e-1");
        assert_eq!(number(-2.0), "-2.0000000000000000e0");
        assert_eq!(table(&["a", "b"], vec![vec![1.0, 0.5]]), "a,b\n1.0000000000000000e0,5.0000000000000000e-1\n");
        assert_eq!(key_values(&[("x", 1.0)]), "quantity,value\nx,1.0000000000000000e0\n");
    }
}
