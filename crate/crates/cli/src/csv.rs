//! Minimal CSV emission: `#` metadata lines, one header, LF line endings.

use std::fmt::Write;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub metadata: Vec<(String, String)>,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table { metadata: Vec::new(), header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn meta(&mut self, key: &str, value: impl ToString) {
        self.metadata.push((key.to_string(), value.to_string()));
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.metadata {
            let _ = writeln!(s, "# {k}: {}", v.replace('\n', " "));
        }
        let _ = writeln!(s, "{}", self.header.join(","));
        for row in &self.rows {
            let _ = writeln!(s, "{}", row.join(","));
        }
        s
    }
}

/// Shortest round-trip representation, in exponent form outside
/// `[1e-4, 1e15)`; empty for a missing value.
pub fn cell(v: Option<f64>) -> String {
    match v {
        Some(x) if x == 0.0 || !x.is_finite() || (1e-4..1e15).contains(&x.abs()) => format!("{x}"),
        Some(x) => format!("{x:e}"),
        None => String::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout() {
        let mut t = Table::new(&["R", "euclid", "direct"]);
        t.meta("t", 0.5);
        t.push(vec![cell(Some(0.1)), cell(Some(1e-20)), cell(None)]);
        assert_eq!(t.render(), "# t: 0.5\nR,euclid,direct\n0.1,1e-20,\n");
    }
}
