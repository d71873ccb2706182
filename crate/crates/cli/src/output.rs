//! CSV and JSON emission.

use std::fmt::Write as _;

use nevan_core::report::Sweep;

/// 17 significant digits, `.` decimal; `inf`, `-inf`, `nan` otherwise.
pub fn float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

/// Comma-separated table with LF line endings.
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

    pub fn push(&mut self, row: Vec<String>) {
        assert_eq!(row.len(), self.header.len(), "row width");
        self.rows.push(row);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for line in std::iter::once(&self.header).chain(&self.rows) {
            let cells: Vec<String> = line.iter().map(|c| quote(c)).collect();
            writeln!(out, "{}", cells.join(",")).unwrap();
        }
        out
    }
}

fn quote(cell: &str) -> String {
    if cell.contains([',', '"', '\n']) {
        format!("\"{}\"", cell.replace('"', "\"\""))
    } else {
        cell.to_string()
    }
}

/// `inequality_id, r, adjusted_r, lhs, <rhs terms>, residual, verdict`.
pub fn sweep_table(s: &Sweep) -> Table {
    let terms: Vec<String> = s
        .rows
        .first()
        .map(|r| r.rhs_terms.iter().map(|t| t.name.clone()).collect())
        .unwrap_or_default();
    let mut header = vec!["inequality_id".to_string(), "r".into(), "adjusted_r".into(), "lhs".into()];
    header.extend(terms.iter().cloned());
    header.extend(["residual".to_string(), "verdict".into()]);
    let mut t = Table::new(header);
    for row in &s.rows {
        let mut cells = vec![row.inequality_id.clone(), float(row.radius), float(row.adjusted_radius), float(row.lhs)];
        cells.extend(row.rhs_terms.iter().map(|t| float(t.value)));
        cells.extend([float(row.residual), row.verdict.label().to_string()]);
        t.push(cells);
    }
    t
}

pub fn json(value: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format() {
        assert_eq!(float(2.0), "2.0000000000000000e0");
        assert_eq!(float(0.1), "1.0000000000000001e-1");
        assert_eq!(float(f64::INFINITY), "inf");
        assert_eq!(float(0.1).parse::<f64>().unwrap(), 0.1);
    }

    #[test]
    fn render_quotes_and_lf() {
        let mut t = Table::new(["a", "b"]);
        t.push(vec!["N(a=1)".into(), "x,y".into()]);
        assert_eq!(t.render(), "a,b\nN(a=1),\"x,y\"\n");
    }
}
