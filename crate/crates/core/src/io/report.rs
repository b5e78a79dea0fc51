//! Report records, rendered as text or as one `key=value` record per line.

use std::fmt::Write as _;

use crate::io::config::ReportFormat;

#[derive(Clone, Debug, PartialEq)]
pub struct Record {
    pub kind: String,
    pub fields: Vec<(String, String)>,
}

impl Record {
    pub fn new(kind: &str) -> Self {
        Record {
            kind: kind.to_string(),
            fields: Vec::new(),
        }
    }

    pub fn with(mut self, key: &str, value: impl ToString) -> Self {
        self.fields.push((key.to_string(), value.to_string()));
        self
    }

    /// A real at full precision.
    pub fn real(self, key: &str, value: f64) -> Self {
        self.with(key, format!("{value:?}"))
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.fields.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn get_f64(&self, key: &str) -> Option<f64> {
        self.get(key)?.parse().ok()
    }

    pub fn structured(&self) -> String {
        let mut s = format!("record={}", self.kind);
        for (k, v) in &self.fields {
            let _ = write!(s, " {k}={}", v.replace('%', "%25").replace(' ', "%20"));
        }
        s
    }

    pub fn text(&self) -> String {
        let mut s = format!("[{}]", self.kind);
        for (k, v) in &self.fields {
            let _ = write!(s, " {k}: {v};");
        }
        s.pop();
        s
    }

    pub fn parse(line: &str) -> Option<Record> {
        let mut it = line.split_whitespace();
        let kind = it.next()?.strip_prefix("record=")?;
        let mut r = Record::new(kind);
        for kv in it {
            let (k, v) = kv.split_once('=')?;
            r.fields.push((k.to_string(), v.replace("%20", " ").replace("%25", "%")));
        }
        Some(r)
    }
}

/// A checked invariant with its measured value.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub measured: String,
    pub threshold: String,
}

impl Check {
    pub fn new(name: &str, pass: bool, measured: impl ToString, threshold: impl ToString) -> Self {
        Check {
            name: name.to_string(),
            pass,
            measured: measured.to_string(),
            threshold: threshold.to_string(),
        }
    }

    pub fn record(&self) -> Record {
        Record::new("check")
            .with("name", &self.name)
            .with("status", if self.pass { "PASS" } else { "FAIL" })
            .with("measured", &self.measured)
            .with("threshold", &self.threshold)
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Report {
    pub records: Vec<Record>,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn push(&mut self, r: Record) {
        self.records.push(r);
    }

    pub fn check(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn render(&self, format: ReportFormat) -> String {
        let mut s = String::new();
        for r in self.records.iter().chain(self.checks.iter().map(|c| c.record()).collect::<Vec<_>>().iter()) {
            match format {
                ReportFormat::Text => s += &r.text(),
                ReportFormat::Structured => s += &r.structured(),
            }
            s.push('\n');
        }
        if format == ReportFormat::Text && !self.checks.is_empty() {
            let failed = self.checks.iter().filter(|c| !c.pass).count();
            let _ = writeln!(s, "{} checks, {} failed", self.checks.len(), failed);
        }
        s
    }

    /// Reads the structured form back.
    pub fn parse_structured(text: &str) -> Report {
        let mut rep = Report::default();
        for r in text.lines().filter_map(Record::parse) {
            if r.kind == "check" {
                rep.checks.push(Check {
                    name: r.get("name").unwrap_or("").to_string(),
                    pass: r.get("status") == Some("PASS"),
                    measured: r.get("measured").unwrap_or("").to_string(),
                    threshold: r.get("threshold").unwrap_or("").to_string(),
                });
            } else {
                rep.records.push(r);
            }
        }
        rep
    }
}
