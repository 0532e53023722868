//! The versioned run report and its text, JSON and CSV renderings.

use coarse_double::verdict::{Status, Verdict, Witness};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::collections::BTreeMap;
use std::fmt::Write;

pub const SCHEMA: &str = "coarse-double/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema: String,
    pub command: String,
    pub versions: BTreeMap<String, String>,
    pub verdicts: Vec<Verdict>,
    /// Named results other than verdicts, keyed for deterministic order.
    pub data: BTreeMap<String, Value>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub mismatches: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<u128>,
}

impl RunReport {
    pub fn new(command: impl Into<String>) -> Self {
        let versions = [
            ("coarse-double".to_string(), coarse_double::VERSION.to_string()),
            ("coarse-double-cli".to_string(), env!("CARGO_PKG_VERSION").to_string()),
        ]
        .into_iter()
        .collect();
        RunReport {
            schema: SCHEMA.into(),
            command: command.into(),
            versions,
            verdicts: Vec::new(),
            data: BTreeMap::new(),
            mismatches: Vec::new(),
            timing_ms: None,
        }
    }

    pub fn put(&mut self, key: &str, v: impl Serialize) {
        self.data.insert(key.to_string(), serde_json::to_value(v).expect("report data serialises"));
    }

    pub fn verdict(&mut self, v: Verdict) {
        self.verdicts.push(v);
    }

    pub fn any_inconclusive(&self) -> bool {
        self.verdicts.iter().any(|v| v.status == Status::Inconclusive)
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for v in &self.verdicts {
            let _ = writeln!(out, "{}", verdict_line(v));
        }
        for (k, v) in &self.data {
            let _ = match v {
                Value::String(s) => writeln!(out, "{k}: {s}"),
                other => writeln!(out, "{k}: {other}"),
            };
        }
        for m in &self.mismatches {
            let _ = writeln!(out, "MISMATCH {m}");
        }
        if let Some(t) = self.timing_ms {
            let _ = writeln!(out, "time: {t} ms");
        }
        out
    }

    /// `section,series,x,y` rows for every numeric pair series in the report.
    pub fn to_csv(&self) -> String {
        let mut rows = vec!["section,series,x,y".to_string()];
        for v in &self.verdicts {
            for s in &v.diagnostics.series {
                for (x, y) in &s.points {
                    rows.push(format!("{},{},{},{}", csv_field(&v.claim), csv_field(&s.name), x.0, y.0));
                }
            }
        }
        for (k, v) in &self.data {
            collect_pairs(k, v, &mut rows);
        }
        rows.join("\n") + "\n"
    }
}

fn status_word(s: Status) -> &'static str {
    match s {
        Status::CertifiedOnWindow => "Certified",
        Status::Falsified => "Falsified",
        Status::Inconclusive => "Inconclusive",
    }
}

pub fn witness_text(w: &Witness) -> String {
    match w {
        Witness::Affine { alpha, beta } => format!("(α,β)=({alpha},{beta})"),
        Witness::Tabulated { table } => format!("φ tabulated on {} levels", table.len()),
        Witness::TypeI { core, k_table } => {
            format!("core n={core}, k(m<={})={}", k_table.len(), k_table.last().map_or(0, |p| p.1))
        }
        Witness::ZeroBound { bounds, affine } => match affine {
            Some((a, b)) => format!("bounded sublevels ({} levels), envelope {b}n+{a}", bounds.len()),
            None => format!("bounded sublevels ({} levels)", bounds.len()),
        },
        Witness::Escape { n, points } => format!(
            "A_{n} escapes: levels {}",
            points.iter().map(|p| p.level.to_string()).collect::<Vec<_>>().join("→")
        ),
        Witness::FilterInside { n, k } => format!("F_{k} ⊆ A_{n}"),
    }
}

pub fn verdict_line(v: &Verdict) -> String {
    let mut s = format!("{}: {} [{}]", v.claim, status_word(v.status), v.label);
    if let Some(w) = &v.witness {
        s += &format!(" {}", witness_text(w));
    }
    if let Some(t) = &v.diagnostics.trend {
        s += &format!(" trend={t}");
    }
    s
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        _ => None,
    }
}

fn collect_pairs(path: &str, v: &Value, rows: &mut Vec<String>) {
    match v {
        Value::Array(items) => {
            let pairs: Option<Vec<(String, String)>> = items
                .iter()
                .map(|it| match it {
                    Value::Array(p) if p.len() == 2 => Some((scalar(&p[0])?, scalar(&p[1])?)),
                    _ => None,
                })
                .collect();
            match pairs {
                Some(ps) if !ps.is_empty() => {
                    let (section, series) = path.rsplit_once('.').unwrap_or((path, ""));
                    for (x, y) in ps {
                        rows.push(format!("{},{},{},{}", csv_field(section), csv_field(series), x, y));
                    }
                }
                _ => {
                    for (i, it) in items.iter().enumerate() {
                        collect_pairs(&format!("{path}[{i}]"), it, rows);
                    }
                }
            }
        }
        Value::Object(map) => {
            for (k, it) in map {
                collect_pairs(&format!("{path}.{k}"), it, rows);
            }
        }
        _ => {}
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use coarse_double::space::{MetricSpace, Window};
    use coarse_double::verdict::Series;

    #[test]
    fn round_trip_and_csv() {
        let w = Window::around(&MetricSpace::NatLine, 8);
        let mut s = Series::new("ratio");
        s.push_int(1, 2);
        let v = Verdict::certified("c", "projection", Witness::Affine { alpha: 0, beta: 2 }, &w).with_series(s);
        let mut r = RunReport::new("eval");
        r.verdict(v);
        r.put("value", "9");
        r.put("interval", serde_json::json!({"series": [["32", "1/2"], ["64", "1/2"]]}));
        let back = RunReport::from_json(&r.to_json()).unwrap();
        assert_eq!(back, r);
        assert_eq!(back.to_json(), r.to_json());
        let csv = r.to_csv();
        assert!(csv.contains("c,ratio,1,2"));
        assert!(csv.contains("interval,series,64,1/2"));
        assert!(r.to_text().starts_with("c: Certified [projection] (α,β)=(0,2)"));
    }
}
