//! Tri-state answers to asymptotic claims, with witnesses and diagnostics.

use crate::rational::{ExactQ, q};
use crate::space::{PointId, Window};
use crate::Q;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    CertifiedOnWindow,
    Falsified,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EscapePoint {
    pub radius: ExactQ,
    pub point: PointId,
    pub level: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Witness {
    /// `v <= β·(u + α)` style bounds; the exact inequality depends on the claim.
    Affine { alpha: u64, beta: u64 },
    /// Monotone `φ` on the listed arguments, extended beyond by the last difference.
    Tabulated { table: Vec<(u64, u64)> },
    /// `A_m ⊆ N_k(A_core)` with `k = k_table[m]`.
    TypeI { core: u64, k_table: Vec<(u64, u64)> },
    /// `A_n ⊆ B_{bound(n)}(x₀)`, optionally with an affine envelope `βn + α`.
    ZeroBound {
        bounds: Vec<(u64, ExactQ)>,
        affine: Option<(u64, u64)>,
    },
    /// Points with level `<= n` on one side whose level on the other side strictly grows.
    Escape { n: u64, points: Vec<EscapePoint> },
    /// `F_k ∩ W ⊆ A_n`.
    FilterInside { n: u64, k: u64 },
}

impl Witness {
    /// Evaluates a tabulated `φ`, extending by the last finite difference.
    pub fn tabulated_at(table: &[(u64, u64)], n: u64) -> Option<u64> {
        let first = table.first()?;
        if n < first.0 {
            return Some(first.1);
        }
        if let Some(&(_, v)) = table.iter().rev().find(|(a, _)| *a <= n) {
            let last = *table.last().unwrap();
            if n <= last.0 {
                return Some(v);
            }
            let slope = if table.len() >= 2 {
                let prev = table[table.len() - 2];
                let (dv, da) = (last.1.saturating_sub(prev.1), last.0 - prev.0);
                dv.div_ceil(da.max(1))
            } else {
                1
            };
            return Some(last.1 + slope.max(1) * (n - last.0));
        }
        None
    }
}

/// Search space for affine witnesses `(α, β)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Grid {
    pub alpha_max: u64,
    pub beta_max: u64,
}

impl Default for Grid {
    fn default() -> Self {
        Grid {
            alpha_max: 8,
            beta_max: 8,
        }
    }
}

impl Grid {
    /// `(α, β)` pairs in β-major order: β ascending, then α ascending.
    pub fn pairs(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        (1..=self.beta_max).flat_map(move |b| (0..=self.alpha_max).map(move |a| (a, b)))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Series {
    pub name: String,
    pub points: Vec<(ExactQ, ExactQ)>,
}

impl Series {
    pub fn new(name: impl Into<String>) -> Self {
        Series {
            name: name.into(),
            points: Vec::new(),
        }
    }

    pub fn push(&mut self, a: Q, b: Q) {
        self.points.push((a.into(), b.into()));
    }

    pub fn push_int(&mut self, a: i64, b: i64) {
        self.push(q(a), q(b));
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub series: Vec<Series>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trend: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub claim: String,
    pub status: Status,
    /// Short outcome tag, e.g. `quasi-equivalent`, `zero`, `type-II-evidence`.
    pub label: String,
    pub witness: Option<Witness>,
    pub counterexample: Option<String>,
    pub diagnostics: Diagnostics,
    pub window: Window,
}

impl Verdict {
    pub fn new(claim: impl Into<String>, status: Status, label: impl Into<String>, window: &Window) -> Self {
        Verdict {
            claim: claim.into(),
            status,
            label: label.into(),
            witness: None,
            counterexample: None,
            diagnostics: Diagnostics::default(),
            window: window.clone(),
        }
    }

    pub fn certified(claim: impl Into<String>, label: impl Into<String>, witness: Witness, window: &Window) -> Self {
        let mut v = Self::new(claim, Status::CertifiedOnWindow, label, window);
        v.witness = Some(witness);
        v
    }

    pub fn inconclusive(claim: impl Into<String>, label: impl Into<String>, window: &Window) -> Self {
        Self::new(claim, Status::Inconclusive, label, window)
    }

    pub fn is_certified(&self) -> bool {
        self.status == Status::CertifiedOnWindow
    }

    pub fn with_series(mut self, s: Series) -> Self {
        self.diagnostics.series.push(s);
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.diagnostics.notes.push(note.into());
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("verdict serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::MetricSpace;

    #[test]
    fn tabulated_extension() {
        let t = [(1, 2), (2, 4), (4, 7)];
        assert_eq!(Witness::tabulated_at(&t, 1), Some(2));
        assert_eq!(Witness::tabulated_at(&t, 3), Some(4));
        assert_eq!(Witness::tabulated_at(&t, 4), Some(7));
        assert_eq!(Witness::tabulated_at(&t, 6), Some(11));
        assert_eq!(Witness::tabulated_at(&[], 6), None);
    }

    #[test]
    fn json_round_trip() {
        let w = Window::around(&MetricSpace::NatLine, 8);
        let v = Verdict::certified("e ~ e", "quasi-equivalent", Witness::Affine { alpha: 0, beta: 1 }, &w)
            .with_series({
                let mut s = Series::new("T12");
                s.push_int(1, 1);
                s
            });
        let js = v.to_json();
        assert!(js.contains(r#""witness":{"kind":"affine","alpha":0,"beta":1}"#));
        let back: Verdict = serde_json::from_str(&js).unwrap();
        assert_eq!(back, v);
    }
}
