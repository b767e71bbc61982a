//! TOML scenario files.
//!
//! ```toml
//! [material]
//! m_rel = 0.1
//!
//! [leads]
//! u_left = 0.0
//! u_right = 0.0
//!
//! [[piece]]
//! x_lo = -15.0
//! x_hi = 15.0
//! kind = "parabola"   # U = a (x - x0)^2; omit kind and give `u` for a constant
//! a = 0.004249
//! x0 = 0.0
//!
//! [[delta]]
//! x = 0.0
//! g = -0.25           # eV nm
//!
//! [sweep]
//! e_min = 0.05
//! e_max = 1.5
//! points = 100
//!
//! [discretize]
//! n = 64
//! strategy = "equal-width"
//!
//! [converge]
//! n0 = 4
//! epsilon = 1e-6
//! n_max = 1024
//! ```

use std::ops::Range;

use serde::{Deserialize, Serialize};
use toml::Spanned;

use crate::discretize::DivisionStrategy;
use crate::error::{Error, Result};
use crate::model::{DeltaTerm, Material, Piece, PotentialModel, Profile, EDGE_TOLERANCE};
use crate::solve::{ConvergencePolicy, SweepSpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialSection {
    pub m_rel: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LeadsSection {
    pub u_left: f64,
    pub u_right: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PieceSection {
    pub x_lo: f64,
    pub x_hi: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    /// Vertex of the parabola.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x0: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeltaSection {
    pub x: f64,
    pub g: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub e_min: f64,
    pub e_max: f64,
    pub points: usize,
}

fn default_strategy() -> String {
    "equal-width".into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiscretizeSection {
    pub n: usize,
    #[serde(default = "default_strategy")]
    pub strategy: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub e_ref: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fraction: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvergeSection {
    pub n0: usize,
    pub epsilon: f64,
    pub n_max: usize,
}

/// Parsed scenario file. Piece and delta entries keep their source spans so
/// validation errors can point at a line.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub material: MaterialSection,
    pub leads: LeadsSection,
    #[serde(default, rename = "piece", skip_serializing_if = "Vec::is_empty")]
    pub pieces: Vec<Spanned<PieceSection>>,
    #[serde(default, rename = "delta", skip_serializing_if = "Vec::is_empty")]
    pub deltas: Vec<Spanned<DeltaSection>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub discretize: Option<DiscretizeSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub converge: Option<ConvergeSection>,
    /// Source text the spans refer to; empty for built-in scenarios.
    #[serde(skip)]
    source: String,
}

impl PartialEq for ScenarioConfig {
    fn eq(&self, other: &Self) -> bool {
        self.material == other.material
            && self.leads == other.leads
            && self.pieces == other.pieces
            && self.deltas == other.deltas
            && self.sweep == other.sweep
            && self.discretize == other.discretize
            && self.converge == other.converge
    }
}

/// 1-based line of a byte offset.
fn line_of(source: &str, offset: usize) -> Option<usize> {
    if source.is_empty() {
        return None;
    }
    let end = offset.min(source.len());
    Some(source.as_bytes()[..end].iter().filter(|&&b| b == b'\n').count() + 1)
}

impl ScenarioConfig {
    pub fn new(
        material: MaterialSection,
        leads: LeadsSection,
        pieces: Vec<PieceSection>,
        deltas: Vec<DeltaSection>,
    ) -> Self {
        Self {
            material,
            leads,
            pieces: pieces.into_iter().map(|p| Spanned::new(0..0, p)).collect(),
            deltas: deltas.into_iter().map(|d| Spanned::new(0..0, d)).collect(),
            sweep: None,
            discretize: None,
            converge: None,
            source: String::new(),
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut config: ScenarioConfig = toml::from_str(text).map_err(|e| Error::Config {
            line: e.span().and_then(|s| line_of(text, s.start)),
            message: e.message().trim().to_string(),
        })?;
        config.source = text.to_string();
        Ok(config)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::parse(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario config is always serializable")
    }

    fn error_at(&self, span: Range<usize>, message: String) -> Error {
        Error::Config {
            line: line_of(&self.source, span.start),
            message,
        }
    }

    fn piece(&self, entry: &Spanned<PieceSection>) -> Result<Piece> {
        let p = entry.get_ref();
        let fail = |msg: String| self.error_at(entry.span(), msg);
        if !(p.x_lo.is_finite() && p.x_hi.is_finite() && p.x_lo < p.x_hi) {
            return Err(fail(format!("piece: need x_lo < x_hi, got [{}, {}]", p.x_lo, p.x_hi)));
        }
        let profile = match (p.kind.as_deref(), p.u) {
            (None | Some("constant"), Some(u)) => {
                if p.a.is_some() || p.x0.is_some() {
                    return Err(fail("piece: `a` and `x0` only apply to kind = \"parabola\"".into()));
                }
                if !u.is_finite() {
                    return Err(fail(format!("piece: `u` must be finite, got {u}")));
                }
                Profile::Constant(u)
            }
            (None | Some("constant"), None) => return Err(fail("piece: missing `u`".into())),
            (Some("parabola"), None) => {
                let a = p.a.ok_or_else(|| fail("piece: parabola needs `a`".into()))?;
                if !a.is_finite() {
                    return Err(fail(format!("piece: `a` must be finite, got {a}")));
                }
                let vertex = p.x0.unwrap_or(0.0);
                if !vertex.is_finite() {
                    return Err(fail(format!("piece: `x0` must be finite, got {vertex}")));
                }
                Profile::Parabola { a, vertex }
            }
            (Some("parabola"), Some(_)) => return Err(fail("piece: parabola takes `a` and `x0`, not `u`".into())),
            (Some(other), _) => return Err(fail(format!("piece: unknown kind `{other}`"))),
        };
        Ok(Piece::smooth(p.x_lo, p.x_hi, profile))
    }

    /// Validated potential model.
    pub fn model(&self) -> Result<PotentialModel> {
        let material = Material::new(self.material.m_rel).map_err(|e| Error::Config {
            line: None,
            message: format!("material.m_rel: {e}"),
        })?;
        for (name, v) in [("leads.u_left", self.leads.u_left), ("leads.u_right", self.leads.u_right)] {
            if !v.is_finite() {
                return Err(Error::Config {
                    line: None,
                    message: format!("{name} must be finite, got {v}"),
                });
            }
        }
        let mut pieces = Vec::with_capacity(self.pieces.len());
        for entry in &self.pieces {
            pieces.push((entry.span(), self.piece(entry)?));
        }
        pieces.sort_by(|a, b| a.1.x_lo.total_cmp(&b.1.x_lo));
        for w in pieces.windows(2) {
            let gap = w[1].1.x_lo - w[0].1.x_hi;
            if gap.abs() > EDGE_TOLERANCE {
                let what = if gap < 0.0 { "overlaps" } else { "leaves a gap after" };
                return Err(self.error_at(
                    w[1].0.clone(),
                    format!("piece starting at x = {} {what} the piece ending at x = {}", w[1].1.x_lo, w[0].1.x_hi),
                ));
            }
        }
        let support = match (pieces.first(), pieces.last()) {
            (Some(first), Some(last)) => Some((first.1.x_lo, last.1.x_hi)),
            _ => None,
        };
        let mut deltas = Vec::with_capacity(self.deltas.len());
        for entry in &self.deltas {
            let d = entry.get_ref();
            let term = DeltaTerm::new(d.x, d.g)
                .map_err(|e| self.error_at(entry.span(), format!("delta: {e}")))?;
            if let Some((lo, hi)) = support {
                if d.x < lo - EDGE_TOLERANCE || d.x > hi + EDGE_TOLERANCE {
                    return Err(self.error_at(
                        entry.span(),
                        format!("delta: x = {} lies outside the pieces [{lo}, {hi}]", d.x),
                    ));
                }
            }
            deltas.push(term);
        }
        PotentialModel::new(
            self.leads.u_left,
            self.leads.u_right,
            pieces.into_iter().map(|(_, p)| p).collect(),
            deltas,
            material,
        )
        .map_err(|e| Error::Config {
            line: None,
            message: e.to_string(),
        })
    }

    pub fn sweep_spec(&self) -> Result<SweepSpec> {
        let s = self.sweep.as_ref().ok_or_else(|| Error::Config {
            line: None,
            message: "missing [sweep] section".into(),
        })?;
        SweepSpec::new(s.e_min, s.e_max, s.points).map_err(|e| Error::Config {
            line: None,
            message: format!("sweep: {e}"),
        })
    }

    /// Region count from `[discretize]`, if present.
    pub fn regions(&self) -> Option<usize> {
        self.discretize.as_ref().map(|d| d.n)
    }

    /// Division strategy from `[discretize]`; equal-width when absent.
    pub fn strategy(&self) -> Result<DivisionStrategy> {
        let Some(d) = &self.discretize else {
            return Ok(DivisionStrategy::EqualWidth);
        };
        let spec = match (d.strategy.as_str(), d.fraction, d.e_ref) {
            (s, _, _) if s.contains(':') => s.to_string(),
            ("equal-phase", _, Some(e)) => format!("equal-phase:{e}"),
            ("wavelength-bounded", Some(f), Some(e)) => format!("wavelength-bounded:{f}:{e}"),
            (s, _, _) => s.to_string(),
        };
        spec.parse().map_err(|e: Error| Error::Config {
            line: None,
            message: format!("discretize.strategy: {e}"),
        })
    }

    /// Convergence policy from `[converge]`; library defaults when absent.
    pub fn policy(&self) -> Result<ConvergencePolicy> {
        match &self.converge {
            None => Ok(ConvergencePolicy::default()),
            Some(c) => ConvergencePolicy::new(c.n0, c.epsilon, c.n_max).map_err(|e| Error::Config {
                line: None,
                message: format!("converge: {e}"),
            }),
        }
    }
}
