//! TOML experiment configuration.

use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use serde::Deserialize;

use gencx::clifford::SoDouble;
use gencx::linalg::{c, complexify};
use gencx::solver::{
    exact_b_field_family, holomorphic_poisson, with_commuting_gauge, DeformationFamily, OneForm, SoSeries,
};
use gencx::structures::{standard_complex, GeneralizedComplexStructure, GeneralizedMetric, HermitianPair};
use gencx::torus::{Freq, MatrixField, TorusGeometry};
use gencx::{Exec, C64};

#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "config error: {}", self.0)
    }
}

fn bad(msg: impl Into<String>) -> ConfigError {
    ConfigError(msg.into())
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Real dimension `m` of the torus.
    pub dimension: usize,
    pub background: Background,
    #[serde(default)]
    pub flux: Vec<FluxTerm>,
    #[serde(default)]
    pub psi: PsiSpec,
    #[serde(default)]
    pub deformation: Vec<Primitive>,
    pub order: Option<usize>,
    pub tolerances: Option<Tolerances>,
    pub hodge: Option<HodgeSpec>,
    pub verify: Option<VerifySpec>,
    pub output: Option<OutputSpec>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Background {
    /// Kähler pair `(J, ω = gJ)` from a metric and a compatible complex structure;
    /// both default to the standard ones.
    Kaehler {
        g: Option<Vec<Vec<f64>>>,
        complex: Option<Vec<Vec<f64>>>,
    },
    /// Generalized metric from `(g, b)` and a first structure given as a real `2m × 2m` matrix.
    Explicit {
        g: Vec<Vec<f64>>,
        b: Vec<Vec<f64>>,
        j1: Vec<Vec<f64>>,
    },
}

/// `value · dx_i ∧ dx_j ∧ dx_k` (zero-based indices).
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FluxTerm {
    pub indices: [usize; 3],
    pub value: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PsiSpec {
    /// Multiplies the normalized canonical generator of `J₂`.
    #[serde(default = "unit_scale")]
    pub scale: [f64; 2],
}

fn unit_scale() -> [f64; 2] {
    [1.0, 0.0]
}

impl Default for PsiSpec {
    fn default() -> Self {
        Self { scale: unit_scale() }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CosineTerm {
    pub k: Vec<i32>,
    pub index: usize,
    pub amplitude: f64,
    #[serde(default)]
    pub phase: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixTerm {
    #[serde(default)]
    pub order: Option<usize>,
    pub k: Vec<i32>,
    pub matrix: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Primitive {
    /// `t(σ + σ̄)` with `σ = coeff ∂_{z_a} ∧ ∂_{z_b}`.
    ConstantBivector { a: usize, b: usize, coeff: [f64; 2] },
    /// Anticommuting part of `e^{t dξ}` for the real 1-form `ξ = Σ amplitude cos(⟨k,x⟩ + phase) dx_index`.
    ExactBField { xi: Vec<CosineTerm> },
    /// A real `so(V ⊕ V*)` series; each term `matrix · cos(⟨k,x⟩)` at `t^order`.
    Explicit { terms: Vec<MatrixTerm> },
    /// Gauge factor `e^{t g}` with `g` the part commuting with `J₁` of `Σ matrix · cos(⟨k,x⟩)`.
    Gauge { terms: Vec<MatrixTerm> },
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    pub residual: f64,
    pub structure: f64,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HodgeSpec {
    /// Frequency support `‖k‖_∞ ≤ radius`.
    pub radius: i32,
    pub seed: u64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifySpec {
    pub t: f64,
    pub grid: usize,
    pub samples: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub dir: PathBuf,
}

pub const MAX_ORDER: usize = 8;

fn matrix(rows: &[Vec<f64>], size: usize, what: &str) -> Result<DMatrix<f64>, ConfigError> {
    if rows.len() != size || rows.iter().any(|r| r.len() != size) {
        return Err(bad(format!("{what} must be a {size}x{size} matrix")));
    }
    Ok(DMatrix::from_fn(size, size, |i, j| rows[i][j]))
}

fn freq(k: &[i32], m: usize) -> Result<Freq, ConfigError> {
    if k.len() != m {
        return Err(bad(format!("frequency {k:?} must have {m} entries")));
    }
    Ok(Freq(k.to_vec()))
}

/// `matrix · cos(⟨k,x⟩)` as a real field.
fn cosine_field(terms: &[&MatrixTerm], m: usize) -> Result<MatrixField, ConfigError> {
    let mut f = MatrixField::new(m);
    for t in terms {
        let k = freq(&t.k, m)?;
        let mat = complexify(&matrix(&t.matrix, 2 * m, "deformation matrix")?);
        SoDouble::from_matrix(mat.clone()).map_err(|e| bad(format!("deformation matrix: {e}")))?;
        if k.is_zero() {
            f.add_term(k, &mat);
        } else {
            let half = &mat * c(0.5);
            f.add_term(-&k, &half);
            f.add_term(k, &half);
        }
    }
    Ok(f)
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| bad(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let cfg: Self = toml::from_str(text).map_err(|e| bad(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Checks everything that can be checked without building structures.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let m = self.dimension;
        if m == 0 || m % 2 != 0 || m > 8 {
            return Err(bad(format!("dimension must be even and between 2 and 8, got {m}")));
        }
        if let Some(order) = self.order {
            if order == 0 || order > MAX_ORDER {
                return Err(bad(format!("order must be between 1 and {MAX_ORDER}, got {order}")));
            }
        }
        if let Some(t) = self.tolerances {
            if !(t.residual > 0.0 && t.structure > 0.0) {
                return Err(bad("tolerances must be positive"));
            }
        }
        for term in &self.flux {
            let [i, j, k] = term.indices;
            if i.max(j).max(k) >= m || i == j || j == k || i == k {
                return Err(bad(format!("flux indices {:?} invalid in dimension {m}", term.indices)));
            }
        }
        if let Some(v) = &self.verify {
            if !(v.t.is_finite() && v.t > 0.0) || v.grid == 0 {
                return Err(bad("verify needs t > 0 and grid >= 1"));
            }
        }
        if let Some(h) = self.hodge {
            if h.radius < 0 {
                return Err(bad("hodge radius must be non-negative"));
            }
        }
        if self.psi.scale == [0.0, 0.0] {
            return Err(bad("psi scale must be nonzero"));
        }
        for p in &self.deformation {
            match p {
                Primitive::ConstantBivector { a, b, .. } => {
                    if a == b || 2 * a.max(b) + 1 >= m {
                        return Err(bad(format!("bivector indices ({a}, {b}) invalid in dimension {m}")));
                    }
                }
                Primitive::ExactBField { xi } => {
                    if xi.is_empty() {
                        return Err(bad("exact-b-field needs at least one term"));
                    }
                    for t in xi {
                        freq(&t.k, m)?;
                        if t.index >= m {
                            return Err(bad(format!("1-form index {} out of range", t.index)));
                        }
                    }
                }
                Primitive::Explicit { terms } | Primitive::Gauge { terms } => {
                    for t in terms {
                        freq(&t.k, m)?;
                        matrix(&t.matrix, 2 * m, "deformation matrix")?;
                        if t.order == Some(0) {
                            return Err(bad("deformation terms start at order 1"));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn pair(&self) -> Result<HermitianPair, ConfigError> {
        let m = self.dimension;
        let err = |e: gencx::Error| bad(format!("background: {e}"));
        match &self.background {
            Background::Kaehler { g, complex } => {
                let g = match g {
                    Some(rows) => matrix(rows, m, "g")?,
                    None => DMatrix::identity(m, m),
                };
                let jv = match complex {
                    Some(rows) => matrix(rows, m, "complex")?,
                    None => standard_complex(m),
                };
                HermitianPair::kaehler(&g, &jv).map_err(err)
            }
            Background::Explicit { g, b, j1 } => {
                let metric = GeneralizedMetric::from_g_b(&matrix(g, m, "g")?, &matrix(b, m, "b")?).map_err(err)?;
                let j = GeneralizedComplexStructure::from_matrix(complexify(&matrix(j1, 2 * m, "j1")?)).map_err(err)?;
                HermitianPair::new(metric, j).map_err(err)
            }
        }
    }

    pub fn geometry(&self) -> Result<TorusGeometry, ConfigError> {
        let terms: Vec<([usize; 3], f64)> = self.flux.iter().map(|t| (t.indices, t.value)).collect();
        TorusGeometry::from_components(self.dimension, &terms).map_err(|e| bad(format!("flux: {e}")))
    }

    pub fn psi_scale(&self) -> C64 {
        C64::new(self.psi.scale[0], self.psi.scale[1])
    }

    pub fn family(&self, exec: Exec, j1: &GeneralizedComplexStructure, order: usize) -> Result<DeformationFamily, ConfigError> {
        let m = self.dimension;
        let mut family = DeformationFamily::new("none", Vec::new());
        let mut names = Vec::new();
        for p in &self.deformation {
            match p {
                Primitive::ConstantBivector { a, b, coeff } => {
                    let f = holomorphic_poisson(m, *a, *b, C64::new(coeff[0], coeff[1]), order).map_err(|e| bad(e.to_string()))?;
                    family.factors.extend(f.factors);
                    names.push(f.name);
                }
                Primitive::ExactBField { xi } => {
                    let mut form: Option<OneForm> = None;
                    for t in xi {
                        let k = freq(&t.k, m)?;
                        form = Some(match form {
                            None => OneForm::cosine(m, k, t.index, t.amplitude, t.phase),
                            Some(f) => f.plus_cosine(k, t.index, t.amplitude, t.phase),
                        });
                    }
                    let f = exact_b_field_family(exec, &form.expect("validated non-empty"), j1, order);
                    family.factors.extend(f.factors);
                    names.push(f.name);
                }
                Primitive::Explicit { terms } => {
                    let mut series = SoSeries::zeros(m, order);
                    for j in 1..=order {
                        let at: Vec<&MatrixTerm> = terms.iter().filter(|t| t.order.unwrap_or(1) == j).collect();
                        if !at.is_empty() {
                            series.set(j, cosine_field(&at, m)?);
                        }
                    }
                    family.factors.push(series);
                    names.push("explicit".into());
                }
                Primitive::Gauge { terms } => {
                    let refs: Vec<&MatrixTerm> = terms.iter().collect();
                    let generator = cosine_field(&refs, m)?;
                    family = with_commuting_gauge(exec, family, &generator, j1, order);
                    names.push("gauge".into());
                }
            }
        }
        if !names.is_empty() {
            family.name = names.join("+");
        }
        Ok(family)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_keys_are_rejected() {
        let text = "dimension = 4\nbogus = 1\n[background]\nkind = \"kaehler\"\n";
        assert!(ExperimentConfig::parse(text).is_err());
    }

    #[test]
    fn minimal_kaehler_config() {
        let text = "dimension = 2\n[background]\nkind = \"kaehler\"\n";
        let cfg = ExperimentConfig::parse(text).unwrap();
        assert_eq!(cfg.pair().unwrap().dim(), 2);
        assert!(cfg.geometry().unwrap().h_is_zero());
    }

    #[test]
    fn odd_dimension_is_rejected() {
        let text = "dimension = 3\n[background]\nkind = \"kaehler\"\n";
        assert!(ExperimentConfig::parse(text).is_err());
    }
}
