//! Run configuration: strict TOML (or JSON) with CLI flag overrides.
//!
//! Unknown keys are rejected everywhere so a typo cannot silently skip a
//! check. Precedence per setting: built-in default < config file < `PBTK_TOL`
//! environment variable (tolerance only) < command-line flag.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Option<String>,
    pub seed: Option<u64>,
    pub tolerance: Option<f64>,
    pub report: Option<PathBuf>,
    pub csv_dir: Option<PathBuf>,
    #[serde(default)]
    pub pf: PfSection,
    #[serde(default)]
    pub epf: EpfSection,
    #[serde(default)]
    pub dpb: DpbSection,
    #[serde(default)]
    pub gauss2d: GaussSection,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PfSection {
    pub delta: f64,
    pub omega: f64,
    pub theta: f64,
    /// Extra two-level models to decompose and verify (config file only).
    pub models: Vec<ModelSection>,
}

impl Default for PfSection {
    fn default() -> Self {
        Self {
            delta: 0.6,
            omega: 1.0,
            theta: 0.0,
            models: Vec::new(),
        }
    }
}

/// Two-level model parameter row. `kind` selects which fields apply.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ModelSection {
    Dg {
        r: f64,
        s: f64,
        t: f64,
        theta: f64,
        phi: f64,
    },
    Gmm {
        eps1: f64,
        eps2: f64,
        gamma1: f64,
        gamma2: f64,
        nu0: [f64; 2],
    },
    Mo {
        e: f64,
        theta: [f64; 2],
        phi: [f64; 2],
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EpfSection {
    pub m: usize,
    /// "random", "standard", or "file".
    pub basis: String,
    pub kappa: f64,
    /// Basis vectors loaded from a JSON file (for `basis = "file"`).
    pub basis_file: Option<PathBuf>,
}

impl Default for EpfSection {
    fn default() -> Self {
        Self {
            m: 3,
            basis: "random".into(),
            kappa: 100.0,
            basis_file: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DpbSection {
    pub cutoff: usize,
    /// "identity", "random", or "diagonal" (with `diagonal` entries).
    pub s_kind: String,
    pub kappa: f64,
    pub diagonal: Vec<[f64; 2]>,
    /// Explicit similarity matrix (for `s_kind = "explicit"`), in the
    /// dim/data wire schema.
    pub matrix: Option<pbtk_core::Operator>,
    /// Full similarity object (`{"kind": ...}`); takes precedence over the
    /// flattened `s_kind` fields when present.
    pub s: Option<pbtk_core::dpb::SimilaritySpec>,
    /// Quadrature radius; omitted or non-positive means the tail rule.
    pub radius: Option<f64>,
    pub n_r: usize,
    /// Angular nodes; omitted means the bandwidth default.
    pub n_theta: Option<usize>,
}

impl Default for DpbSection {
    fn default() -> Self {
        Self {
            cutoff: 40,
            s_kind: "random".into(),
            kappa: 100.0,
            diagonal: Vec::new(),
            matrix: None,
            s: None,
            radius: None,
            n_r: 200,
            n_theta: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GaussSection {
    pub epsilon: f64,
    pub xi: i8,
    pub n_max: usize,
    pub degree_cap: usize,
}

impl Default for GaussSection {
    fn default() -> Self {
        Self {
            epsilon: 0.4,
            xi: 1,
            n_max: 3,
            degree_cap: pbtk_core::gauss2d::DEFAULT_DEGREE_CAP,
        }
    }
}

/// Load a configuration file, choosing the format by extension and falling
/// back to trying both parsers. Errors carry the parser's line/field
/// diagnostics.
pub fn load_config(path: &Path) -> Result<RunConfig, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    match path.extension().and_then(|s| s.to_str()) {
        Some("json") => serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display())),
        Some("toml") => toml::from_str(&text).map_err(|e| format!("{}: {e}", path.display())),
        _ => toml::from_str(&text).or_else(|toml_err| {
            serde_json::from_str(&text).map_err(|json_err| {
                format!(
                    "{}: not valid TOML ({toml_err}) nor JSON ({json_err})",
                    path.display()
                )
            })
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_keys_are_rejected() {
        let bad = "command = \"pf\"\n[pf]\ndelta = 0.6\nomgea = 1.0\n";
        let err = toml::from_str::<RunConfig>(bad).unwrap_err().to_string();
        assert!(
            err.contains("omgea"),
            "diagnostic should name the field: {err}"
        );
    }

    #[test]
    fn defaults_fill_missing_sections() {
        let cfg: RunConfig = toml::from_str("command = \"verify-all\"\nseed = 7\n").unwrap();
        assert_eq!(cfg.seed, Some(7));
        assert_eq!(cfg.pf.delta, 0.6);
        assert_eq!(cfg.dpb.cutoff, 40);
        assert_eq!(cfg.gauss2d.xi, 1);
    }

    #[test]
    fn json_alternative_accepted() {
        let cfg: RunConfig =
            serde_json::from_str(r#"{"command": "epf", "epf": {"m": 5}}"#).unwrap();
        assert_eq!(cfg.epf.m, 5);
        assert_eq!(cfg.epf.basis, "random");
    }

    #[test]
    fn model_rows_parse_by_kind() {
        let cfg: RunConfig = toml::from_str(
            r#"
command = "pf"
[[pf.models]]
kind = "gmm"
eps1 = 1.0
eps2 = -0.5
gamma1 = 0.3
gamma2 = 0.7
nu0 = [0.9, 0.0]
"#,
        )
        .unwrap();
        assert_eq!(cfg.pf.models.len(), 1);
        assert!(matches!(cfg.pf.models[0], ModelSection::Gmm { .. }));
    }
}
