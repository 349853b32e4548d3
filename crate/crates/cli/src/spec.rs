//! The json problem description read by every command.

use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    pub schema: u32,
    /// Used when the command line says `run`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<String>,
    /// `q` or `p:PRIME`.
    #[serde(default = "default_field")]
    pub field: String,
    pub ring: RingBlock,
    /// Defaults to the residue field.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub module: Option<ModuleBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub construction: Option<Construction>,
    #[serde(default)]
    pub caps: Caps,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theorem: Option<TheoremBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub massey: Option<MasseyBlock>,
    /// Try the Jacobian certificates in Golod tests.
    #[serde(default = "yes")]
    pub certify: bool,
}

fn default_field() -> String {
    "q".into()
}

fn yes() -> bool {
    true
}

/// `k[variables] / (ideal)` with optional positive weights.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RingBlock {
    pub variables: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<u32>>,
    #[serde(default)]
    pub ideal: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum ModuleBlock {
    ResidueField,
    /// The ideal generated by these elements.
    Ideal(Vec<String>),
    /// The ring modulo these elements.
    Quotient(Vec<String>),
    /// Cokernel of `⊕ A(-b_j) -> ⊕ A(-a_i)`; `relations[j][i]` has degree `b_j - a_i`.
    Presentation {
        degrees: Vec<usize>,
        #[serde(default)]
        relations: Vec<Vec<String>>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Construction {
    /// `R ⋉ M`, with `M` moved into positive degrees if needed.
    TrivialExtension { module: ModuleBlock },
    /// `R ×_{R/I} R`
    Fibre { ideal: Vec<String> },
    /// `R ×_{R/I} ⋯ ×_{R/I} R` with `n` factors.
    IteratedFibre { ideal: Vec<String>, n: usize },
    /// `R ×_k R_2`
    FibreOverResidue { second: RingBlock },
    /// `R / J` with the projection.
    Quotient { ideal: Vec<String> },
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Caps {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TheoremBlock {
    pub name: String,
    /// The ideal `I` of fibre-product statements.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub ideal: Vec<String>,
    /// Numbers of factors for the fibre tower.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub ns: Vec<usize>,
    /// Which section of a retract to use, counting from 0.
    #[serde(default)]
    pub section: usize,
    /// Second factor of a fibre product over `k`; defaults to the ring itself.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub second: Option<RingBlock>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MasseyBlock {
    /// Highest order swept; every order from 2 up is run.
    pub order: usize,
    /// `ring` or `module`; the default is `ring` for the residue field and
    /// `module` otherwise.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<String>,
}

pub const COMMANDS: &[&str] = &[
    "betti",
    "series",
    "golod-ring",
    "golod-module",
    "certify-huneke",
    "massey",
    "construct",
    "verify-theorem",
    "largeness",
];

pub const THEOREMS: &[&str] = &[
    "trivial-extension",
    "fibre-product",
    "fibre-tower",
    "retract-descent",
    "retract-series",
    "koszul-identities",
    "retract-equivalence",
    "multiplicativity",
    "large-transfer",
    "lescot",
    "dress-kramer",
];

impl ProblemSpec {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let spec: ProblemSpec =
            serde_json::from_str(text).map_err(|e| CliError::Schema(format!("invalid spec: {e}")))?;
        spec.validate()?;
        Ok(spec)
    }

    /// Structural checks that need no algebra.
    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |field: &str, why: &str| Err(CliError::Schema(format!("{field}: {why}")));
        if self.schema != SCHEMA_VERSION {
            return bad("schema", &format!("unsupported version {}, expected {SCHEMA_VERSION}", self.schema));
        }
        if let Some(c) = &self.command {
            if !COMMANDS.contains(&c.as_str()) {
                return bad("command", &format!("unknown command {c:?}; known: {}", COMMANDS.join(", ")));
            }
        }
        check_ring("ring", &self.ring)?;
        if let Some(m) = &self.module {
            check_module("module", m)?;
        }
        match &self.construction {
            Some(Construction::TrivialExtension { module }) => check_module("construction.module", module)?,
            Some(Construction::Fibre { ideal }) | Some(Construction::Quotient { ideal }) => {
                if ideal.is_empty() {
                    return bad("construction.ideal", "must list at least one generator");
                }
            }
            Some(Construction::IteratedFibre { ideal, n }) => {
                if ideal.is_empty() {
                    return bad("construction.ideal", "must list at least one generator");
                }
                if *n < 2 {
                    return bad("construction.n", "needs at least two factors");
                }
            }
            Some(Construction::FibreOverResidue { second }) => check_ring("construction.second", second)?,
            None => {}
        }
        if let Some(t) = &self.theorem {
            if !THEOREMS.contains(&t.name.as_str()) {
                return bad("theorem.name", &format!("unknown theorem {:?}; known: {}", t.name, THEOREMS.join(", ")));
            }
            if t.ns.iter().any(|n| *n < 2) {
                return bad("theorem.ns", "fibre towers need at least two factors");
            }
            if let Some(r) = &t.second {
                check_ring("theorem.second", r)?;
            }
        }
        if let Some(m) = &self.massey {
            if m.order < 2 {
                return bad("massey.order", "must be at least 2");
            }
            if let Some(mode) = &m.mode {
                if mode != "ring" && mode != "module" {
                    return bad("massey.mode", "must be \"ring\" or \"module\"");
                }
            }
        }
        Ok(())
    }
}

fn check_ring(field: &str, r: &RingBlock) -> Result<(), CliError> {
    if r.variables.is_empty() {
        return Err(CliError::Schema(format!("{field}.variables: must name at least one variable")));
    }
    if let Some(w) = &r.weights {
        if w.len() != r.variables.len() {
            return Err(CliError::Schema(format!(
                "{field}.weights: {} weights for {} variables",
                w.len(),
                r.variables.len()
            )));
        }
    }
    Ok(())
}

fn check_module(field: &str, m: &ModuleBlock) -> Result<(), CliError> {
    match m {
        ModuleBlock::Ideal(g) if g.is_empty() => Err(CliError::Schema(format!(
            "{field}.ideal: must list at least one generator (the zero module is not accepted)"
        ))),
        ModuleBlock::Presentation { degrees, relations } => {
            if degrees.is_empty() {
                return Err(CliError::Schema(format!(
                    "{field}.presentation.degrees: must list at least one generator"
                )));
            }
            if let Some(j) = relations.iter().position(|r| r.len() != degrees.len()) {
                return Err(CliError::Schema(format!(
                    "{field}.presentation.relations[{j}]: expected {} entries",
                    degrees.len()
                )));
            }
            Ok(())
        }
        _ => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_spec_parses() {
        let s = ProblemSpec::from_json(r#"{"schema": 1, "ring": {"variables": ["x"], "ideal": ["x^3"]}}"#).unwrap();
        assert_eq!(s.field, "q");
        assert!(s.certify);
        assert!(s.module.is_none());
    }

    #[test]
    fn module_blocks() {
        let s = ProblemSpec::from_json(
            r#"{"schema": 1, "ring": {"variables": ["x", "y"], "ideal": ["x^2", "y^2"]},
                "module": {"presentation": {"degrees": [0, 1], "relations": [["y", "0"], ["x", "y"]]}}}"#,
        )
        .unwrap();
        assert!(matches!(s.module, Some(ModuleBlock::Presentation { .. })));
        let s = ProblemSpec::from_json(r#"{"schema": 1, "ring": {"variables": ["x"]}, "module": "residue-field"}"#)
            .unwrap();
        assert_eq!(s.module, Some(ModuleBlock::ResidueField));
    }

    #[test]
    fn errors_name_the_field() {
        let e = ProblemSpec::from_json(r#"{"schema": 1, "ring": {"variables": ["x"]}, "module": {"ideal": []}}"#)
            .unwrap_err();
        assert!(e.to_string().contains("module.ideal"), "{e}");
        let e = ProblemSpec::from_json(r#"{"schema": 2, "ring": {"variables": ["x"]}}"#).unwrap_err();
        assert!(e.to_string().contains("schema"));
        let e = ProblemSpec::from_json(r#"{"schema": 1, "ring": {"variables": ["x"]}, "bogus": 1}"#).unwrap_err();
        assert!(e.to_string().contains("bogus"));
        let e =
            ProblemSpec::from_json(r#"{"schema": 1, "ring": {"variables": ["x"], "weights": [1, 2]}}"#).unwrap_err();
        assert!(e.to_string().contains("ring.weights"));
    }
}
