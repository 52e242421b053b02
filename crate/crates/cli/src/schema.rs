//! The JSON problem file: the stable input contract of the tool.
//!
//! Parameter expressions are functions of a single variable `x`. For
//! `alpha_expr`, `beta_expr` and `gamma_expr` that variable is the
//! transformed coordinate; `k_expr` and `delta_expr` take the original one.

use std::sync::Arc;

use exmex::{Express, FlatEx};
use painlin::closed_forms::shear_free_problem;
use painlin::physics::{from_bianchi, from_tsallis, from_viscous};
use painlin::{FunctionFamily, OdeProblem, Param, Start};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub schema_version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<Family>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variable: Option<Variable>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub physics: Option<Physics>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solution: Option<SolutionSpec>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Unit,
    Power,
    GenericTable,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Variable {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha_expr: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta_expr: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma_expr: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_expr: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_expr: Option<String>,
    /// `(y, f(y))` pairs of a tabulated f.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<Vec<[f64; 2]>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "scenario", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Physics {
    Tsallis { q: f64 },
    Bianchi { c: f64, c1: f64, c2: f64 },
    Viscous { r: f64, alpha: f64, beta: f64 },
    ShearFree { forcing_expr: String },
}

/// Integration constants or initial data, plus an optional default span.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolutionSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constants: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ydot0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub span: Option<[f64; 2]>,
}

impl SolutionSpec {
    pub fn start(&self) -> Result<Start, String> {
        match (&self.constants, self.x0, self.y0, self.ydot0) {
            (Some(c), None, None, None) => Ok(Start::Constants(c.clone())),
            (None, Some(x0), Some(y0), Some(dy0)) => Ok(Start::Initial { x0, y0, dy0 }),
            _ => Err("solution needs either `constants` or all of `x0`, `y0`, `ydot0`".into()),
        }
    }
}

/// `file:line:column: message` for a JSON decoding failure.
pub fn json_error(name: &str, e: &serde_json::Error) -> CliError {
    let msg = e.to_string();
    let bare = msg.rsplit_once(" at line ").map_or(msg.as_str(), |(m, _)| m);
    CliError::Input(format!("{name}:{}:{}: {bare}", e.line(), e.column()))
}

/// A parsed problem file with its source text, kept for anchored messages.
pub struct Loaded {
    pub file: ProblemFile,
    pub name: String,
    text: String,
}

impl Loaded {
    pub fn parse(name: &str, text: &str) -> Result<Self, CliError> {
        let file: ProblemFile = serde_json::from_str(text).map_err(|e| json_error(name, &e))?;
        let loaded = Loaded {
            file,
            name: name.to_string(),
            text: text.to_string(),
        };
        if loaded.file.schema_version != SCHEMA_VERSION {
            return Err(loaded.at_key(
                "schema_version",
                format!(
                    "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                    loaded.file.schema_version
                ),
            ));
        }
        Ok(loaded)
    }

    pub fn read(path: &str) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{path}: {e}")))?;
        Self::parse(path, &text)
    }

    /// An input error anchored at the first line mentioning `key`.
    pub fn at_key(&self, key: &str, msg: impl std::fmt::Display) -> CliError {
        let quoted = format!("\"{key}\"");
        match self.text.lines().position(|l| l.contains(&quoted)) {
            Some(i) => CliError::Input(format!("{}:{}: {key}: {msg}", self.name, i + 1)),
            None => CliError::Input(format!("{}: {key}: {msg}", self.name)),
        }
    }

    pub fn start(&self) -> Result<Option<Start>, CliError> {
        self.file
            .solution
            .as_ref()
            .map(|s| s.start().map_err(|e| self.at_key("solution", e)))
            .transpose()
    }

    pub fn default_span(&self) -> Option<(f64, f64)> {
        self.file.solution.as_ref().and_then(|s| s.span).map(|[a, b]| (a, b))
    }

    pub fn problem(&self) -> Result<OdeProblem, CliError> {
        let f = &self.file;
        if let Some(physics) = &f.physics {
            let explicit = f.family.is_some()
                || [f.b, f.n, f.k, f.alpha, f.beta, f.gamma, f.delta]
                    .iter()
                    .any(Option::is_some)
                || f.variable.is_some();
            if explicit {
                return Err(self.at_key(
                    "physics",
                    "give either a physics scenario or explicit parameters, not both",
                ));
            }
            return self.physics_problem(physics);
        }
        let var = f.variable.clone().unwrap_or_default();
        let family = match f.family {
            None => return Err(self.at_key("family", "missing (or give a physics scenario)")),
            Some(Family::Unit) => FunctionFamily::Unit,
            Some(Family::Power) => {
                let n = f.n.ok_or_else(|| self.at_key("family", "power family needs `n`"))?;
                FunctionFamily::power(f.b.unwrap_or(1.0), n, f.k.unwrap_or(0.0)).map_err(|e| self.at_key("n", e))?
            }
            Some(Family::GenericTable) => {
                let table = var
                    .table
                    .as_ref()
                    .ok_or_else(|| self.at_key("family", "generic-table needs `variable.table`"))?;
                let points: Vec<(f64, f64)> = table.iter().map(|&[y, v]| (y, v)).collect();
                FunctionFamily::table(&points).map_err(|e| self.at_key("table", e))?
            }
        };
        if var.table.is_some() && f.family != Some(Family::GenericTable) {
            return Err(self.at_key("table", "a table is only read for the generic-table family"));
        }
        let alpha = self.param("alpha", f.alpha, var.alpha_expr.as_deref())?;
        let beta = self.param("beta", f.beta, var.beta_expr.as_deref())?;
        let gamma = self.param("gamma", f.gamma, var.gamma_expr.as_deref())?;
        let delta = self.param("delta", f.delta, var.delta_expr.as_deref())?;
        let mut problem = OdeProblem::new(family, alpha, beta, gamma)
            .and_then(|p| p.with_delta(delta))
            .map_err(|e| self.at_key("alpha", e))?;
        if let Some(src) = var.k_expr.as_deref() {
            if f.k.is_some_and(|k| k != 0.0) {
                return Err(self.at_key("k_expr", "conflicts with a nonzero constant `k`"));
            }
            let k = self.expression("k_expr", src)?;
            problem = problem
                .with_offset_map(move |x| k(x))
                .map_err(|e| self.at_key("k_expr", e))?;
        }
        Ok(problem)
    }

    fn physics_problem(&self, physics: &Physics) -> Result<OdeProblem, CliError> {
        let built = match physics {
            Physics::Tsallis { q } => from_tsallis(*q),
            Physics::Bianchi { c, c1, c2 } => from_bianchi(*c, *c1, *c2),
            Physics::Viscous { r, alpha, beta } => from_viscous(*r, *alpha, *beta),
            Physics::ShearFree { forcing_expr } => {
                let forcing = self.expression("forcing_expr", forcing_expr)?;
                shear_free_problem(forcing)
            }
        };
        built.map_err(|e| self.at_key("physics", e))
    }

    fn param(&self, name: &str, value: Option<f64>, expr: Option<&str>) -> Result<Param, CliError> {
        match (value, expr) {
            (Some(_), Some(_)) => Err(self.at_key(name, format!("given both as a number and as `{name}_expr`"))),
            (_, Some(src)) => Ok(Param::Map(self.expression(&format!("{name}_expr"), src)?)),
            (v, None) => Ok(Param::Const(v.unwrap_or(0.0))),
        }
    }

    fn expression(&self, key: &str, src: &str) -> Result<painlin::numeric::ScalarFn, CliError> {
        compile(src).map_err(|e| self.at_key(key, e))
    }
}

/// Compiles an expression in the single variable `x`.
pub fn compile(src: &str) -> Result<painlin::numeric::ScalarFn, String> {
    let expr: FlatEx<f64> = exmex::parse(src).map_err(|e| format!("cannot parse `{src}`: {e}"))?;
    match expr.var_names() {
        [] => {
            let v = expr.eval(&[]).map_err(|e| e.to_string())?;
            Ok(Arc::new(move |_| v))
        }
        [x] if x == "x" => {
            expr.eval(&[0.5]).map_err(|e| format!("cannot evaluate `{src}`: {e}"))?;
            Ok(Arc::new(move |x| expr.eval(&[x]).unwrap_or(f64::NAN)))
        }
        names => Err(format!(
            "`{src}` may only use the variable x, found {}",
            names.join(", ")
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use painlin::{classify, FamilyClass};

    fn load(text: &str) -> Result<OdeProblem, CliError> {
        Loaded::parse("p.json", text)?.problem()
    }

    #[test]
    fn painleve_ince_file() {
        let p = load(r#"{"schema_version": 1, "family": "power", "n": 1, "alpha": 3, "beta": 2}"#).unwrap();
        assert_eq!(classify(&p).unwrap(), FamilyClass::PainleveInce);
    }

    #[test]
    fn syntax_errors_carry_line_and_column() {
        let Err(CliError::Input(msg)) = Loaded::parse("p.json", "{\n  \"schema_version\": 1,\n  \"alpha\": ,\n}")
        else {
            panic!("expected an input error");
        };
        assert!(msg.starts_with("p.json:3:"), "{msg}");
        assert!(!msg.contains(" at line "), "{msg}");
    }

    #[test]
    fn semantic_errors_point_at_the_key() {
        let text = "{\n  \"schema_version\": 1,\n  \"family\": \"power\",\n  \"n\": 1,\n  \"variable\": {\n    \"k_expr\": \"x +\"\n  }\n}";
        let Err(CliError::Input(msg)) = load(text) else {
            panic!()
        };
        assert!(msg.starts_with("p.json:6: k_expr"), "{msg}");
    }

    #[test]
    fn unknown_fields_and_versions_are_rejected() {
        assert!(load(r#"{"schema_version": 1, "family": "unit", "alpah": 1}"#).is_err());
        assert!(load(r#"{"schema_version": 2, "family": "unit"}"#).is_err());
    }

    #[test]
    fn expressions() {
        let f = compile("sin(x) + 2*x^2").unwrap();
        assert!((f(1.0) - (1f64.sin() + 2.0)).abs() < 1e-15);
        assert_eq!(compile("3").unwrap()(7.0), 3.0);
        assert!(compile("y + 1").is_err());
    }

    #[test]
    fn physics_scenarios_load() {
        let p = load(r#"{"schema_version": 1, "physics": {"scenario": "tsallis", "q": -1}}"#).unwrap();
        assert_eq!(p.constants().unwrap().0, -3.0);
        let p = load(r#"{"schema_version": 1, "physics": {"scenario": "shear-free", "forcing_expr": "x"}}"#).unwrap();
        assert_eq!(classify(&p).unwrap(), FamilyClass::ShearFree);
        assert!(load(r#"{"schema_version": 1, "alpha": 1, "physics": {"scenario": "tsallis", "q": 2}}"#).is_err());
    }

    #[test]
    fn generic_table() {
        let p = load(
            r#"{"schema_version": 1, "family": "generic-table", "alpha": 1, "beta": 0.5,
                "variable": {"table": [[0.1, 1.01], [1, 2], [2, 5], [3, 10]]}}"#,
        )
        .unwrap();
        assert_eq!(classify(&p).unwrap(), FamilyClass::GenericLinearizable);
    }
}
