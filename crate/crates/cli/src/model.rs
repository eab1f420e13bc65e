//! Model files: a line-oriented text grammar and a JSON mirror of it.
//!
//! ```text
//! component <name> <max>
//! influence <u> -> <v> [+|-][o]
//! param <P-name> <v> | <u1>=<k1>,... | <value>
//! initial <v1>=<k1>,...
//! goal <v>=<k>
//! # comment
//! ```

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::Path;

use prnred_core::{
    satisfies_constraints, ComponentId, ConcreteParametrisationSet, Constraints, Goal, NetworkDecl, Parametrisation,
    Prn, State, Value,
};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{0}")]
    Semantic(String),
    #[error("invalid JSON model: {0}")]
    Json(#[from] serde_json::Error),
    #[error("cannot read file")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentEntry {
    pub name: String,
    pub max: Value,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InfluenceEntry {
    pub regulator: String,
    pub target: String,
    #[serde(default)]
    pub constraints: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Assignment {
    pub component: String,
    pub value: Value,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamRow {
    pub component: String,
    pub regulators: Vec<Assignment>,
    pub value: Value,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NamedParametrisation {
    pub name: String,
    pub rows: Vec<ParamRow>,
}

/// Syntax tree shared by both formats.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub components: Vec<ComponentEntry>,
    #[serde(default)]
    pub influences: Vec<InfluenceEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub parametrisations: Vec<NamedParametrisation>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<Vec<Assignment>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub goal: Option<Assignment>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
}

impl Format {
    /// JSON for `.json` files, text otherwise.
    pub fn guess(path: &Path) -> Format {
        match path.extension().and_then(|e| e.to_str()) {
            Some("json") => Format::Json,
            _ => Format::Text,
        }
    }
}

pub fn read_model(path: &Path, format: Option<Format>) -> Result<ModelFile, ModelError> {
    let text = std::fs::read_to_string(path).map_err(|source| ModelError::Io {
        path: path.display().to_string(),
        source,
    })?;
    match format.unwrap_or_else(|| Format::guess(path)) {
        Format::Text => parse_text(&text),
        Format::Json => parse_json(&text),
    }
}

pub fn parse_json(text: &str) -> Result<ModelFile, ModelError> {
    Ok(serde_json::from_str(text)?)
}

pub fn to_json(model: &ModelFile) -> String {
    let mut s = serde_json::to_string_pretty(model).expect("model serialises");
    s.push('\n');
    s
}

fn is_name(s: &str) -> bool {
    let mut chars = s.chars();
    chars.next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
}

struct Line<'a> {
    number: usize,
    text: &'a str,
}

impl<'a> Line<'a> {
    fn err(&self, at: &str, message: impl Into<String>) -> ModelError {
        // `at` is always a subslice of the line.
        let column = at.as_ptr() as usize - self.text.as_ptr() as usize + 1;
        ModelError::Syntax {
            line: self.number,
            column,
            message: message.into(),
        }
    }

    fn name(&self, token: &'a str) -> Result<String, ModelError> {
        if is_name(token) {
            Ok(token.to_string())
        } else {
            Err(self.err(token, format!("invalid name `{token}`")))
        }
    }

    fn value(&self, token: &'a str) -> Result<Value, ModelError> {
        token
            .parse()
            .map_err(|_| self.err(token, format!("invalid value `{token}`")))
    }

    fn assignment(&self, token: &'a str) -> Result<Assignment, ModelError> {
        let token = token.trim();
        let Some((name, value)) = token.split_once('=') else {
            return Err(self.err(token, format!("expected `name=value`, found `{token}`")));
        };
        Ok(Assignment {
            component: self.name(name.trim())?,
            value: self.value(value.trim())?,
        })
    }

    fn assignments(&self, field: &'a str) -> Result<Vec<Assignment>, ModelError> {
        if field.trim().is_empty() {
            return Ok(Vec::new());
        }
        field.split(',').map(|t| self.assignment(t)).collect()
    }
}

/// Parses the text grammar. Syntax errors carry 1-based line and column.
pub fn parse_text(text: &str) -> Result<ModelFile, ModelError> {
    let mut model = ModelFile::default();
    let mut components = BTreeSet::new();
    let mut influences = BTreeSet::new();
    let mut rows = BTreeSet::new();
    for (i, raw) in text.lines().enumerate() {
        let content = raw.split('#').next().unwrap_or("");
        let line = Line { number: i + 1, text: raw };
        let tokens: Vec<&str> = content.split_whitespace().collect();
        let Some(&key) = tokens.first() else {
            continue;
        };
        let rest = &content[key.as_ptr() as usize - content.as_ptr() as usize + key.len()..];
        match key {
            "component" => {
                let [_, name, max] = tokens[..] else {
                    return Err(line.err(key, "expected `component <name> <max>`"));
                };
                let name_s = line.name(name)?;
                if !components.insert(name_s.clone()) {
                    return Err(line.err(name, format!("duplicate component `{name}`")));
                }
                model.components.push(ComponentEntry {
                    name: name_s,
                    max: line.value(max)?,
                });
            }
            "influence" => {
                let (u, v, label) = match tokens[..] {
                    [_, u, "->", v] => (u, v, ""),
                    [_, u, "->", v, label] => (u, v, label),
                    _ => return Err(line.err(key, "expected `influence <u> -> <v> [+|-][o]`")),
                };
                let (u_s, v_s) = (line.name(u)?, line.name(v)?);
                if Constraints::parse(label).is_none() {
                    return Err(line.err(label, format!("invalid constraint label `{label}`")));
                }
                if !influences.insert((u_s.clone(), v_s.clone())) {
                    return Err(line.err(u, format!("duplicate influence {u} -> {v}")));
                }
                model.influences.push(InfluenceEntry {
                    regulator: u_s,
                    target: v_s,
                    constraints: label.to_string(),
                });
            }
            "param" => {
                let fields: Vec<&str> = rest.split('|').collect();
                let [head, regs, value] = fields[..] else {
                    return Err(line.err(key, "expected `param <name> <v> | <u1>=<k1>,... | <value>`"));
                };
                let head_tokens: Vec<&str> = head.split_whitespace().collect();
                let [pname, v] = head_tokens[..] else {
                    return Err(line.err(key, "expected a parametrisation name and a component before `|`"));
                };
                let row = ParamRow {
                    component: line.name(v)?,
                    regulators: line.assignments(regs)?,
                    value: line.value(value.trim())?,
                };
                let pname = line.name(pname)?;
                let mut key_regs: Vec<_> = row.regulators.iter().map(|a| (a.component.clone(), a.value)).collect();
                key_regs.sort();
                if !rows.insert((pname.clone(), row.component.clone(), key_regs)) {
                    return Err(line.err(key, format!("duplicate parameter row of `{pname}`")));
                }
                match model.parametrisations.iter_mut().find(|p| p.name == pname) {
                    Some(p) => p.rows.push(row),
                    None => model.parametrisations.push(NamedParametrisation {
                        name: pname,
                        rows: vec![row],
                    }),
                }
            }
            "initial" => {
                if model.initial.is_some() {
                    return Err(line.err(key, "duplicate `initial` declaration"));
                }
                model.initial = Some(line.assignments(rest)?);
            }
            "goal" => {
                if model.goal.is_some() {
                    return Err(line.err(key, "duplicate `goal` declaration"));
                }
                if tokens.len() != 2 {
                    return Err(line.err(key, "expected `goal <v>=<k>`"));
                }
                model.goal = Some(line.assignment(tokens[1])?);
            }
            _ => return Err(line.err(key, format!("unknown key `{key}`"))),
        }
    }
    Ok(model)
}

fn join_assignments(items: &[Assignment]) -> String {
    items
        .iter()
        .map(|a| format!("{}={}", a.component, a.value))
        .collect::<Vec<_>>()
        .join(",")
}

/// Prints the text grammar; `parse_text(&print_text(m)) == m`.
pub fn print_text(model: &ModelFile) -> String {
    let mut out = String::new();
    for c in &model.components {
        writeln!(out, "component {} {}", c.name, c.max).unwrap();
    }
    for i in &model.influences {
        let label = if i.constraints.is_empty() {
            String::new()
        } else {
            format!(" {}", i.constraints)
        };
        writeln!(out, "influence {} -> {}{}", i.regulator, i.target, label).unwrap();
    }
    for p in &model.parametrisations {
        for r in &p.rows {
            writeln!(
                out,
                "param {} {} | {} | {}",
                p.name,
                r.component,
                join_assignments(&r.regulators),
                r.value
            )
            .unwrap();
        }
    }
    if let Some(init) = &model.initial {
        writeln!(out, "initial {}", join_assignments(init)).unwrap();
    }
    if let Some(g) = &model.goal {
        writeln!(out, "goal {}={}", g.component, g.value).unwrap();
    }
    out
}

/// A model file checked against its network.
#[derive(Clone, Debug)]
pub struct Model {
    pub prn: Prn,
    pub parametrisations: Vec<(String, Parametrisation)>,
    pub initial: Option<State>,
    pub goal: Option<Goal>,
}

impl Model {
    /// The named parametrisations if any, otherwise the whole constraint
    /// space. `cap` bounds the raw per-component enumeration.
    pub fn parametrisation_set(&self, cap: u128) -> Result<ConcreteParametrisationSet, ModelError> {
        if self.parametrisations.is_empty() {
            prnred_core::enumerate_parametrisations(&self.prn, cap).map_err(|e| ModelError::Semantic(e.to_string()))
        } else {
            Ok(ConcreteParametrisationSet::from_members(
                self.parametrisations.iter().map(|(_, p)| p.clone()),
            ))
        }
    }
}

pub fn component(prn: &Prn, name: &str) -> Result<ComponentId, ModelError> {
    prn.component(name)
        .ok_or_else(|| ModelError::Semantic(format!("unknown component `{name}`")))
}

/// `v=k` checked against the domain of `v`.
pub fn resolve_goal(prn: &Prn, a: &Assignment) -> Result<Goal, ModelError> {
    let v = component(prn, &a.component)?;
    if a.value > prn.max(v) {
        return Err(ModelError::Semantic(format!(
            "goal value {} outside the domain of `{}`",
            a.value, a.component
        )));
    }
    Ok(Goal {
        component: v,
        value: a.value,
    })
}

/// A full state; every component must be assigned exactly once.
pub fn resolve_state(prn: &Prn, items: &[Assignment]) -> Result<State, ModelError> {
    let mut values: Vec<Option<Value>> = vec![None; prn.component_count()];
    for a in items {
        let v = component(prn, &a.component)?;
        if values[v.index()].replace(a.value).is_some() {
            return Err(ModelError::Semantic(format!("component `{}` assigned twice", a.component)));
        }
    }
    let missing: Vec<&str> = prn
        .components()
        .filter(|v| values[v.index()].is_none())
        .map(|v| prn.name(v))
        .collect();
    if !missing.is_empty() {
        return Err(ModelError::Semantic(format!("state misses {}", missing.join(", "))));
    }
    let values: Vec<Value> = values.into_iter().map(Option::unwrap).collect();
    prn.state(&values).map_err(|e| ModelError::Semantic(e.to_string()))
}

fn resolve_parametrisation(prn: &Prn, p: &NamedParametrisation) -> Result<Parametrisation, ModelError> {
    let err = |m: String| ModelError::Semantic(format!("parametrisation `{}`: {m}", p.name));
    let mut values: Vec<Option<Value>> = vec![None; prn.parameter_count()];
    for row in &p.rows {
        let v = component(prn, &row.component).map_err(|e| err(e.to_string()))?;
        let regs = prn.regulators(v);
        let mut omega = vec![None; regs.len()];
        for a in &row.regulators {
            let u = component(prn, &a.component).map_err(|e| err(e.to_string()))?;
            let pos = prn
                .regulator_position(v, u)
                .ok_or_else(|| err(format!("`{}` does not regulate `{}`", a.component, row.component)))?;
            if a.value > prn.max(u) {
                return Err(err(format!("value {} outside the domain of `{}`", a.value, a.component)));
            }
            omega[pos] = Some(a.value);
        }
        let Some(omega) = omega.into_iter().collect::<Option<Vec<Value>>>() else {
            return Err(err(format!("row of `{}` does not assign every regulator", row.component)));
        };
        if row.value > prn.max(v) {
            return Err(err(format!("value {} outside the domain of `{}`", row.value, row.component)));
        }
        let idx = prn.parameter_index(v, prn.encode_regulator_values(v, &omega));
        if values[idx].replace(row.value).is_some() {
            return Err(err(format!("duplicate row for `{}`", row.component)));
        }
    }
    let Some(values) = values.into_iter().collect::<Option<Vec<Value>>>() else {
        return Err(err(format!("expected {} parameter rows, found {}", prn.parameter_count(), p.rows.len())));
    };
    let p_values = Parametrisation(values);
    if !satisfies_constraints(&p_values, prn) {
        return Err(err("violates the influence constraints".into()));
    }
    Ok(p_values)
}

impl ModelFile {
    pub fn to_decl(&self) -> Result<NetworkDecl, ModelError> {
        let mut decl = NetworkDecl::default();
        for c in &self.components {
            decl.component(&c.name, c.max);
        }
        for i in &self.influences {
            let constraints = Constraints::parse(&i.constraints)
                .ok_or_else(|| ModelError::Semantic(format!("invalid constraint label `{}`", i.constraints)))?;
            decl.influences.push(prnred_core::network::InfluenceDecl {
                regulator: i.regulator.clone(),
                target: i.target.clone(),
                constraints,
            });
        }
        Ok(decl)
    }

    /// Validates the network and resolves every optional section.
    pub fn resolve(&self) -> Result<Model, ModelError> {
        let prn = Prn::new(&self.to_decl()?).map_err(|report| ModelError::Semantic(report.to_string()))?;
        let mut names = BTreeSet::new();
        let mut parametrisations = Vec::new();
        for p in &self.parametrisations {
            if !names.insert(p.name.as_str()) {
                return Err(ModelError::Semantic(format!("duplicate parametrisation `{}`", p.name)));
            }
            parametrisations.push((p.name.clone(), resolve_parametrisation(&prn, p)?));
        }
        let initial = self.initial.as_deref().map(|i| resolve_state(&prn, i)).transpose()?;
        let goal = self.goal.as_ref().map(|g| resolve_goal(&prn, g)).transpose()?;
        Ok(Model {
            prn,
            parametrisations,
            initial,
            goal,
        })
    }

    pub fn from_prn(prn: &Prn) -> ModelFile {
        let decl = prn.to_decl();
        ModelFile {
            components: decl
                .components
                .iter()
                .map(|c| ComponentEntry {
                    name: c.name.clone(),
                    max: c.max,
                })
                .collect(),
            influences: decl
                .influences
                .iter()
                .map(|i| InfluenceEntry {
                    regulator: i.regulator.clone(),
                    target: i.target.clone(),
                    constraints: i.constraints.to_string(),
                })
                .collect(),
            ..ModelFile::default()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = "\
# two nodes
component u 1
component v 2   # multilevel
influence u -> v +o
influence v -> v
param P u |  | 1
param P v | u=0,v=0 | 0
param P v | u=0,v=1 | 0
param P v | u=0,v=2 | 0
param P v | u=1,v=0 | 2
param P v | u=1,v=1 | 2
param P v | v=2,u=1 | 2
initial u=0,v=0
goal v=2
";

    #[test]
    fn parses_and_resolves() {
        let m = parse_text(SMALL).unwrap();
        assert_eq!(m.components.len(), 2);
        assert_eq!(m.parametrisations[0].rows.len(), 7);
        let model = m.resolve().unwrap();
        assert_eq!(model.prn.parameter_count(), 7);
        assert_eq!(model.initial.unwrap().values(), &[0, 0]);
        assert_eq!(model.goal.unwrap().value, 2);
    }

    #[test]
    fn round_trips() {
        let m = parse_text(SMALL).unwrap();
        assert_eq!(parse_text(&print_text(&m)).unwrap(), m);
        assert_eq!(parse_json(&to_json(&m)).unwrap(), m);
    }

    fn syntax_error(text: &str) -> (usize, usize, String) {
        match parse_text(text) {
            Err(ModelError::Syntax { line, column, message }) => (line, column, message),
            other => panic!("expected a syntax error, got {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_syntax() {
        let (line, column, message) = syntax_error("component a 1\nnode b 1\n");
        assert_eq!((line, column), (2, 1));
        assert!(message.contains("unknown key"));
        let (_, column, _) = syntax_error("component a 1\ninfluence a -> a +x\n");
        assert_eq!(column, 18);
        assert!(syntax_error("component a 1\ncomponent a 1\n").2.contains("duplicate component"));
        assert!(syntax_error("goal a=1\ngoal a=0\n").2.contains("duplicate"));
        assert!(syntax_error("component a one\n").2.contains("invalid value"));
        assert!(parse_json(r#"{"components": [], "extra": 1}"#).is_err());
    }

    #[test]
    fn rejects_bad_semantics() {
        let m = parse_text("component a 1\ninfluence x -> a +\n").unwrap();
        let err = m.resolve().unwrap_err().to_string();
        assert!(err.contains("unknown component `x`"), "{err}");

        let incomplete = SMALL.replace("param P v | u=1,v=1 | 2\n", "");
        assert!(parse_text(&incomplete).unwrap().resolve().unwrap_err().to_string().contains("parameter rows"));

        let unobservable = SMALL.replace("u=1,v=0 | 2", "u=1,v=0 | 0").replace("u=1,v=1 | 2", "u=1,v=1 | 0").replace("v=2,u=1 | 2", "v=2,u=1 | 0");
        assert!(parse_text(&unobservable).unwrap().resolve().unwrap_err().to_string().contains("constraints"));

        let bad_goal = SMALL.replace("goal v=2", "goal w=1");
        assert!(parse_text(&bad_goal).unwrap().resolve().unwrap_err().to_string().contains("`w`"));
    }
}
