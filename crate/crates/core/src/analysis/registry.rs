use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use super::{AnalysisError, AnalysisResult, KMeansTool, PinDiffTool, Result};
use crate::model::AssemblyView;

#[derive(Debug, Clone, PartialEq)]
pub enum ParamValue {
    Int(i64),
    Float(f64),
    Str(String),
}

impl ParamValue {
    pub fn as_int(&self) -> Option<i64> {
        match *self {
            ParamValue::Int(v) => Some(v),
            _ => None,
        }
    }

    pub fn as_float(&self) -> Option<f64> {
        match *self {
            ParamValue::Float(v) => Some(v),
            ParamValue::Int(v) => Some(v as f64),
            _ => None,
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            ParamValue::Str(s) => Some(s),
            _ => None,
        }
    }
}

impl fmt::Display for ParamValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamValue::Int(v) => write!(f, "{v}"),
            ParamValue::Float(v) => write!(f, "{v:?}"),
            ParamValue::Str(s) => f.write_str(s),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ParamKind {
    Int,
    Float,
    Str,
    /// A string restricted to the listed options.
    Choice(Vec<String>),
}

impl ParamKind {
    pub fn name(&self) -> &'static str {
        match self {
            ParamKind::Int => "int",
            ParamKind::Float => "float",
            ParamKind::Str => "string",
            ParamKind::Choice(_) => "choice",
        }
    }

    /// Coerces `value` to this kind. Ints are accepted where floats are
    /// expected.
    pub fn check(&self, value: &ParamValue) -> Option<ParamValue> {
        match (self, value) {
            (ParamKind::Int, ParamValue::Int(_)) | (ParamKind::Str, ParamValue::Str(_)) => Some(value.clone()),
            (ParamKind::Float, v) => v.as_float().filter(|x| x.is_finite()).map(ParamValue::Float),
            (ParamKind::Choice(options), ParamValue::Str(s)) if options.contains(s) => Some(value.clone()),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParamSpec {
    pub name: String,
    pub kind: ParamKind,
    pub default: ParamValue,
    pub help: String,
}

impl ParamSpec {
    pub fn new(name: &str, kind: ParamKind, default: ParamValue, help: &str) -> Self {
        Self {
            name: name.to_owned(),
            kind,
            default,
            help: help.to_owned(),
        }
    }
}

/// Parameter values by name.
pub type Params = BTreeMap<String, ParamValue>;

/// An analysis routine. Implementations must be pure functions of their
/// inputs so the registry can run them from any thread.
pub trait AnalysisTool: Send + Sync {
    fn name(&self) -> &str;

    fn description(&self) -> &str;

    fn params(&self) -> Vec<ParamSpec>;

    /// Whether the tool is offered without being asked for.
    fn is_default(&self) -> bool {
        false
    }

    /// Runs the tool. `params` holds a validated value for every declared
    /// parameter.
    fn run(&self, assemblies: &[AssemblyView<'_>], params: &Params) -> Result<AnalysisResult>;
}

/// Summary of a registered tool.
#[derive(Debug, Clone, PartialEq)]
pub struct ToolInfo {
    pub name: String,
    pub description: String,
    pub is_default: bool,
    pub params: Vec<ParamSpec>,
}

/// Tools by name.
#[derive(Clone)]
pub struct Registry {
    tools: BTreeMap<String, Arc<dyn AnalysisTool>>,
}

impl fmt::Debug for Registry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Registry").field("tools", &self.names()).finish()
    }
}

impl Default for Registry {
    fn default() -> Self {
        Self::with_builtins()
    }
}

impl Registry {
    pub fn empty() -> Self {
        Self { tools: BTreeMap::new() }
    }

    /// A registry holding `pin_diff` and `kmeans`.
    pub fn with_builtins() -> Self {
        let mut r = Self::empty();
        r.register(Arc::new(PinDiffTool)).expect("fresh registry");
        r.register(Arc::new(KMeansTool)).expect("fresh registry");
        r
    }

    pub fn register(&mut self, tool: Arc<dyn AnalysisTool>) -> Result<()> {
        let name = tool.name().to_owned();
        if name.is_empty() {
            return Err(AnalysisError::InvalidArgument("tool name is empty".into()));
        }
        if self.tools.contains_key(&name) {
            return Err(AnalysisError::Conflict(format!("tool {name:?} is already registered")));
        }
        for spec in tool.params() {
            if spec.kind.check(&spec.default).is_none() {
                return Err(AnalysisError::InvalidArgument(format!(
                    "tool {name:?}: default of {:?} is not a valid {}",
                    spec.name,
                    spec.kind.name()
                )));
            }
        }
        self.tools.insert(name, tool);
        Ok(())
    }

    /// Tool names in sorted order.
    pub fn names(&self) -> Vec<&str> {
        self.tools.keys().map(String::as_str).collect()
    }

    pub fn list(&self) -> Vec<ToolInfo> {
        self.tools
            .values()
            .map(|t| ToolInfo {
                name: t.name().to_owned(),
                description: t.description().to_owned(),
                is_default: t.is_default(),
                params: t.params(),
            })
            .collect()
    }

    pub fn get(&self, name: &str) -> Option<&Arc<dyn AnalysisTool>> {
        self.tools.get(name)
    }

    /// Fills in defaults and checks every supplied value against the tool's
    /// schema.
    pub fn resolve_params(&self, name: &str, supplied: &Params) -> Result<Params> {
        let tool = self.lookup(name)?;
        resolve(tool.as_ref(), supplied)
    }

    pub fn run(&self, name: &str, assemblies: &[AssemblyView<'_>], params: &Params) -> Result<AnalysisResult> {
        let tool = self.lookup(name)?;
        let params = resolve(tool.as_ref(), params)?;
        tool.run(assemblies, &params)
    }

    fn lookup(&self, name: &str) -> Result<&Arc<dyn AnalysisTool>> {
        self.tools
            .get(name)
            .ok_or_else(|| AnalysisError::NotFound(format!("no tool named {name:?}")))
    }
}

fn resolve(tool: &dyn AnalysisTool, supplied: &Params) -> Result<Params> {
    let specs = tool.params();
    if let Some(unknown) = supplied.keys().find(|k| !specs.iter().any(|s| &s.name == *k)) {
        return Err(AnalysisError::InvalidArgument(format!(
            "tool {:?} has no parameter {unknown:?}",
            tool.name()
        )));
    }
    let mut out = Params::new();
    for spec in specs {
        let value = match supplied.get(&spec.name) {
            Some(v) => spec.kind.check(v).ok_or_else(|| {
                AnalysisError::InvalidArgument(format!(
                    "parameter {:?} must be a {}, got {v}",
                    spec.name,
                    spec.kind.name()
                ))
            })?,
            None => spec.default.clone(),
        };
        out.insert(spec.name, value);
    }
    Ok(out)
}

/// Typed accessors for resolved parameters.
pub(crate) trait ParamsExt {
    fn str_param(&self, name: &str) -> &str;
    fn int_param(&self, name: &str) -> i64;
    fn float_param(&self, name: &str) -> f64;
}

impl ParamsExt for Params {
    fn str_param(&self, name: &str) -> &str {
        self.get(name).and_then(ParamValue::as_str).unwrap_or_default()
    }

    fn int_param(&self, name: &str) -> i64 {
        self.get(name).and_then(ParamValue::as_int).unwrap_or_default()
    }

    fn float_param(&self, name: &str) -> f64 {
        self.get(name).and_then(ParamValue::as_float).unwrap_or_default()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Echo;

    impl AnalysisTool for Echo {
        fn name(&self) -> &str {
            "echo"
        }

        fn description(&self) -> &str {
            "returns an empty result"
        }

        fn params(&self) -> Vec<ParamSpec> {
            vec![
                ParamSpec::new("x", ParamKind::Float, ParamValue::Float(1.0), "a number"),
                ParamSpec::new(
                    "mode",
                    ParamKind::Choice(vec!["a".into(), "b".into()]),
                    ParamValue::Str("a".into()),
                    "a mode",
                ),
            ]
        }

        fn run(&self, _: &[AssemblyView<'_>], params: &Params) -> Result<AnalysisResult> {
            let mut r = AnalysisResult::new("echo");
            r.add_artifact("p.txt", format!("{params:?}").into_bytes())?;
            Ok(r)
        }
    }

    #[test]
    fn builtins_listed() {
        let r = Registry::with_builtins();
        assert_eq!(r.names(), vec!["kmeans", "pin_diff"]);
        let infos = r.list();
        assert!(infos.iter().find(|t| t.name == "pin_diff").unwrap().is_default);
        assert!(!infos.iter().find(|t| t.name == "kmeans").unwrap().is_default);
    }

    #[test]
    fn duplicate_registration_conflicts() {
        let mut r = Registry::with_builtins();
        assert!(matches!(r.register(Arc::new(PinDiffTool)), Err(AnalysisError::Conflict(_))));
        r.register(Arc::new(Echo)).unwrap();
        assert!(r.names().contains(&"echo"));
    }

    #[test]
    fn params_are_validated() {
        let mut r = Registry::empty();
        r.register(Arc::new(Echo)).unwrap();
        let resolved = r.resolve_params("echo", &Params::new()).unwrap();
        assert_eq!(resolved["x"], ParamValue::Float(1.0));
        let mut p = Params::new();
        p.insert("x".into(), ParamValue::Int(3));
        assert_eq!(r.resolve_params("echo", &p).unwrap()["x"], ParamValue::Float(3.0));
        p.insert("mode".into(), ParamValue::Str("c".into()));
        assert!(matches!(r.resolve_params("echo", &p), Err(AnalysisError::InvalidArgument(_))));
        let mut p = Params::new();
        p.insert("y".into(), ParamValue::Int(3));
        assert!(matches!(r.run("echo", &[], &p), Err(AnalysisError::InvalidArgument(_))));
        assert!(matches!(r.run("nope", &[], &Params::new()), Err(AnalysisError::NotFound(_))));
    }
}
