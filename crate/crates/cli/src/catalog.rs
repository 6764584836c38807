//! The identity catalog: one data file per item, with parameter
//! templates expanded by the driver into concrete expression instances.
//!
//! Template syntax inside lhs/rhs strings:
//!   ${EXPR}      integer arithmetic over the item's parameters
//!                (+ - * / ^, exact division), or the verbatim text of
//!                an op/monomial parameter named by EXPR
//!   $rep(TXT;EXPR) TXT repeated EXPR times

use std::collections::BTreeMap;

use serde::Deserialize;
use thiserror::Error;

use malcev_core::alphabet::{Alphabet, MultiDegree};
use malcev_core::enumerate::{monomials_of, multidegrees_of_total};

#[derive(Debug, Clone, Error)]
pub enum CatalogError {
    #[error("catalog item {id}: {message}")]
    Item { id: String, message: String },
    #[error("template error in `{template}`: {message}")]
    Template { template: String, message: String },
    #[error("bad catalog file {file}: {message}")]
    File { file: String, message: String },
}

/// Verification mode of an item.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// T-ideal membership after multilinearization, falling back to
    /// substitution zero tests past the degree cap
    Both,
    /// T-ideal membership only
    Consequence,
    /// zero tests in the subdirect model only
    Substitution,
    /// graded-dimension sweep items
    Dims,
    /// theorem-basis sweep items
    Basis,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Param {
    /// integer parameter with explicit instance values
    Int { name: String, values: Vec<i64> },
    /// verbatim text choices (operator suffixes, generator names)
    Op { name: String, values: Vec<String> },
    /// canonical monomials over the listed variables; the monomial text
    /// substitutes for the name, its total degree binds `degree_name`
    Mono {
        name: String,
        over: Vec<String>,
        min_degree: u32,
        max_degree: u32,
        #[serde(default)]
        parity: Option<String>,
        #[serde(default)]
        degree_name: Option<String>,
    },
}

impl Param {
    pub fn name(&self) -> &str {
        match self {
            Param::Int { name, .. } | Param::Op { name, .. } | Param::Mono { name, .. } => name,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Equation {
    pub lhs: String,
    pub rhs: String,
    /// "zero" (default): lhs - rhs vanishes in M; "nonzero": it is a
    /// deliberate non-vanishing witness
    #[serde(default)]
    pub expect: Option<String>,
}

/// One catalog item as stored on disk.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IdentitySpec {
    pub id: String,
    /// the identity being checked, in the notation of the catalog
    pub source: String,
    pub mode: Mode,
    /// abstract variables, in declaration order (x, y, z are implicit)
    #[serde(default)]
    pub vars: Vec<String>,
    /// variables mapped onto the generators x, y, z for substitution
    /// checks; remaining vars range over the sample pool
    #[serde(default)]
    pub subst_vars: Vec<String>,
    #[serde(default)]
    pub params: Vec<Param>,
    #[serde(default)]
    pub equations: Vec<Equation>,
    #[serde(default)]
    pub notes: Option<String>,
}

/// One fully instantiated check: concrete lhs/rhs texts plus the
/// parameter bindings that produced them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub label: String,
    pub equations: Vec<ExpandedEquation>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ExpandedEquation {
    pub lhs: String,
    pub rhs: String,
    pub nonzero: bool,
}

/// A parameter binding during expansion.
#[derive(Debug, Clone)]
enum Binding {
    Int(i64),
    Text(String),
}

impl IdentitySpec {
    /// Expand the parameter grid into concrete instances, in a
    /// deterministic order, deduplicating identical equation sets.
    pub fn instances(&self) -> Result<Vec<Instance>, CatalogError> {
        self.instances_bounded(None)
    }

    /// Like `instances`, with integer parameter values clamped to
    /// `params_max` when given.
    pub fn instances_bounded(
        &self,
        params_max: Option<i64>,
    ) -> Result<Vec<Instance>, CatalogError> {
        // per parameter: list of (label-part, bindings)
        let mut axes: Vec<Vec<(String, Vec<(String, Binding)>)>> = Vec::new();
        for p in &self.params {
            let p = match (p, params_max) {
                (Param::Int { name, values }, Some(max)) => Param::Int {
                    name: name.clone(),
                    values: values.iter().copied().filter(|v| *v <= max).collect(),
                },
                _ => p.clone(),
            };
            axes.push(param_axis(&p)?);
        }
        let mut out = Vec::new();
        let mut seen = std::collections::HashSet::new();
        let mut idx = vec![0usize; axes.len()];
        loop {
            let mut label_parts = Vec::new();
            let mut env: BTreeMap<String, Binding> = BTreeMap::new();
            for (a, &i) in axes.iter().zip(&idx) {
                let (lab, bindings) = &a[i];
                if !lab.is_empty() {
                    label_parts.push(lab.clone());
                }
                for (k, v) in bindings {
                    env.insert(k.clone(), v.clone());
                }
            }
            let mut eqs = Vec::new();
            for eq in &self.equations {
                let lhs = expand_template(&eq.lhs, &env)?;
                let rhs = expand_template(&eq.rhs, &env)?;
                let nonzero = eq.expect.as_deref() == Some("nonzero");
                eqs.push(ExpandedEquation { lhs, rhs, nonzero });
            }
            let label = if label_parts.is_empty() {
                "-".to_string()
            } else {
                label_parts.join(", ")
            };
            let inst = Instance {
                label,
                equations: eqs,
            };
            if seen.insert(inst.equations.clone()) {
                out.push(inst);
            }
            // advance the grid
            let mut k = axes.len();
            loop {
                if k == 0 {
                    return Ok(out);
                }
                k -= 1;
                idx[k] += 1;
                if idx[k] < axes[k].len() {
                    break;
                }
                idx[k] = 0;
            }
            if axes.is_empty() {
                return Ok(out);
            }
        }
    }
}

fn param_axis(p: &Param) -> Result<Vec<(String, Vec<(String, Binding)>)>, CatalogError> {
    match p {
        Param::Int { name, values } => Ok(values
            .iter()
            .map(|&v| {
                (
                    format!("{name}={v}"),
                    vec![(name.clone(), Binding::Int(v))],
                )
            })
            .collect()),
        Param::Op { name, values } => Ok(values
            .iter()
            .map(|v| {
                let label = if v.is_empty() {
                    format!("{name}=1")
                } else {
                    format!("{name}={v}")
                };
                (label, vec![(name.clone(), Binding::Text(v.clone()))])
            })
            .collect()),
        Param::Mono {
            name,
            over,
            min_degree,
            max_degree,
            parity,
            degree_name,
        } => {
            let alphabet = Alphabet::new(over.clone());
            let mut axis = Vec::new();
            for total in *min_degree..=*max_degree {
                if let Some(par) = parity {
                    let even = total % 2 == 0;
                    match par.as_str() {
                        "even" if !even => continue,
                        "odd" if even => continue,
                        _ => {}
                    }
                }
                for d in multidegrees_of_total(over.len(), total) {
                    for m in monomials_of(&alphabet, &MultiDegree(d.0.clone())) {
                        let text = format!("({})", m.format(&alphabet));
                        let mut bindings =
                            vec![(name.clone(), Binding::Text(text.clone()))];
                        if let Some(dn) = degree_name {
                            bindings.push((dn.clone(), Binding::Int(total as i64)));
                        }
                        axis.push((format!("{name}={text}"), bindings));
                    }
                }
            }
            if axis.is_empty() {
                return Err(CatalogError::Item {
                    id: name.clone(),
                    message: "monomial parameter has no instances".into(),
                });
            }
            Ok(axis)
        }
    }
}

fn expand_template(
    template: &str,
    env: &BTreeMap<String, Binding>,
) -> Result<String, CatalogError> {
    let terr = |m: String| CatalogError::Template {
        template: template.to_string(),
        message: m,
    };
    let chars: Vec<char> = template.chars().collect();
    let mut out = String::new();
    let mut i = 0;
    while i < chars.len() {
        if chars[i] == '$' && i + 1 < chars.len() && chars[i + 1] == '{' {
            let close = find_matching(&chars, i + 1, '{', '}')
                .ok_or_else(|| terr("unclosed ${".into()))?;
            let body: String = chars[i + 2..close].iter().collect();
            // a bare op/mono parameter name substitutes its text
            if let Some(Binding::Text(t)) = env.get(body.trim()) {
                out.push_str(t);
            } else {
                let v = eval_int_expr(&body, env).map_err(terr)?;
                out.push_str(&v.to_string());
            }
            i = close + 1;
        } else if chars[i] == '$'
            && chars[i..].iter().collect::<String>().starts_with("$rep(")
        {
            let open = i + 4;
            let close = find_matching(&chars, open, '(', ')')
                .ok_or_else(|| terr("unclosed $rep(".into()))?;
            let body: String = chars[open + 1..close].iter().collect();
            let (text, count_expr) = body
                .split_once(';')
                .ok_or_else(|| terr("$rep needs `text;count`".into()))?;
            let count = eval_int_expr(count_expr, env).map_err(terr)?;
            if count < 0 {
                return Err(terr(format!("negative repetition {count}")));
            }
            for _ in 0..count {
                out.push_str(text);
            }
            i = close + 1;
        } else {
            out.push(chars[i]);
            i += 1;
        }
    }
    Ok(out)
}

fn find_matching(chars: &[char], open_at: usize, open: char, close: char) -> Option<usize> {
    debug_assert_eq!(chars[open_at], open);
    let mut depth = 0;
    for (i, &c) in chars.iter().enumerate().skip(open_at) {
        if c == open {
            depth += 1;
        } else if c == close {
            depth -= 1;
            if depth == 0 {
                return Some(i);
            }
        }
    }
    None
}

/// Tiny exact integer expression evaluator: + - * / ^ with parentheses;
/// division must be exact.
fn eval_int_expr(s: &str, env: &BTreeMap<String, Binding>) -> Result<i64, String> {
    struct P<'a> {
        chars: Vec<char>,
        pos: usize,
        env: &'a BTreeMap<String, Binding>,
    }
    impl P<'_> {
        fn skip_ws(&mut self) {
            while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
                self.pos += 1;
            }
        }
        fn peek(&mut self) -> Option<char> {
            self.skip_ws();
            self.chars.get(self.pos).copied()
        }
        fn additive(&mut self) -> Result<i64, String> {
            let mut acc = self.multiplicative()?;
            loop {
                match self.peek() {
                    Some('+') => {
                        self.pos += 1;
                        acc += self.multiplicative()?;
                    }
                    Some('-') => {
                        self.pos += 1;
                        acc -= self.multiplicative()?;
                    }
                    _ => return Ok(acc),
                }
            }
        }
        fn multiplicative(&mut self) -> Result<i64, String> {
            let mut acc = self.power()?;
            loop {
                match self.peek() {
                    Some('*') => {
                        self.pos += 1;
                        acc *= self.power()?;
                    }
                    Some('/') => {
                        self.pos += 1;
                        let d = self.power()?;
                        if d == 0 || acc % d != 0 {
                            return Err(format!("inexact division {acc}/{d}"));
                        }
                        acc /= d;
                    }
                    _ => return Ok(acc),
                }
            }
        }
        fn power(&mut self) -> Result<i64, String> {
            let base = self.unary()?;
            if self.peek() == Some('^') {
                self.pos += 1;
                let e = self.power()?;
                if e < 0 {
                    return Err("negative exponent".into());
                }
                let mut acc: i64 = 1;
                for _ in 0..e {
                    acc = acc.checked_mul(base).ok_or("overflow")?;
                }
                return Ok(acc);
            }
            Ok(base)
        }
        fn unary(&mut self) -> Result<i64, String> {
            if self.peek() == Some('-') {
                self.pos += 1;
                return Ok(-self.unary()?);
            }
            self.atom()
        }
        fn atom(&mut self) -> Result<i64, String> {
            match self.peek() {
                Some('(') => {
                    self.pos += 1;
                    let v = self.additive()?;
                    if self.peek() != Some(')') {
                        return Err("expected )".into());
                    }
                    self.pos += 1;
                    Ok(v)
                }
                Some(c) if c.is_ascii_digit() => {
                    let mut v: i64 = 0;
                    while let Some(c) = self.chars.get(self.pos) {
                        if !c.is_ascii_digit() {
                            break;
                        }
                        v = v * 10 + (*c as i64 - '0' as i64);
                        self.pos += 1;
                    }
                    Ok(v)
                }
                Some(c) if c.is_ascii_alphabetic() => {
                    let mut name = String::new();
                    while let Some(c) = self.chars.get(self.pos) {
                        if !c.is_ascii_alphanumeric() && *c != '_' {
                            break;
                        }
                        name.push(*c);
                        self.pos += 1;
                    }
                    match self.env.get(&name) {
                        Some(Binding::Int(v)) => Ok(*v),
                        Some(Binding::Text(_)) => {
                            Err(format!("parameter `{name}` is not an integer"))
                        }
                        None => Err(format!("unknown parameter `{name}`")),
                    }
                }
                other => Err(format!("unexpected {other:?} in integer expression")),
            }
        }
    }
    let mut p = P {
        chars: s.chars().collect(),
        pos: 0,
        env,
    };
    let v = p.additive()?;
    p.skip_ws();
    if p.pos != p.chars.len() {
        return Err("trailing input in integer expression".into());
    }
    Ok(v)
}

/// The coverage manifest: every unit of the verified development and
/// the catalog items that witness it.
#[derive(Debug, Clone, Deserialize)]
pub struct Manifest {
    pub units: Vec<ManifestUnit>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct ManifestUnit {
    pub unit: String,
    pub items: Vec<String>,
}

/// The built-in catalog, embedded at compile time.
pub fn builtin() -> Result<Vec<IdentitySpec>, CatalogError> {
    builtin_sources()
        .iter()
        .map(|(name, text)| parse_spec(name, text))
        .collect()
}

pub fn builtin_manifest() -> Result<Manifest, CatalogError> {
    serde_json::from_str(include_str!("../catalog/manifest.json")).map_err(|e| {
        CatalogError::File {
            file: "manifest.json".into(),
            message: e.to_string(),
        }
    })
}

pub fn parse_spec(name: &str, text: &str) -> Result<IdentitySpec, CatalogError> {
    serde_json::from_str(text).map_err(|e| CatalogError::File {
        file: name.to_string(),
        message: e.to_string(),
    })
}

macro_rules! catalog_files {
    ($($name:literal),* $(,)?) => {
        &[$(($name, include_str!(concat!("../catalog/", $name)))),*]
    };
}

fn builtin_sources() -> &'static [(&'static str, &'static str)] {
    catalog_files![
        "eq.1.json",
        "eq.2.json",
        "eq.3.json",
        "eq.4.json",
        "eq.5.json",
        "eq.6.json",
        "eq.7.json",
        "eq.8.json",
        "eq.9.json",
        "eq.10.json",
        "eq.11.json",
        "eq.12.json",
        "eq.13.json",
        "eq.14.json",
        "eq.15.json",
        "eq.16.json",
        "eq.17.json",
        "eq.18.json",
        "eq.19.json",
        "eq.20.json",
        "eq.21.json",
        "eq.22.json",
        "eq.23.json",
        "eq.24.json",
        "eq.25.json",
        "eq.26.json",
        "eq.27.json",
        "eq.28.json",
        "eq.29.json",
        "lemma2.1.json",
        "lemma2.2.json",
        "lemma2.3.json",
        "cor.lemma2.z.json",
        "cor.prop1.1.json",
        "cor.prop1.2.json",
        "cor.prop1.3.json",
        "prop2.1.json",
        "prop2.2.json",
        "prop2.3.json",
        "prop1.span.json",
        "theorem.basis.json",
        "cor1.subdirect.json",
        "cor2.witness.json",
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn int_expr_evaluation() {
        let mut env = BTreeMap::new();
        env.insert("k".to_string(), Binding::Int(2));
        env.insert("n".to_string(), Binding::Int(3));
        assert_eq!(eval_int_expr("2*k-1", &env).unwrap(), 3);
        assert_eq!(eval_int_expr("(-1)^n", &env).unwrap(), -1);
        assert_eq!(eval_int_expr("(3*(-1)^n+1)/2", &env).unwrap(), -1);
        assert_eq!(eval_int_expr("6^k", &env).unwrap(), 36);
        assert!(eval_int_expr("1/2", &env).is_err());
        assert!(eval_int_expr("m", &env).is_err());
    }

    #[test]
    fn template_expansion() {
        let mut env = BTreeMap::new();
        env.insert("k".to_string(), Binding::Int(2));
        env.insert("T".to_string(), Binding::Text(".L(x,x)".into()));
        assert_eq!(
            expand_template("a^${2*k+1}$rep( c a;k-1)", &env).unwrap(),
            "a^5 c a"
        );
        assert_eq!(
            expand_template("J(x,y,z)${T} J(x,y,z)", &env).unwrap(),
            "J(x,y,z).L(x,x) J(x,y,z)"
        );
    }

    #[test]
    fn builtin_catalog_parses_and_expands() {
        let items = builtin().expect("catalog parses");
        assert!(items.len() >= 40);
        for item in &items {
            if matches!(item.mode, Mode::Dims | Mode::Basis) {
                continue;
            }
            let inst = item.instances().unwrap_or_else(|e| {
                panic!("item {} fails to expand: {e}", item.id)
            });
            assert!(!inst.is_empty(), "item {} has no instances", item.id);
            for i in &inst {
                for eq in &i.equations {
                    crate::parser::parse(&eq.lhs).unwrap_or_else(|e| {
                        panic!("item {} lhs `{}` does not parse: {e}", item.id, eq.lhs)
                    });
                    crate::parser::parse(&eq.rhs).unwrap_or_else(|e| {
                        panic!("item {} rhs `{}` does not parse: {e}", item.id, eq.rhs)
                    });
                }
            }
        }
    }

    #[test]
    fn manifest_covers_catalog_and_vice_versa() {
        let items = builtin().unwrap();
        let manifest = builtin_manifest().unwrap();
        let ids: std::collections::BTreeSet<&str> =
            items.iter().map(|i| i.id.as_str()).collect();
        for unit in &manifest.units {
            assert!(!unit.items.is_empty(), "unit {} has no items", unit.unit);
            for id in &unit.items {
                assert!(ids.contains(id.as_str()), "unit {} references missing item {id}", unit.unit);
            }
        }
        let covered: std::collections::BTreeSet<&str> = manifest
            .units
            .iter()
            .flat_map(|u| u.items.iter().map(String::as_str))
            .collect();
        for id in ids {
            assert!(covered.contains(id), "item {id} not referenced by the manifest");
        }
    }
}
