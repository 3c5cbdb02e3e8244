//! Instance files: JSON documents with `"format": 1`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::Zero;
use pdce_core::cohom::CoefModule;
use pdce_core::fgab::PresentedGroup;
use pdce_core::funcspace::{FunctionVector, Target};
use pdce_core::gowers::ComplexFunction;
use pdce_core::group::{FiniteGroup, Subgroup};
use pdce_core::pdce::{Instance, Subset};
use pdce_core::IntMatrix;
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::CliError;

pub const FORMAT: u32 = 1;

/// An exact rational, written as `"p/q"` (or `"p"` for integers). Plain
/// JSON integers are accepted on input.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Exact(pub BigRational);

impl fmt::Display for Exact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

/// Parses `p/q`, an integer, or a finite decimal such as `0.015`.
pub fn parse_exact(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if let Some((a, b)) = s.split_once('/') {
        let a: BigInt = a.trim().parse().ok()?;
        let b: BigInt = b.trim().parse().ok()?;
        return (!b.is_zero()).then(|| BigRational::new(a, b));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.chars().all(|c| c.is_ascii_digit()) {
            return None;
        }
        let neg = int.starts_with('-');
        let digits = format!("{}{}", int.trim_start_matches(['-', '+']), frac);
        let num: BigInt = digits.parse().ok()?;
        let den = num_traits::pow(BigInt::from(10), frac.len());
        let v = BigRational::new(num, den);
        return Some(if neg { -v } else { v });
    }
    s.parse::<BigInt>().ok().map(BigRational::from_integer)
}

impl Serialize for Exact {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Exact {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Exact, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = Exact;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                write!(f, "an integer or a string \"p/q\"")
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Exact, E> {
                Ok(Exact(BigRational::from_integer(v.into())))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Exact, E> {
                Ok(Exact(BigRational::from_integer(v.into())))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<Exact, E> {
                parse_exact(v).map(Exact).ok_or_else(|| E::custom(format!("not an exact number: {v:?}")))
            }
        }
        d.deserialize_any(V)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum TargetSpec {
    Mod { m: u64 },
    Int,
    Rational,
    Torus,
}

impl TargetSpec {
    pub fn to_target(&self) -> Target {
        match self {
            TargetSpec::Mod { m } => Target::Mod(*m),
            TargetSpec::Int => Target::Int,
            TargetSpec::Rational => Target::Rational,
            TargetSpec::Torus => Target::Torus,
        }
    }
}

/// Coefficient module for `cohomology`: `Z^generators` modulo the relation
/// columns, with one action matrix (row-major) per generator of the group.
/// An empty action list means the trivial action.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoefSpec {
    pub generators: usize,
    #[serde(default)]
    pub relations: Vec<Vec<i64>>,
    #[serde(default)]
    pub dual: bool,
    #[serde(default)]
    pub action: Vec<Vec<Vec<i64>>>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub e: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ell: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_grid: Option<Vec<Exact>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub function: Option<String>,
}

impl Params {
    fn is_empty(&self) -> bool {
        self == &Params::default()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub format: u32,
    pub group: Vec<u64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub subgroups: Vec<Vec<Vec<i64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<TargetSpec>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub functions: BTreeMap<String, Vec<Exact>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub complex_functions: BTreeMap<String, Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coefficients: Option<CoefSpec>,
    #[serde(default, skip_serializing_if = "Params::is_empty")]
    pub params: Params,
}

fn parse_err(path: impl Into<String>, msg: impl Into<String>) -> CliError {
    CliError::Parse { path: path.into(), msg: msg.into() }
}

impl InstanceFile {
    pub fn parse(text: &str) -> Result<InstanceFile, CliError> {
        let mut de = serde_json::Deserializer::from_str(text);
        let file: InstanceFile = serde_path_to_error::deserialize(&mut de).map_err(|e| {
            let path = e.path().to_string();
            parse_err(if path == "." { String::new() } else { path }, e.into_inner().to_string())
        })?;
        file.validate()?;
        Ok(file)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance files serialize")
    }

    fn validate(&self) -> Result<(), CliError> {
        if self.format != FORMAT {
            return Err(parse_err("format", format!("unsupported format {}, expected {FORMAT}", self.format)));
        }
        if let Some(i) = self.group.iter().position(|&n| n == 0) {
            return Err(parse_err(format!("group[{i}]"), "cyclic orders must be at least 1"));
        }
        let d = self.group.len();
        for (i, gens) in self.subgroups.iter().enumerate() {
            for (j, g) in gens.iter().enumerate() {
                if g.len() != d {
                    return Err(parse_err(format!("subgroups[{i}][{j}]"), format!("expected {d} coordinates, got {}", g.len())));
                }
            }
        }
        if let Some(TargetSpec::Mod { m }) = self.target {
            if m < 2 {
                return Err(parse_err("target.m", "modulus must be at least 2"));
            }
        }
        let size: usize = self.group.iter().map(|&n| n as usize).product();
        for (name, v) in &self.functions {
            if v.len() != size {
                return Err(parse_err(format!("functions.{name}"), format!("expected {size} values, got {}", v.len())));
            }
            if let Some(t) = &self.target {
                let t = t.to_target();
                if let Some(i) = v.iter().position(|x| t.normalize(&x.0).is_none()) {
                    return Err(parse_err(format!("functions.{name}[{i}]"), format!("value is not in {t}")));
                }
            }
        }
        for (name, v) in &self.complex_functions {
            if v.len() != size {
                return Err(parse_err(
                    format!("complex_functions.{name}"),
                    format!("expected {size} values, got {}", v.len()),
                ));
            }
        }
        if let Some(c) = &self.coefficients {
            for (i, r) in c.relations.iter().enumerate() {
                if r.len() != c.generators {
                    return Err(parse_err(format!("coefficients.relations[{i}]"), format!("expected {} entries", c.generators)));
                }
            }
            if !c.action.is_empty() && c.action.len() != d {
                return Err(parse_err("coefficients.action", format!("expected {d} matrices (one per group generator)")));
            }
            for (i, a) in c.action.iter().enumerate() {
                if a.len() != c.generators || a.iter().any(|r| r.len() != c.generators) {
                    return Err(parse_err(format!("coefficients.action[{i}]"), format!("expected a {0}x{0} matrix", c.generators)));
                }
            }
        }
        Ok(())
    }

    pub fn finite_group(&self) -> FiniteGroup {
        FiniteGroup::new(self.group.clone()).expect("validated orders")
    }

    pub fn target(&self) -> Result<Target, CliError> {
        self.target.as_ref().map(|t| t.to_target()).ok_or_else(|| parse_err("target", "missing"))
    }

    pub fn instance(&self) -> Result<Instance, CliError> {
        if self.subgroups.is_empty() {
            return Err(parse_err("subgroups", "at least one subgroup is required"));
        }
        let g = self.finite_group();
        let subs = self
            .subgroups
            .iter()
            .enumerate()
            .map(|(i, gens)| Subgroup::generated(&g, gens).map_err(|e| parse_err(format!("subgroups[{i}]"), e.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        Instance::new(g, subs, self.target()?).map_err(|e| parse_err("subgroups", e.to_string()))
    }

    /// The named function, or the only one if no name is given.
    pub fn function(&self, name: Option<&str>) -> Result<(String, FunctionVector), CliError> {
        let name = self.pick(name, self.functions.keys(), "functions")?;
        let values = self.functions[&name].iter().map(|x| x.0.clone()).collect();
        let f = FunctionVector::new(self.target()?, values)
            .map_err(|e| parse_err(format!("functions.{name}"), e.to_string()))?;
        Ok((name, f))
    }

    pub fn complex_function(&self, name: &str) -> Result<ComplexFunction, CliError> {
        let v = self.complex_functions[name].iter().map(|[re, im]| Complex64::new(*re, *im)).collect();
        ComplexFunction::new(v).map_err(|e| parse_err(format!("complex_functions.{name}"), e.to_string()))
    }

    fn pick<'a>(
        &self,
        name: Option<&str>,
        mut keys: impl Iterator<Item = &'a String>,
        field: &str,
    ) -> Result<String, CliError> {
        match name.or(self.params.function.as_deref()) {
            Some(n) => Ok(n.to_string()),
            None => {
                let first = keys.next().ok_or_else(|| parse_err(field, "no function given"))?;
                if keys.next().is_some() {
                    return Err(parse_err(field, "several functions; choose one with --function"));
                }
                Ok(first.clone())
            }
        }
    }

    /// Which payload a name refers to: `Some(true)` complex, `Some(false)` exact.
    pub fn function_kind(&self, name: Option<&str>) -> Result<(String, bool), CliError> {
        let all: Vec<&String> = self.functions.keys().chain(self.complex_functions.keys()).collect();
        let name = self.pick(name, all.into_iter(), "functions")?;
        if self.functions.contains_key(&name) {
            Ok((name, false))
        } else if self.complex_functions.contains_key(&name) {
            Ok((name, true))
        } else {
            Err(parse_err("functions", format!("no function named {name:?}")))
        }
    }

    pub fn coefficients(&self) -> Result<CoefModule, CliError> {
        let c = self.coefficients.as_ref().ok_or_else(|| parse_err("coefficients", "missing"))?;
        let w = self.finite_group();
        let n = c.generators;
        let cols: Vec<Vec<pdce_core::Int>> =
            c.relations.iter().map(|r| r.iter().map(|&x| pdce_core::Int::from(x)).collect()).collect();
        let group = PresentedGroup::new(n, IntMatrix::from_columns(n, &cols))
            .map_err(|e| parse_err("coefficients.relations", e.to_string()))?
            .with_dual(c.dual);
        if c.action.is_empty() {
            return Ok(CoefModule::trivial(&w, group));
        }
        let action = c.action.iter().map(|a| IntMatrix::from_i64(&a.iter().map(|r| r.as_slice()).collect::<Vec<_>>())).collect();
        CoefModule::new(&w, group, action).map_err(|e| parse_err("coefficients.action", e.to_string()))
    }
}

/// Parses a 1-based index set such as `1,2,3` or `{1,3}`.
pub fn parse_subset(s: &str, k: usize) -> Result<Subset, CliError> {
    let inner = s.trim().trim_start_matches('{').trim_end_matches('}');
    let mut idx = Vec::new();
    for part in inner.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let i: usize = part.parse().map_err(|_| parse_err("--e", format!("not an index: {part:?}")))?;
        if i == 0 || i > k {
            return Err(parse_err("--e", format!("index {i} outside 1..={k}")));
        }
        idx.push(i - 1);
    }
    Ok(Subset::from_indices(&idx))
}

pub fn subset_from_list(v: &[usize], k: usize) -> Result<Subset, CliError> {
    if let Some(&i) = v.iter().find(|&&i| i == 0 || i > k) {
        return Err(parse_err("params.e", format!("index {i} outside 1..={k}")));
    }
    Ok(Subset::from_indices(&v.iter().map(|i| i - 1).collect::<Vec<_>>()))
}

pub fn exact_string(x: &BigRational) -> String {
    Exact(x.clone()).to_string()
}
