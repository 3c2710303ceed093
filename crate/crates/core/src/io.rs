//! Text formats: observation files, `key=value` parameter assignments and
//! the model description shared by the command line and config files.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::de::{self, Deserializer};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::Sample;
use crate::models::{Family, ModelSpec, Setting};

/// Parses whitespace-separated integer rows, one observation per line.
/// `#` starts a comment; blank lines are skipped. Every row must have the
/// same width, and `dim`, when given, fixes it.
pub fn parse_observations(text: &str, dim: Option<usize>) -> Result<Sample> {
    let mut width = dim;
    let mut data = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split_once('#').map_or(raw, |(b, _)| b).trim();
        if body.is_empty() {
            continue;
        }
        let mut count = 0;
        for token in body.split_whitespace() {
            let v: i64 = token
                .parse()
                .map_err(|_| Error::parse(line, None, format!("`{token}` is not an integer")))?;
            data.push(v);
            count += 1;
        }
        match width {
            None => width = Some(count),
            Some(w) if w != count => {
                return Err(Error::parse(line, None, format!("expected {w} values, found {count}")));
            }
            _ => {}
        }
    }
    let Some(w) = width else {
        return Err(Error::parse(0, None, "no observations"));
    };
    if data.is_empty() {
        return Err(Error::parse(0, None, "no observations"));
    }
    Sample::new(w, data)
}

pub fn read_observations(path: &Path, dim: Option<usize>) -> Result<Sample> {
    parse_observations(&std::fs::read_to_string(path)?, dim)
}

/// One observation per line, components separated by single spaces.
pub fn format_observations(sample: &Sample) -> String {
    let mut out = String::with_capacity(sample.len() * 4 * sample.dim());
    for row in sample.rows() {
        let mut first = true;
        for v in row {
            if !first {
                out.push(' ');
            }
            first = false;
            out.push_str(&v.to_string());
        }
        out.push('\n');
    }
    out
}

/// Values of one named quantity: a scalar or a list, `inf` allowed.
#[derive(Debug, Clone, PartialEq)]
pub struct Values(pub Vec<f64>);

fn parse_number(token: &str, key: &str) -> Result<f64> {
    match token.trim().to_ascii_lowercase().as_str() {
        "inf" | "+inf" | "infinity" => Ok(f64::INFINITY),
        t => t
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| Error::Usage(format!("`{key}`: `{}` is not a number", token.trim()))),
    }
}

/// Parses `key=v[,v...][,key=v...]`. A token without `=` continues the list
/// of the previous key, so `r=5,a=1,1,b=9,9` gives `r=[5], a=[1,1], b=[9,9]`.
pub fn parse_assignments(text: &str) -> Result<BTreeMap<String, Values>> {
    let mut out: BTreeMap<String, Values> = BTreeMap::new();
    let mut current: Option<String> = None;
    for token in text.split(',').map(str::trim) {
        if token.is_empty() {
            if text.trim().is_empty() {
                break;
            }
            return Err(Error::Usage(format!("empty entry in `{text}`")));
        }
        let value = match token.split_once('=') {
            Some((key, value)) => {
                let key = key.trim().to_string();
                if key.is_empty() {
                    return Err(Error::Usage(format!("missing name before `=` in `{token}`")));
                }
                if out.contains_key(&key) {
                    return Err(Error::Usage(format!("`{key}` is assigned twice")));
                }
                out.insert(key.clone(), Values(Vec::new()));
                current = Some(key);
                value
            }
            None => token,
        };
        let key = current
            .as_ref()
            .ok_or_else(|| Error::Usage(format!("`{token}` has no name; write `name={token}`")))?;
        let v = parse_number(value, key)?;
        out.get_mut(key).expect("inserted above").0.push(v);
    }
    Ok(out)
}

/// Inverse of [`parse_assignments`].
pub fn format_assignments(values: &BTreeMap<String, Values>) -> String {
    values
        .iter()
        .map(|(k, v)| {
            let list: Vec<String> = v.0.iter().map(|x| format_value(*x)).collect();
            format!("{k}={}", list.join(","))
        })
        .collect::<Vec<_>>()
        .join(",")
}

fn format_value(x: f64) -> String {
    if x == f64::INFINITY {
        "inf".into()
    } else {
        x.to_string()
    }
}

impl Serialize for Values {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        #[serde(untagged)]
        enum Item {
            Num(f64),
            Text(&'static str),
        }
        let item = |x: f64| if x == f64::INFINITY { Item::Text("inf") } else { Item::Num(x) };
        match self.0.as_slice() {
            [x] => item(*x).serialize(s),
            xs => xs.iter().map(|x| item(*x)).collect::<Vec<_>>().serialize(s),
        }
    }
}

impl<'de> Deserialize<'de> for Values {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Item {
            Num(f64),
            Text(String),
        }
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            One(Item),
            Many(Vec<Item>),
        }
        let item = |i: Item| match i {
            Item::Num(x) => Ok(x),
            Item::Text(t) => parse_number(&t, "value").map_err(de::Error::custom),
        };
        match Raw::deserialize(d)? {
            Raw::One(i) => Ok(Values(vec![item(i)?])),
            Raw::Many(is) if is.is_empty() => Err(de::Error::custom("empty value list")),
            Raw::Many(is) => is.into_iter().map(item).collect::<std::result::Result<_, _>>().map(Values),
        }
    }
}

/// A family with named parameters and fixed quantities, as written on the
/// command line (`--model tnm --params p=0.2,0.3 --fixed r=5,a=0,0,b=9,9`)
/// or in a config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelDescription {
    #[serde(with = "family_tag")]
    pub family: Family,
    #[serde(default)]
    pub params: BTreeMap<String, Values>,
    #[serde(default)]
    pub fixed: BTreeMap<String, Values>,
}

mod family_tag {
    use super::*;

    pub fn serialize<S: Serializer>(f: &Family, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(f.tag())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Family, D::Error> {
        String::deserialize(d)?.parse().map_err(de::Error::custom)
    }
}

fn param_keys(family: Family) -> &'static [&'static str] {
    match family {
        Family::Poisson | Family::TruncPoisson => &["lambda"],
        Family::Binomial | Family::TruncBinomial | Family::Logarithmic => &["p"],
        Family::YuleSimon => &["rho"],
        Family::BetaNegBinomial => &["alpha", "beta"],
        Family::NegMultinomial | Family::TruncNegMultinomial => &["p"],
        Family::DirichletNegMultinomial => &["alpha"],
    }
}

fn fixed_keys(family: Family) -> &'static [&'static str] {
    match family {
        Family::Poisson | Family::YuleSimon | Family::Logarithmic => &[],
        Family::Binomial => &["m"],
        Family::BetaNegBinomial | Family::NegMultinomial => &["r"],
        Family::TruncPoisson => &["a", "b"],
        Family::TruncBinomial => &["m", "a", "b"],
        Family::TruncNegMultinomial => &["r", "a", "b"],
        Family::DirichletNegMultinomial => &["r", "alpha0"],
    }
}

impl fmt::Display for ModelDescription {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.family)?;
        if !self.params.is_empty() {
            write!(f, " {}", format_assignments(&self.params))?;
        }
        if !self.fixed.is_empty() {
            write!(f, " [{}]", format_assignments(&self.fixed))?;
        }
        Ok(())
    }
}

impl ModelDescription {
    /// From the `--model`, `--params` and `--fixed` flag values.
    pub fn from_flags(model: &str, params: Option<&str>, fixed: Option<&str>) -> Result<Self> {
        let desc = Self {
            family: model.parse()?,
            params: params.map(parse_assignments).transpose()?.unwrap_or_default(),
            fixed: fixed.map(parse_assignments).transpose()?.unwrap_or_default(),
        };
        desc.check_keys()?;
        Ok(desc)
    }

    /// Describes an existing model, inverse of [`ModelDescription::build`].
    pub fn of(model: &ModelSpec) -> Self {
        let s = model.setting();
        let support = s.support();
        let d = s.dim();
        let ints = |f: &dyn Fn(usize) -> Option<i64>| {
            Values((0..d).map(|i| f(i).map_or(f64::INFINITY, |v| v as f64)).collect())
        };
        let mut params = BTreeMap::new();
        match s.family() {
            Family::BetaNegBinomial => {
                params.insert("alpha".into(), Values(vec![model.theta()[0]]));
                params.insert("beta".into(), Values(vec![model.theta()[1]]));
            }
            f => {
                params.insert(param_keys(f)[0].into(), Values(model.theta().to_vec()));
            }
        }
        let mut fixed = BTreeMap::new();
        for &key in fixed_keys(s.family()) {
            let v = match key {
                "m" => Values(vec![s.m() as f64]),
                "r" => Values(vec![s.r()]),
                "alpha0" => Values(vec![s.alpha0()]),
                "a" => ints(&|i| support.lower_finite(i)),
                _ => ints(&|i| support.upper_finite(i)),
            };
            fixed.insert(key.into(), v);
        }
        Self {
            family: s.family(),
            params,
            fixed,
        }
    }

    fn check_keys(&self) -> Result<()> {
        let check = |map: &BTreeMap<String, Values>, allowed: &[&str], what: &str| {
            for key in map.keys() {
                if !allowed.contains(&key.as_str()) {
                    return Err(Error::Usage(format!(
                        "`{key}` is not a {what} of `{}` (expected: {})",
                        self.family,
                        if allowed.is_empty() { "none".to_string() } else { allowed.join(", ") }
                    )));
                }
            }
            Ok(())
        };
        check(&self.params, param_keys(self.family), "parameter")?;
        check(&self.fixed, fixed_keys(self.family), "fixed quantity")
    }

    fn fixed_scalar(&self, key: &str) -> Result<f64> {
        match self.fixed.get(key).map(|v| v.0.as_slice()) {
            Some([x]) => Ok(*x),
            Some(_) => Err(Error::Usage(format!("`{key}` takes a single value"))),
            None => Err(Error::Usage(format!("`{}` needs --fixed {key}=...", self.family))),
        }
    }

    fn fixed_int(&self, key: &str) -> Result<i64> {
        as_int(self.fixed_scalar(key)?, key)
    }

    fn fixed_ints(&self, key: &str, d: usize) -> Result<Vec<i64>> {
        let v = self
            .fixed
            .get(key)
            .ok_or_else(|| Error::Usage(format!("`{}` needs --fixed {key}=...", self.family)))?;
        let v: Vec<f64> = match v.0.as_slice() {
            [x] => vec![*x; d],
            xs if xs.len() == d => xs.to_vec(),
            xs => {
                return Err(Error::Usage(format!("`{key}` has {} values for dimension {d}", xs.len())));
            }
        };
        v.into_iter().map(|x| as_int(x, key)).collect()
    }

    /// Dimension implied by the parameters, or `hint` when they are absent.
    fn dim(&self, hint: Option<usize>) -> Result<usize> {
        if !self.family.is_multivariate() {
            return Ok(1);
        }
        if let Some(v) = self.params.get(param_keys(self.family)[0]) {
            return Ok(v.0.len());
        }
        if let Some(v) = self.fixed.get("a").filter(|v| v.0.len() > 1) {
            return Ok(v.0.len());
        }
        hint.ok_or_else(|| Error::Usage(format!("cannot tell the dimension of `{}`", self.family)))
    }

    /// The known part of the model. `dim_hint` supplies the dimension of a
    /// multivariate family when no parameter vector is given.
    pub fn setting(&self, dim_hint: Option<usize>) -> Result<Setting> {
        self.check_keys()?;
        let d = self.dim(dim_hint)?;
        match self.family {
            Family::Poisson => Ok(Setting::poisson()),
            Family::YuleSimon => Ok(Setting::yule_simon()),
            Family::Logarithmic => Ok(Setting::logarithmic()),
            Family::Binomial => Setting::binomial(as_count(self.fixed_int("m")?, "m")?),
            Family::BetaNegBinomial => Setting::beta_neg_binomial(self.fixed_scalar("r")?),
            Family::TruncPoisson => {
                let b = self.fixed_scalar("b")?;
                let b = if b == f64::INFINITY { None } else { Some(as_int(b, "b")?) };
                Setting::trunc_poisson(self.fixed_int("a")?, b)
            }
            Family::TruncBinomial => Setting::trunc_binomial(
                as_count(self.fixed_int("m")?, "m")?,
                self.fixed_int("a")?,
                self.fixed_int("b")?,
            ),
            Family::NegMultinomial => Setting::neg_multinomial(d, self.fixed_scalar("r")?),
            Family::TruncNegMultinomial => {
                Setting::trunc_neg_multinomial(self.fixed_scalar("r")?, &self.fixed_ints("a", d)?, &self.fixed_ints("b", d)?)
            }
            Family::DirichletNegMultinomial => {
                Setting::dirichlet_neg_multinomial(d, self.fixed_scalar("r")?, self.fixed_scalar("alpha0")?)
            }
        }
    }

    /// The parameter vector, in the order of [`Setting::param_names`].
    pub fn theta(&self) -> Result<Vec<f64>> {
        self.check_keys()?;
        let mut theta = Vec::new();
        for &key in param_keys(self.family) {
            let v = self
                .params
                .get(key)
                .ok_or_else(|| Error::Usage(format!("`{}` needs --params {key}=...", self.family)))?;
            if !self.family.is_multivariate() && v.0.len() != 1 {
                return Err(Error::Usage(format!("`{key}` takes a single value")));
            }
            theta.extend(&v.0);
        }
        Ok(theta)
    }

    pub fn build(&self) -> Result<ModelSpec> {
        ModelSpec::new(self.setting(None)?, self.theta()?)
    }
}

fn as_int(x: f64, key: &str) -> Result<i64> {
    if x.fract() == 0.0 && x.abs() < 9.0e15 {
        Ok(x as i64)
    } else {
        Err(Error::Usage(format!("`{key}` must be an integer, got {}", format_value(x))))
    }
}

fn as_count(x: i64, key: &str) -> Result<u64> {
    u64::try_from(x).map_err(|_| Error::Usage(format!("`{key}` must be non-negative, got {x}")))
}

/// Parses `lo:hi:step` into the grid `lo, lo+step, ...` up to `hi`.
pub fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').collect();
    let [lo, hi, step] = parts.as_slice() else {
        return Err(Error::Usage(format!("grid `{text}` is not of the form lo:hi:step")));
    };
    let (lo, hi, step) = (parse_number(lo, "lo")?, parse_number(hi, "hi")?, parse_number(step, "step")?);
    if !(step > 0.0) || hi < lo {
        return Err(Error::Usage(format!("grid `{text}` needs step > 0 and hi >= lo")));
    }
    let count = ((hi - lo) / step + 1e-9).floor() as usize + 1;
    // Rounding to 12 decimals removes the drift of lo + i*step.
    Ok((0..count)
        .map(|i| ((lo + i as f64 * step) * 1e12).round() / 1e12)
        .collect())
}
