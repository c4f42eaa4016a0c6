//! Plain-text `key=value` snapshots of beliefs and Q-tables.
//!
//! One entry per line, `#` starts a comment line. Every snapshot carries a
//! `kind` entry. Nested objects are written with dotted key prefixes
//! (`belief.state.0=…`). Reals use the shortest representation that parses
//! back to the identical value.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use crate::beliefs::{BloomConditionalModel, DirichletBelief, MarkovMixtureModel};
use crate::error::{Result, TmdpError};
use crate::scalar::Scalar;
use crate::tmdp::{JointQTable, QTable};

pub fn parse_real<S: Scalar>(text: &str) -> Result<S> {
    text.trim()
        .parse::<f64>()
        .map(S::lit)
        .map_err(|e| TmdpError::Snapshot(format!("bad real `{text}`: {e}")))
}

pub fn parse_reals<S: Scalar>(text: &str) -> Result<Vec<S>> {
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    text.split(',').map(parse_real).collect()
}

pub(crate) fn join_reals<S: Scalar>(values: &[S]) -> String {
    let mut out = String::with_capacity(values.len() * 8);
    for (i, v) in values.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        write!(out, "{}", v.as_f64()).expect("writing to String");
    }
    out
}

/// Parsed snapshot entries.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct KeyValues {
    entries: BTreeMap<String, String>,
}

impl KeyValues {
    pub fn from_text(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| TmdpError::Snapshot(format!("line {}: missing `=`", n + 1)))?;
            if entries.insert(k.trim().to_string(), v.trim().to_string()).is_some() {
                return Err(TmdpError::Snapshot(format!("line {}: duplicate key `{}`", n + 1, k.trim())));
            }
        }
        Ok(Self { entries })
    }

    pub fn get(&self, key: &str) -> Result<&str> {
        self.entries
            .get(key)
            .map(String::as_str)
            .ok_or_else(|| TmdpError::Snapshot(format!("missing key `{key}`")))
    }

    pub fn value<T: FromStr>(&self, key: &str) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        let raw = self.get(key)?;
        raw.parse()
            .map_err(|e| TmdpError::Snapshot(format!("key `{key}`: cannot parse `{raw}`: {e}")))
    }

    /// Entries under `prefix.`, with the prefix stripped.
    pub fn scoped(&self, prefix: &str) -> KeyValues {
        let p = format!("{prefix}.");
        KeyValues {
            entries: self
                .entries
                .iter()
                .filter_map(|(k, v)| k.strip_prefix(&p).map(|rest| (rest.to_string(), v.clone())))
                .collect(),
        }
    }

    fn expect_kind(&self, kind: &str) -> Result<()> {
        let got = self.get("kind")?;
        if got == kind {
            Ok(())
        } else {
            Err(TmdpError::Snapshot(format!("expected kind `{kind}`, found `{got}`")))
        }
    }
}

/// Accumulates `key=value` lines, optionally under a prefix.
#[derive(Debug, Default)]
pub struct SnapshotWriter {
    out: String,
}

impl SnapshotWriter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn comment(&mut self, text: &str) -> &mut Self {
        let _ = writeln!(self.out, "# {text}");
        self
    }

    pub fn entry(&mut self, key: &str, value: impl std::fmt::Display) -> &mut Self {
        let _ = writeln!(self.out, "{key}={value}");
        self
    }

    pub fn nested<T: Snapshot>(&mut self, prefix: &str, item: &T) -> &mut Self {
        for (k, v) in item.snapshot_entries() {
            let _ = writeln!(self.out, "{prefix}.{k}={v}");
        }
        self
    }

    pub fn finish(self) -> String {
        self.out
    }
}

/// Types that round-trip through the plain-text snapshot format.
pub trait Snapshot: Sized {
    fn snapshot_entries(&self) -> Vec<(String, String)>;
    fn restore(kv: &KeyValues) -> Result<Self>;

    fn to_snapshot(&self) -> String {
        let mut out = String::new();
        for (k, v) in self.snapshot_entries() {
            let _ = writeln!(out, "{k}={v}");
        }
        out
    }

    fn from_snapshot(text: &str) -> Result<Self> {
        Self::restore(&KeyValues::from_text(text)?)
    }
}

impl<S: Scalar> Snapshot for DirichletBelief<S> {
    fn snapshot_entries(&self) -> Vec<(String, String)> {
        vec![
            ("kind".into(), "dirichlet".into()),
            ("forget_lambda".into(), self.forget_lambda().as_f64().to_string()),
            ("pseudocounts".into(), join_reals(self.pseudocounts())),
        ]
    }

    fn restore(kv: &KeyValues) -> Result<Self> {
        kv.expect_kind("dirichlet")?;
        DirichletBelief::new(parse_reals(kv.get("pseudocounts")?)?, parse_real(kv.get("forget_lambda")?)?)
    }
}

impl<S: Scalar> Snapshot for BloomConditionalModel<S> {
    fn snapshot_entries(&self) -> Vec<(String, String)> {
        let mut out = vec![("kind".to_string(), "bloom".to_string())];
        out.extend(self.to_entries());
        out
    }

    fn restore(kv: &KeyValues) -> Result<Self> {
        kv.expect_kind("bloom")?;
        Self::from_entries(kv)
    }
}

impl<S: Scalar> Snapshot for MarkovMixtureModel<S> {
    fn snapshot_entries(&self) -> Vec<(String, String)> {
        let mut out = vec![("kind".to_string(), "mixture".to_string())];
        out.extend(self.to_entries());
        out
    }

    fn restore(kv: &KeyValues) -> Result<Self> {
        kv.expect_kind("mixture")?;
        Self::from_entries(kv)
    }
}

impl<S: Scalar> Snapshot for QTable<S> {
    fn snapshot_entries(&self) -> Vec<(String, String)> {
        vec![
            ("kind".into(), "qtable".into()),
            ("shape".into(), format!("{},{}", self.n_states(), self.n_actions())),
            ("values".into(), join_reals(self.values())),
        ]
    }

    fn restore(kv: &KeyValues) -> Result<Self> {
        kv.expect_kind("qtable")?;
        let shape = parse_shape(kv.get("shape")?, 2)?;
        let values: Vec<S> = parse_reals(kv.get("values")?)?;
        if values.len() != shape[0] * shape[1] {
            return Err(TmdpError::Snapshot("qtable value count does not match shape".into()));
        }
        let mut it = values.into_iter();
        Ok(QTable::from_fn(shape[0], shape[1], |_, _| it.next().unwrap_or_default()))
    }
}

impl<S: Scalar> Snapshot for JointQTable<S> {
    fn snapshot_entries(&self) -> Vec<(String, String)> {
        vec![
            ("kind".into(), "joint_qtable".into()),
            (
                "shape".into(),
                format!("{},{},{}", self.n_states(), self.n_actions(), self.n_opp_actions()),
            ),
            ("values".into(), join_reals(self.values())),
        ]
    }

    fn restore(kv: &KeyValues) -> Result<Self> {
        kv.expect_kind("joint_qtable")?;
        let shape = parse_shape(kv.get("shape")?, 3)?;
        let values: Vec<S> = parse_reals(kv.get("values")?)?;
        if values.len() != shape.iter().product::<usize>() {
            return Err(TmdpError::Snapshot("joint qtable value count does not match shape".into()));
        }
        let mut it = values.into_iter();
        Ok(JointQTable::from_fn(shape[0], shape[1], shape[2], |_, _, _| {
            it.next().unwrap_or_default()
        }))
    }
}

fn parse_shape(text: &str, dims: usize) -> Result<Vec<usize>> {
    let shape: Vec<usize> = text
        .split(',')
        .map(|x| x.trim().parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| TmdpError::Snapshot(format!("bad shape `{text}`: {e}")))?;
    if shape.len() != dims {
        return Err(TmdpError::Snapshot(format!("shape `{text}` needs {dims} dimensions")));
    }
    Ok(shape)
}
