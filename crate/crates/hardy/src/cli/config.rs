//! Job configuration: a TOML file with one table per concern. Unknown keys
//! are rejected, and errors name the offending key path.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Error;

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct JobConfig {
    pub problem: ProblemConfig,
    pub family: FamilyConfig,
    pub ep: EpConfig,
    pub afamily: AFamilyConfig,
    pub series: SeriesConfig,
    pub nd: NdConfig,
    pub rellich: RellichConfig,
    pub certify: CertifyConfig,
    pub grid: GridConfig,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProblemConfig {
    pub p: String,
    pub q: String,
    /// `[a, b]`; `inf` is allowed.
    pub interval: [f64; 2],
}

impl Default for ProblemConfig {
    fn default() -> Self {
        ProblemConfig {
            p: "1".into(),
            q: "0".into(),
            interval: [0.0, f64::INFINITY],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyKind {
    Classical,
    AFamily,
    Custom,
}

/// The `(w, f_w)` pair checked by `verify-1d`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FamilyConfig {
    pub kind: FamilyKind,
    pub a: f64,
    /// `custom` only.
    pub w: Option<String>,
    pub f: Option<String>,
}

impl Default for FamilyConfig {
    fn default() -> Self {
        FamilyConfig {
            kind: FamilyKind::Classical,
            a: 1.0,
            w: None,
            f: None,
        }
    }
}

/// Ermakov–Pinney family from a pair of solutions of the problem. Without
/// explicit expressions the pair is integrated from the reference point.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EpConfig {
    pub c: [f64; 3],
    pub v1: Option<String>,
    pub v2: Option<String>,
}

impl Default for EpConfig {
    fn default() -> Self {
        EpConfig {
            c: [1.0, 0.0, 1.0],
            v1: None,
            v2: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AFamilyConfig {
    pub a: f64,
    #[serde(rename = "M")]
    pub m: f64,
    pub xi: Vec<f64>,
}

impl Default for AFamilyConfig {
    fn default() -> Self {
        AFamilyConfig {
            a: 1.0,
            m: 2.0,
            xi: vec![1.0, 0.5, 0.25, 0.125],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SeedPair {
    /// `(√2 t, (L - t)/(√2 L))` with `L = m + 1`, for `q = 0`.
    Classical,
    /// Principal solution at the left end.
    Principal,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SeriesConfig {
    /// Windows end at `m + 1`.
    pub m: f64,
    pub depth: usize,
    /// One `[c1, c2, c3]` per step, or a single one for all.
    pub c: Vec<[f64; 3]>,
    pub alpha: f64,
    pub beta: f64,
    /// `"margins"` or `"fixed"` (anchor at `m + 1` for every step).
    pub anchors: String,
    pub seed: SeedPair,
}

impl Default for SeriesConfig {
    fn default() -> Self {
        SeriesConfig {
            m: 1.0,
            depth: 2,
            c: vec![[0.5, 0.0, 1.0]],
            alpha: 1.0,
            beta: 1.0,
            anchors: "margins".into(),
            seed: SeedPair::Principal,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NdConfig {
    pub n: usize,
    /// Density on `[0, r_phi)`, zero beyond.
    pub phi: String,
    pub r_phi: f64,
    pub u: Option<String>,
    /// Improved-weight parameter as a fraction of `1 / sup t`.
    pub a_fraction: f64,
}

impl Default for NdConfig {
    fn default() -> Self {
        NdConfig {
            n: 3,
            phi: "(1 - r^2)^3".into(),
            r_phi: 1.0,
            u: None,
            a_fraction: 0.5,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RellichConfig {
    pub dimensions: Vec<usize>,
    pub count: usize,
}

impl Default for RellichConfig {
    fn default() -> Self {
        RellichConfig {
            dimensions: vec![3, 4, 5],
            count: 20,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CertifyConfig {
    pub windows: usize,
    pub ratio: f64,
    pub xis: Vec<f64>,
    /// Elements for the best-constant estimate; 0 skips it.
    pub mesh: usize,
}

impl Default for CertifyConfig {
    fn default() -> Self {
        CertifyConfig {
            windows: 8,
            ratio: 0.25,
            xis: vec![1.0],
            mesh: 2000,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    pub nodes: usize,
    /// Relative depth of the grid cutoffs into each end.
    pub depth: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            nodes: 2001,
            depth: 1e-6,
        }
    }
}

fn range_err(key: &str, msg: &str) -> Error {
    Error::config(key, msg)
}

impl JobConfig {
    /// Parses `text`, applies `key=value` overrides and validates.
    pub fn load(text: &str, overrides: &[String]) -> Result<JobConfig, Error> {
        let mut doc: toml::Table =
            toml::from_str(text).map_err(|e| Error::config("<file>", e.to_string()))?;
        for o in overrides {
            apply_override(&mut doc, o)?;
        }
        let de = toml::Value::Table(doc);
        let cfg: JobConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            Error::config(path, e.into_inner().to_string())
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path, overrides: &[String]) -> Result<JobConfig, Error> {
        let text = std::fs::read_to_string(path)?;
        JobConfig::load(&text, overrides)
    }

    pub fn validate(&self) -> Result<(), Error> {
        let [a, b] = self.problem.interval;
        if !(a < b) || a.is_nan() || b.is_nan() {
            return Err(range_err("problem.interval", "needs a < b"));
        }
        if self.grid.nodes < 16 {
            return Err(range_err("grid.nodes", "must be at least 16"));
        }
        if !(self.grid.depth > 0.0 && self.grid.depth < 0.5) {
            return Err(range_err("grid.depth", "must lie in (0, 0.5)"));
        }
        if self.certify.windows < 4 || self.certify.windows > 40 {
            return Err(range_err("certify.windows", "must lie in [4, 40]"));
        }
        if !(self.certify.ratio > 0.0 && self.certify.ratio < 1.0) {
            return Err(range_err("certify.ratio", "must lie in (0, 1)"));
        }
        if self.certify.xis.iter().any(|x| !(*x >= 0.0)) {
            return Err(range_err("certify.xis", "entries must be nonnegative"));
        }
        if self.certify.mesh != 0 && self.certify.mesh < 16 {
            return Err(range_err("certify.mesh", "must be 0 or at least 16"));
        }
        if !(self.family.a > 0.0) {
            return Err(range_err("family.a", "must be positive"));
        }
        if self.family.kind == FamilyKind::Custom && (self.family.w.is_none() || self.family.f.is_none()) {
            return Err(range_err("family", "custom families need both `w` and `f`"));
        }
        if !(self.afamily.a > 0.0) {
            return Err(range_err("afamily.a", "must be positive"));
        }
        if !(self.afamily.m > 0.0) {
            return Err(range_err("afamily.M", "must be positive"));
        }
        if self.afamily.xi.iter().any(|x| !(*x > 0.0)) {
            return Err(range_err("afamily.xi", "entries must be positive"));
        }
        if self.series.depth == 0 || self.series.depth > 12 {
            return Err(range_err("series.depth", "must lie in [1, 12]"));
        }
        if self.series.c.is_empty() {
            return Err(range_err("series.c", "needs at least one triple"));
        }
        if !matches!(self.series.anchors.as_str(), "margins" | "fixed") {
            return Err(range_err("series.anchors", "must be \"margins\" or \"fixed\""));
        }
        if !(self.series.m > 0.0) {
            return Err(range_err("series.m", "must be positive"));
        }
        if !(3..=12).contains(&self.nd.n) {
            return Err(range_err("nd.n", "must lie in [3, 12]"));
        }
        if !(self.nd.r_phi > 0.0 && self.nd.r_phi.is_finite()) {
            return Err(range_err("nd.r_phi", "must be positive and finite"));
        }
        if !(self.nd.a_fraction > 0.0 && self.nd.a_fraction <= 0.99) {
            return Err(range_err("nd.a_fraction", "must lie in (0, 0.99]"));
        }
        if self.rellich.dimensions.iter().any(|n| !(3..=12).contains(n)) {
            return Err(range_err("rellich.dimensions", "entries must lie in [3, 12]"));
        }
        if self.rellich.count == 0 || self.rellich.count > 10_000 {
            return Err(range_err("rellich.count", "must lie in [1, 10000]"));
        }
        Ok(())
    }
}

/// `a.b.c=value`: the value is read as a TOML literal, or as a bare string
/// when it does not parse as one.
fn apply_override(doc: &mut toml::Table, o: &str) -> Result<(), Error> {
    let (key, raw) = o
        .split_once('=')
        .ok_or_else(|| Error::config(o, "override must look like key=value"))?;
    let key = key.trim();
    let value = match toml::from_str::<toml::Table>(&format!("v = {}", raw.trim())) {
        Ok(mut t) => t.remove("v").expect("parsed table has `v`"),
        Err(_) => toml::Value::String(raw.trim().to_string()),
    };
    let parts: Vec<&str> = key.split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(Error::config(key, "empty key segment"));
    }
    let mut table = doc;
    for part in &parts[..parts.len() - 1] {
        let entry = table
            .entry(part.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        table = entry
            .as_table_mut()
            .ok_or_else(|| Error::config(key, format!("`{part}` is not a table")))?;
    }
    table.insert(parts[parts.len() - 1].to_string(), value);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        let cfg = JobConfig::load("", &[]).unwrap();
        assert_eq!(cfg.problem.interval[1], f64::INFINITY);
        assert_eq!(cfg.afamily.xi.len(), 4);
    }

    #[test]
    fn unknown_key_names_its_path() {
        let err = JobConfig::load("[series]\ndepht = 3\n", &[]).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("series"), "{msg}");
        assert!(msg.contains("depht"), "{msg}");
    }

    #[test]
    fn overrides_replace_and_create() {
        let cfg = JobConfig::load(
            "[afamily]\na = 0.5\n",
            &["afamily.a=2".into(), "problem.q=exp(-t)".into(), "afamily.xi=[1.0]".into()],
        )
        .unwrap();
        assert_eq!(cfg.afamily.a, 2.0);
        assert_eq!(cfg.problem.q, "exp(-t)");
        assert_eq!(cfg.afamily.xi, vec![1.0]);
    }

    #[test]
    fn range_violations_are_reported() {
        let err = JobConfig::load("[certify]\nratio = 2.0\n", &[]).unwrap_err();
        assert!(err.to_string().contains("certify.ratio"));
        assert!(JobConfig::load("", &["nonsense".into()]).is_err());
    }
}
