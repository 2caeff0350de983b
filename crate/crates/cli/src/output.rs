use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use flexhand_core::dess::DessModel;
use flexhand_core::indicator::NormalizationContext;
use flexhand_core::model::{Design, FlatVar, VarId};
use flexhand_core::pareto::{write_fronts_csv, ParetoFront};
use serde_json::{json, Map, Value};

use crate::CliError;

pub struct Writer {
    pub dir: PathBuf,
    pub header: bool,
}

impl Writer {
    pub fn new(dir: &Path, header: bool) -> Result<Self, CliError> {
        std::fs::create_dir_all(dir).map_err(|e| CliError::input(format!("cannot create {}: {e}", dir.display())))?;
        Ok(Writer { dir: dir.to_path_buf(), header })
    }

    fn put(&self, name: &str, text: &str) -> Result<(), CliError> {
        let path = self.dir.join(name);
        std::fs::write(&path, text).map_err(|e| CliError::input(format!("cannot write {}: {e}", path.display())))
    }

    /// Text file, preceded by the timestamp line unless disabled.
    pub fn text(&self, name: &str, body: &str) -> Result<(), CliError> {
        let mut s = String::new();
        if self.header {
            let secs = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
            s.push_str(&format!("# flexhand {} generated at unix time {secs}\n", env!("CARGO_PKG_VERSION")));
        }
        s.push_str(body);
        self.put(name, &s)
    }

    pub fn json(&self, name: &str, value: &Value) -> Result<(), CliError> {
        let mut s = serde_json::to_string_pretty(value).expect("json values serialize");
        s.push('\n');
        self.put(name, &s)
    }

    pub fn fronts(
        &self,
        name: &str,
        fronts: &[(&ParetoFront, Option<&NormalizationContext>)],
        vars: &[FlatVar],
        objective_names: &[String],
    ) -> Result<(), CliError> {
        let mut buf = Vec::new();
        write_fronts_csv(&mut buf, fronts, vars, objective_names)?;
        self.text(name, &String::from_utf8(buf).expect("csv is utf-8"))
    }
}

/// `-0` becomes `0` so JSON stays byte-stable.
pub fn num(v: f64) -> Value {
    json!(v + 0.0)
}

pub fn named_values(values: impl Iterator<Item = (String, f64)>) -> Value {
    Value::Object(values.map(|(k, v)| (k, num(v))).collect::<Map<_, _>>())
}

pub fn design_values(vars: &[FlatVar], design: &Design) -> Value {
    named_values(design.values.iter().map(|(v, &x)| (vars[v.0].name.clone(), x)))
}

/// Installed capacity per component, summed over size options.
pub fn capacities(dm: &DessModel, ids: &[String], design: &Design) -> Value {
    named_values(dm.vars.components.iter().zip(ids).map(|(c, id)| {
        let cap = c.size.iter().map(|v: &VarId| design.values.get(v).copied().unwrap_or(0.0)).sum();
        (id.clone(), cap)
    }))
}

pub fn objectives(names: &[String], values: &[f64]) -> Value {
    named_values(names.iter().cloned().zip(values.iter().copied()))
}

pub fn fmt_map(m: &BTreeMap<String, String>) -> Value {
    Value::Object(m.iter().map(|(k, v)| (k.clone(), json!(v))).collect())
}
