//! Job files: the data a subcommand operates on.
//!
//! ```json
//! {
//!   "presentation": {"builtin": "torus", "size": 2},
//!   "cochain": {"degree": 2, "values": {"1,2": "1"}},
//!   "classes": [{"degree": 2, "values": {"1,2": "1"}}],
//!   "k_list": [1], "i_list": [1], "balance": [1, 1]
//! }
//! ```
//!
//! `presentation` is either a built-in reference or the full presentation schema.

use std::path::Path;

use serde::Deserialize;
use serde_json::Value;
use workbench_core::env::{Strategy, Token};
use workbench_core::lralg::make_standard;
use workbench_core::{Cochain, Connection, LieRinehart, Mode, Presentation, StandardKind};

use crate::error::{CliError, CliResult};

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Job {
    pub presentation: Option<Value>,
    pub cochain: Option<Value>,
    pub connection: Option<Value>,
    pub word: Option<Value>,
    pub classes: Option<Vec<Value>>,
    pub k_list: Option<Vec<usize>>,
    pub i_list: Option<Vec<usize>>,
    pub balance: Option<(usize, usize)>,
    pub mode: Option<Mode>,
    pub strategy: Option<Strategy>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BuiltinRef {
    builtin: StandardKind,
    size: usize,
}

impl Job {
    pub fn load(path: &Path) -> CliResult<Job> {
        let shown = path.display().to_string();
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: shown.clone(), source })?;
        serde_json::from_str(&text).map_err(|source| CliError::Json { path: shown, source })
    }

    /// The presentation, with `builtin` (`kind:size`) taking precedence over the job file.
    pub fn presentation(&self, builtin: Option<&str>) -> CliResult<Presentation> {
        if let Some(name) = builtin {
            let (kind, size) = parse_builtin(name)?;
            return Ok(make_standard(kind, size)?.presentation().clone());
        }
        let value = self
            .presentation
            .as_ref()
            .ok_or_else(|| CliError::Usage("no presentation: pass --builtin or --input with a `presentation`".into()))?;
        if value.get("builtin").is_some() {
            let r: BuiltinRef =
                serde_json::from_value(value.clone()).map_err(|e| workbench_core::Error::Schema(e.to_string()))?;
            return Ok(make_standard(r.builtin, r.size)?.presentation().clone());
        }
        Ok(Presentation::from_json(value)?)
    }

    pub fn algebra(&self, builtin: Option<&str>, seed: u64) -> CliResult<LieRinehart> {
        Ok(LieRinehart::new(self.presentation(builtin)?, seed)?)
    }

    pub fn cochain(&self, lr: &LieRinehart) -> CliResult<Option<Cochain>> {
        self.cochain
            .as_ref()
            .map(|v| Cochain::from_json(v, lr.ring(), lr.rank()).map_err(CliError::from))
            .transpose()
    }

    /// The job cochain, or the zero cochain of `degree` when none is given.
    pub fn cochain_or_zero(&self, lr: &LieRinehart, degree: usize) -> CliResult<Cochain> {
        Ok(self.cochain(lr)?.unwrap_or_else(|| Cochain::zero(degree, lr.rank(), lr.nvars())))
    }

    pub fn connection(&self, lr: &LieRinehart) -> CliResult<Connection> {
        let v = self.connection.as_ref().ok_or_else(|| CliError::Usage("job has no `connection`".into()))?;
        Ok(Connection::from_json(v, lr)?)
    }

    pub fn word(&self, lr: &LieRinehart) -> CliResult<Vec<Token>> {
        let v = self.word.as_ref().ok_or_else(|| CliError::Usage("job has no `word`".into()))?;
        Ok(workbench_core::env::word_from_json(v, lr.ring(), lr.rank())?)
    }

    pub fn classes(&self, lr: &LieRinehart) -> CliResult<Vec<Cochain>> {
        let vs = self.classes.as_ref().ok_or_else(|| CliError::Usage("job has no `classes`".into()))?;
        vs.iter()
            .map(|v| Cochain::from_json(v, lr.ring(), lr.rank()).map_err(CliError::from))
            .collect()
    }
}

pub fn parse_builtin(name: &str) -> CliResult<(StandardKind, usize)> {
    let bad = || CliError::Usage(format!("expected `kind:size` for --builtin, got `{name}`"));
    let (kind, size) = name.split_once(':').ok_or_else(bad)?;
    let kind: StandardKind = kind.parse()?;
    let size: usize = size.parse().map_err(|_| bad())?;
    Ok((kind, size))
}
