//! Run configuration: a strict JSON file overlaid with command-line flags.

use std::path::{Path, PathBuf};

use clap::Args;
use latmesh_core::PrecisionContext;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::CliError;

#[derive(Clone, Debug, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    /// JSON config file; flags override its values.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,

    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b: Option<String>,

    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bits: Option<u32>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_bits: Option<u32>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub escalation: Option<u32>,

    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x: Option<String>,
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x_list: Option<Vec<String>>,
    #[arg(long = "T")]
    #[serde(rename = "T", skip_serializing_if = "Option::is_none")]
    pub t: Option<String>,
    #[arg(long = "T0")]
    #[serde(rename = "T0", skip_serializing_if = "Option::is_none")]
    pub t0: Option<String>,
    #[arg(long = "T-list", value_delimiter = ',')]
    #[serde(rename = "T_list", skip_serializing_if = "Option::is_none")]
    pub t_list: Option<Vec<String>>,

    #[arg(long = "H")]
    #[serde(rename = "H", skip_serializing_if = "Option::is_none")]
    pub h: Option<u64>,
    #[arg(long = "H-list", value_delimiter = ',')]
    #[serde(rename = "H_list", skip_serializing_if = "Option::is_none")]
    pub h_list: Option<Vec<u64>>,
    #[arg(long = "R")]
    #[serde(rename = "R", skip_serializing_if = "Option::is_none")]
    pub r: Option<u64>,
    #[arg(long = "box")]
    #[serde(rename = "box", skip_serializing_if = "Option::is_none")]
    pub box_size: Option<u64>,
    #[arg(long = "M")]
    #[serde(rename = "M", skip_serializing_if = "Option::is_none")]
    pub m: Option<u64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub term_cap: Option<u64>,

    /// `ab` or `ba`
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub roles: Option<String>,
    /// `closed` or `partial`
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub route: Option<String>,
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub require_validation: Option<bool>,
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub validate: Option<bool>,
    /// `brute` or `param`
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<String>,
    /// `raw` or `eta`
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub metric: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<String>,
    #[arg(long = "A")]
    #[serde(rename = "A", skip_serializing_if = "Option::is_none")]
    pub amplitude: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m1: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m2: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nu: Option<String>,
    #[arg(long = "H1")]
    #[serde(rename = "H1", skip_serializing_if = "Option::is_none")]
    pub h1: Option<String>,
    #[arg(long = "H2")]
    #[serde(rename = "H2", skip_serializing_if = "Option::is_none")]
    pub h2: Option<String>,
    #[arg(long = "R1")]
    #[serde(rename = "R1", skip_serializing_if = "Option::is_none")]
    pub r1: Option<String>,
    #[arg(long = "R2")]
    #[serde(rename = "R2", skip_serializing_if = "Option::is_none")]
    pub r2: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<String>,
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub short_windows: Option<bool>,

    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

const COMMON: &[&str] = &["a", "b", "bits", "max_bits", "escalation", "threads", "output_dir", "seed"];

/// Keys each subcommand accepts beyond [`COMMON`], and the ones it needs.
pub fn schema(sub: &str) -> (&'static [&'static str], &'static [&'static str]) {
    match sub {
        "count" => (&["x", "x_list"], &["a", "b"]),
        "delta" => (&["x", "x_list"], &["a", "b"]),
        "voronoi" => (&["x", "H", "H_list", "samples", "term_cap"], &["a", "b", "x"]),
        "gterm" => (&["x", "H", "roles"], &["a", "b", "x", "H"]),
        "quads" => (&["box", "mode"], &["a", "b", "box"]),
        "gab" => (&["box", "route", "require_validation", "validate"], &["a", "b"]),
        "sigma1" => (&["H", "box", "roles"], &["a", "b", "H", "box"]),
        "sigma2" => (&["T", "H", "R", "roles"], &["a", "b", "T", "H", "R"]),
        "nearpairs" => (&["mu", "nu", "H1", "H2", "R1", "R2", "delta"], &["mu", "nu", "H1", "H2", "R1", "R2", "delta"]),
        "mingap" => (&["M", "metric"], &["a", "b", "M"]),
        "roth" => (&["alpha", "H"], &["alpha", "H"]),
        "bproc" => (&["A", "beta", "m1", "m2"], &["A", "beta", "m1", "m2"]),
        "moments" => (&["T", "T0", "T_list", "box"], &["a", "b"]),
        "meanvalue" => (&["T"], &["a", "b", "T"]),
        "signchanges" => (&["T", "T0", "short_windows"], &["a", "b", "T"]),
        "report" => (&["T_list", "box"], &["a", "b", "T_list"]),
        _ => (&[], &[]),
    }
}

impl RunConfig {
    /// Overlay `flags` on the config file named by `flags.config`, if any.
    pub fn resolve(flags: &RunConfig) -> Result<RunConfig, CliError> {
        let mut base = match &flags.config {
            Some(p) => load_map(p)?,
            None => Map::new(),
        };
        let Value::Object(over) = serde_json::to_value(flags).map_err(CliError::internal)? else {
            unreachable!("struct serializes to an object");
        };
        base.extend(over);
        serde_json::from_value(Value::Object(base)).map_err(|e| CliError::validation(format!("config: {e}")))
    }

    /// Canonical JSON with sorted keys.
    pub fn canonical(&self) -> String {
        serde_json::to_string(&serde_json::to_value(self).expect("serializable")).expect("serializable")
    }

    pub fn keys(&self) -> Vec<String> {
        match serde_json::to_value(self).expect("serializable") {
            Value::Object(m) => m.keys().cloned().collect(),
            _ => Vec::new(),
        }
    }

    /// Reject keys outside the subcommand schema and report missing ones.
    pub fn check_schema(&self, sub: &str) -> Result<(), CliError> {
        let (extra, required) = schema(sub);
        let keys = self.keys();
        for k in &keys {
            if !COMMON.contains(&k.as_str()) && !extra.contains(&k.as_str()) {
                return Err(CliError::validation(format!("{sub}: unexpected parameter {k:?}")));
            }
        }
        for r in required {
            let alt = match *r {
                "x" => Some("x_list"),
                _ => None,
            };
            let present = keys.iter().any(|k| k == r || Some(k.as_str()) == alt);
            if !present {
                return Err(CliError::validation(format!("{sub}: missing parameter {r:?}")));
            }
        }
        if (sub == "count" || sub == "delta")
            && self.x.is_none() && self.x_list.is_none() {
                return Err(CliError::validation(format!("{sub}: missing parameter \"x\"")));
            }
        Ok(())
    }

    pub fn precision(&self) -> Result<PrecisionContext, CliError> {
        let d = PrecisionContext::default();
        let bits = self.bits.unwrap_or(d.bits);
        let ctx = PrecisionContext::new(
            bits,
            self.max_bits.unwrap_or(d.max_bits.max(bits)),
            self.escalation.unwrap_or(d.escalation_factor),
        )?;
        Ok(ctx.with_env_override())
    }

    pub fn output_dir(&self) -> PathBuf {
        PathBuf::from(self.output_dir.clone().unwrap_or_else(|| "latmesh-out".into()))
    }
}

fn load_map(path: &Path) -> Result<Map<String, Value>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::validation(format!("reading {}: {e}", path.display())))?;
    parse_config_text(&text)
}

/// Parse and schema-check a JSON config document.
pub fn parse_config_text(text: &str) -> Result<Map<String, Value>, CliError> {
    let cfg: RunConfig = serde_json::from_str(text).map_err(|e| CliError::validation(format!("config: {e}")))?;
    match serde_json::to_value(&cfg).map_err(CliError::internal)? {
        Value::Object(m) => Ok(m),
        _ => unreachable!("struct serializes to an object"),
    }
}
