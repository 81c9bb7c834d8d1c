//! Argument parsing.

use std::collections::BTreeMap;

use clap::{Args, Parser, Subcommand};

use crate::{CliError, Params, RunConfig};

pub const DEFAULT_PREC: i64 = ramlang_core::localfield::DEFAULT_PREC;

#[derive(Debug, Parser)]
#[command(name = "ramlang", version, about = "Ramification filtrations, unit quotients and depth-r parameters")]
pub struct Cli {
    /// JSON object (inline or a file path) supplying any option by name.
    #[arg(long, global = true)]
    pub input: Option<String>,
    /// Seed for randomized sweeps.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Starting Laurent-series precision.
    #[arg(long, global = true, env = "RAMLANG_PREC", default_value_t = DEFAULT_PREC)]
    pub prec: i64,
    /// Suite name for `verify`.
    #[arg(long, global = true)]
    pub suite: Option<String>,
    /// Also write the report to this path.
    #[arg(long, global = true)]
    pub json_out: Option<String>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Herbrand functions and breaks of a ramification datum or a tower.
    Hh(HhArgs),
    /// Realize a tower and check the filtration statements on it.
    Tower(TowerArgs),
    /// Unit quotients of F^x and the SL_p counterexample.
    Cft(CftArgs),
    /// Depth-r parameter of a Moy-Prasad type.
    Dlparam(DlArgs),
    /// Depth-zero parameter space and orbit pushforward.
    Depth0(Depth0Args),
    /// Run a named verification suite (`--suite list` shows them).
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct HhArgs {
    /// Datum as inline JSON, a file path or `trivial`.
    #[arg(long)]
    pub datum: Option<String>,
    #[arg(long)]
    pub tower: Option<String>,
}

#[derive(Debug, Args)]
pub struct TowerArgs {
    /// `AS<p>` or a label such as `F_9[tame4,AS1]`.
    #[arg(long)]
    pub tower: Option<String>,
}

#[derive(Debug, Args)]
pub struct CftArgs {
    /// `counterexample` or `quotient`.
    pub action: String,
    #[arg(long)]
    pub p: Option<String>,
    /// Listed indices of S, as a JSON array.
    #[arg(long)]
    pub listed: Option<String>,
    /// Start of the tail {n >= tail} of S.
    #[arg(long)]
    pub tail: Option<String>,
    /// Truncation level of the unit quotient.
    #[arg(long)]
    pub level: Option<String>,
}

#[derive(Debug, Args)]
pub struct DlArgs {
    /// `GL2`, `SL_2`, ...
    #[arg(long)]
    pub group: Option<String>,
    /// Point: `vertex`, `barycenter`, a rational (rank 2) or a JSON array.
    #[arg(long)]
    pub x: Option<String>,
    #[arg(long)]
    pub r: Option<String>,
    /// Coefficients of X in the graded piece, as a JSON array.
    #[arg(long = "X")]
    pub coeffs: Option<String>,
    /// Order of the residue field of the coefficients.
    #[arg(long)]
    pub field: Option<String>,
    /// Adapted extension; defaults to the first suitable catalog tower.
    #[arg(long)]
    pub tower: Option<String>,
    /// Residue of alpha as a coefficient array or prime-field integer.
    #[arg(long)]
    pub b: Option<String>,
}

#[derive(Debug, Args)]
pub struct Depth0Args {
    #[arg(long)]
    pub group: Option<String>,
    #[arg(long)]
    pub q: Option<String>,
    /// Point for a pushforward.
    #[arg(long)]
    pub x: Option<String>,
    /// A W_x-orbit of torsion points, as a JSON array of rational arrays.
    #[arg(long)]
    pub theta: Option<String>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub tower: Option<String>,
    #[arg(long)]
    pub p: Option<String>,
    #[arg(long)]
    pub field: Option<String>,
    #[arg(long)]
    pub group: Option<String>,
    #[arg(long)]
    pub q: Option<String>,
    #[arg(long)]
    pub n: Option<String>,
    #[arg(long)]
    pub eps: Option<String>,
    /// Sample size for randomized suites.
    #[arg(long)]
    pub samples: Option<String>,
}

fn collect(pairs: &[(&str, &Option<String>)]) -> BTreeMap<String, String> {
    pairs.iter().filter_map(|(k, v)| v.as_ref().map(|v| (k.to_string(), v.clone()))).collect()
}

impl Cli {
    pub fn into_config(self) -> Result<RunConfig, CliError> {
        let (command, action, flags) = match &self.command {
            Command::Hh(a) => ("hh", None, collect(&[("datum", &a.datum), ("tower", &a.tower)])),
            Command::Tower(a) => ("tower", None, collect(&[("tower", &a.tower)])),
            Command::Cft(a) => (
                "cft",
                Some(a.action.clone()),
                collect(&[("p", &a.p), ("listed", &a.listed), ("tail", &a.tail), ("level", &a.level)]),
            ),
            Command::Dlparam(a) => (
                "dlparam",
                None,
                collect(&[
                    ("group", &a.group),
                    ("x", &a.x),
                    ("r", &a.r),
                    ("X", &a.coeffs),
                    ("field", &a.field),
                    ("tower", &a.tower),
                    ("b", &a.b),
                ]),
            ),
            Command::Depth0(a) => {
                ("depth0", None, collect(&[("group", &a.group), ("q", &a.q), ("x", &a.x), ("theta", &a.theta)]))
            }
            Command::Verify(a) => (
                "verify",
                None,
                collect(&[
                    ("tower", &a.tower),
                    ("p", &a.p),
                    ("field", &a.field),
                    ("group", &a.group),
                    ("q", &a.q),
                    ("n", &a.n),
                    ("eps", &a.eps),
                    ("samples", &a.samples),
                ]),
            ),
        };
        if self.prec < 8 || self.prec > ramlang_core::localfield::MAX_PREC {
            return Err(CliError::Usage(format!(
                "--prec must lie in 8..={}",
                ramlang_core::localfield::MAX_PREC
            )));
        }
        let params = Params::new(flags, self.input.as_deref())?;
        let suite = self.suite.clone().or_else(|| params.get("suite"));
        Ok(RunConfig { command: command.into(), action, params, seed: self.seed, prec: self.prec, suite })
    }
}
