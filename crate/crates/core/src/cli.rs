//! The `bbnx` command line.
//!
//! Exit status: 0 on success, 1 for bad input (one line on stderr), 2 when an
//! engine consistency check fails or `verify` finds a counterexample.

use std::ffi::OsString;
use std::io::Write;
use std::net::SocketAddr;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::error::{Error, Result};
use crate::history::{inject_snapshots, load_injection_file, load_scenario_file, run_scenario, History};
use crate::network::load_network_file;
use crate::oracle::{check_claims, parse_claims, OracleConfig};
use crate::planner::{PlannerConfig, SupportSelection, DEFAULT_RHO};
use crate::expectation::DEFAULT_EPS_BEL;
use crate::session::{explain_window, parse_focal, SessionStore};

#[derive(Debug, Parser)]
#[command(name = "bbnx", version, about = "Belief propagation and explanations for tree-structured Bayesian networks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Propagate a network through a scenario and print every snapshot
    Run {
        #[command(flatten)]
        source: Source,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Explain the change in one hypothesis' belief between two snapshots
    Explain {
        #[command(flatten)]
        source: Source,
        /// Hypothesis to explain, as NODE=state
        #[arg(long)]
        focal: String,
        /// Defaults to the snapshot before `--to`
        #[arg(long)]
        from: Option<usize>,
        /// Defaults to the last snapshot
        #[arg(long)]
        to: Option<usize>,
        #[arg(long, default_value = "auto")]
        support: SupportSelection,
        #[arg(long, default_value_t = DEFAULT_RHO)]
        rho: f64,
        #[arg(long, default_value_t = DEFAULT_EPS_BEL)]
        eps_bel: f64,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Load published π/λ vectors for one node and print the fused beliefs
    Inject {
        #[arg(long)]
        inject: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Check the engine's claims on seeded random instances
    Verify {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        /// `all` or a comma-separated list such as `SignU,NonEmptiness`
        #[arg(long, default_value = "all")]
        claims: String,
        /// Zero out some competitor weights in generated instances
        #[arg(long)]
        adversarial: bool,
        /// Failures printed per claim in text output
        #[arg(long, default_value_t = 1)]
        show: usize,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Serve the HTTP API
    Serve {
        #[arg(long, default_value = "127.0.0.1")]
        host: std::net::IpAddr,
        #[arg(long, default_value_t = 8080)]
        port: u16,
        /// Directory for session files; sessions stay in memory without it
        #[arg(long)]
        persist: Option<PathBuf>,
    },
}

/// Where a history comes from: a network plus optional scenario, or an injection file.
#[derive(Debug, Args)]
pub struct Source {
    #[arg(long, conflicts_with = "inject", required_unless_present = "inject")]
    pub network: Option<PathBuf>,
    #[arg(long, requires = "network")]
    pub scenario: Option<PathBuf>,
    #[arg(long)]
    pub inject: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

impl Source {
    pub fn load(&self) -> Result<History> {
        if let Some(path) = &self.inject {
            return inject_snapshots(&load_injection_file(path)?);
        }
        let path = self
            .network
            .as_ref()
            .ok_or_else(|| Error::Invalid("either --network or --inject is required".into()))?;
        let network = load_network_file(path)?;
        match &self.scenario {
            Some(s) => run_scenario(&network, &load_scenario_file(s)?),
            None => History::initial(&network),
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let rendered = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{rendered}");
                return 1;
            }
            let _ = write!(out, "{rendered}");
            return 0;
        }
    };
    match execute(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error[{}]: {}", e.code(), e);
            if e.is_internal() {
                2
            } else {
                1
            }
        }
    }
}

fn execute(command: Command, out: &mut dyn Write) -> Result<i32> {
    match command {
        Command::Run { source, format } => {
            let history = source.load()?;
            print_history(&history, format, out)?;
        }
        Command::Inject { inject, format } => {
            let history = inject_snapshots(&load_injection_file(inject)?)?;
            print_history(&history, format, out)?;
        }
        Command::Explain {
            source,
            focal,
            from,
            to,
            support,
            rho,
            eps_bel,
            format,
        } => {
            let history = source.load()?;
            let (node, state) = parse_focal(&focal)?;
            let to = to.unwrap_or(history.len() - 1);
            let from = from.unwrap_or(to.saturating_sub(1));
            let config = PlannerConfig { rho, eps_bel };
            let (plan, text) = explain_window(&history, node, state, from, to, support, &config)?;
            match format {
                Format::Text => writeln!(out, "{}", text.text)?,
                Format::Json => writeln!(
                    out,
                    "{}",
                    serde_json::to_string_pretty(&json!({
                        "plan": plan,
                        "text": text.text,
                        "paragraphs": text.paragraphs,
                        "slots": text.slots,
                    }))?
                )?,
            }
        }
        Command::Verify {
            seed,
            trials,
            claims,
            adversarial,
            show,
            format,
        } => {
            let claims = parse_claims(&claims)?;
            let config = OracleConfig {
                adversarial,
                ..Default::default()
            };
            let report = check_claims(seed, trials, &claims, &config);
            match format {
                Format::Text => {
                    write!(out, "{}", report.summary_table())?;
                    for c in &claims {
                        for f in report.failures_for(*c).take(show) {
                            writeln!(out, "{} seed={} {}", f.claim, f.seed, f.state)?;
                        }
                    }
                }
                Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(&report)?)?,
            }
            return Ok(if report.passed() { 0 } else { 2 });
        }
        Command::Serve { host, port, persist } => {
            let store = match persist {
                Some(dir) => SessionStore::persistent(dir)?,
                None => SessionStore::in_memory(),
            };
            let addr = SocketAddr::new(host, port);
            writeln!(out, "listening on http://{addr}")?;
            out.flush()?;
            let runtime = tokio::runtime::Runtime::new()?;
            runtime.block_on(crate::service::serve(addr, store))?;
        }
    }
    Ok(0)
}

fn print_history(history: &History, format: Format, out: &mut dyn Write) -> Result<()> {
    if format == Format::Json {
        writeln!(out, "{}", serde_json::to_string_pretty(history)?)?;
        return Ok(());
    }
    for snap in history.snapshots() {
        match snap.grounded.last() {
            Some(g) if snap.t > 0 => writeln!(out, "t={}  {} = {}", snap.t, g.node, g.state)?,
            _ => writeln!(out, "t={}", snap.t)?,
        }
        for (meta, beliefs) in history.nodes().iter().zip(&snap.nodes) {
            let cells: Vec<String> = meta
                .states
                .iter()
                .zip(&beliefs.bel)
                .map(|(s, b)| format!("{s} {b:.4}"))
                .collect();
            writeln!(out, "  {:<8} {}", meta.id, cells.join("  "))?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run_with(std::iter::once("bbnx").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn help_and_usage_errors() {
        let (code, out, _) = run(&["--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("explain"));
        let (code, _, err) = run(&["explain", "--focal", "B=b_1"]);
        assert_eq!(code, 1);
        assert!(!err.is_empty());
    }

    #[test]
    fn missing_file_is_an_input_error() {
        let (code, out, err) = run(&["run", "--network", "/nonexistent/net.json"]);
        assert_eq!(code, 1);
        assert!(out.is_empty());
        assert!(err.starts_with("error[io_error]"));
        assert_eq!(err.lines().count(), 1);
    }
}
