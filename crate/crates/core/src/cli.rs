//! Command-line front end.
//!
//! Exit codes: 0 success, 1 property or I/O failure, 2 usage or parameter
//! error.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::equilibrium::{
    best_response, classify_world, payoff_table, pure_nash, EquilibriumSet, World,
};
use crate::game::{GameParams, Role, Strategy, DEFAULT_RACE_SAFETY};
use crate::phase::{
    emit_csv, format_sig9, region_areas, render_svg, sweep, RegionAreas, SweepSpec,
};
use crate::thresholds::{threshold, threshold_by_bisection, ThresholdKind, Thresholds};
use crate::verify::{self, VerifyConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "raceworlds",
    version,
    about = "Equilibria and phase maps of the two-player pause-or-race game"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Payoff table, best responses, equilibria, world and thresholds at one point.
    Analyze(AnalyzeArgs),
    /// Closed-form thresholds at one lead, cross-checked by bisection.
    Thresholds(AnalyzeArgs),
    /// Sweep the (delta, C) plane and write CSV and/or SVG.
    Phase(PhaseArgs),
    /// Randomized oracle and invariant checks.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    Figure1,
    Figure2,
    Figure3,
}

impl Preset {
    /// `(W, sigma)` of the preset regime.
    pub fn regime(self) -> (f64, f64) {
        match self {
            Preset::Figure1 => (1.0, 0.1),
            Preset::Figure2 => (1.0, 0.2),
            Preset::Figure3 => (0.7, 0.1),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Svg,
    Json,
    Table,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String")]
pub struct GridSize {
    pub delta_steps: usize,
    pub c_steps: usize,
}

impl FromStr for GridSize {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (n, m) = s
            .split_once(['x', 'X'])
            .ok_or_else(|| format!("grid must look like NxM, got {s:?}"))?;
        let parse = |v: &str| {
            v.trim()
                .parse::<usize>()
                .map_err(|e| format!("grid {s:?}: {e}"))
        };
        Ok(GridSize {
            delta_steps: parse(n)?,
            c_steps: parse(m)?,
        })
    }
}

impl TryFrom<String> for GridSize {
    type Error = String;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct ParamArgs {
    /// Frontrunner's capability lead (negative values swap the roles)
    #[arg(long, allow_hyphen_values = true)]
    pub delta: Option<f64>,
    /// Catastrophic cost C
    #[arg(long)]
    pub cost: Option<f64>,
    /// Winner's advantage W in [0, 1]
    #[arg(long = "winner-advantage")]
    pub winner_advantage: Option<f64>,
    /// Technological uncertainty sigma > 0
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Safety level when racing, in [0, 1)
    #[arg(long = "race-safety")]
    pub race_safety: Option<f64>,
    #[arg(long, value_enum)]
    pub preset: Option<Preset>,
    /// Flat JSON object whose keys mirror the flag names
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Args)]
pub struct PhaseArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    /// Cells along delta x cells along C
    #[arg(long)]
    pub grid: Option<GridSize>,
    /// Output file; `.csv` or `.svg` selects the format. Repeatable.
    #[arg(long)]
    pub out: Vec<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Scales every closed-form `threshold + 1` by this factor (suite self-test)
    #[arg(long, hide = true)]
    pub perturb_thresholds: Option<f64>,
}

/// Contents of a `--config` file.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct ConfigFile {
    pub delta: Option<f64>,
    pub cost: Option<f64>,
    pub winner_advantage: Option<f64>,
    pub sigma: Option<f64>,
    pub race_safety: Option<f64>,
    pub preset: Option<Preset>,
    pub grid: Option<GridSize>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub seed: Option<u64>,
    pub samples: Option<usize>,
}

/// Fully resolved settings: flags, then config file, then preset, then
/// built-in defaults (which are the `figure1` regime).
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub delta: f64,
    pub cost: f64,
    pub winner_advantage: f64,
    pub sigma: f64,
    pub race_safety: f64,
    pub grid: GridSize,
    pub out: Vec<PathBuf>,
    pub format: Option<Format>,
    pub seed: u64,
    pub samples: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        let spec = SweepSpec::<f64>::default();
        RunConfig {
            delta: 0.0,
            cost: 0.0,
            winner_advantage: spec.winner_advantage,
            sigma: spec.sigma,
            race_safety: DEFAULT_RACE_SAFETY,
            grid: GridSize {
                delta_steps: spec.delta_steps,
                c_steps: spec.c_steps,
            },
            out: Vec::new(),
            format: None,
            seed: verify::DEFAULT_SEED,
            samples: verify::DEFAULT_SAMPLES,
        }
    }
}

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    fn failure(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_FAILURE,
            message: message.into(),
        }
    }
}

impl From<crate::error::ModelError> for CliError {
    fn from(e: crate::error::ModelError) -> Self {
        CliError::usage(e.to_string())
    }
}

fn load_config(path: &Path) -> Result<ConfigFile, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
}

pub fn resolve(
    params: &ParamArgs,
    grid: Option<GridSize>,
    out: &[PathBuf],
    format: Option<Format>,
    seed: Option<u64>,
    samples: Option<usize>,
) -> Result<RunConfig, CliError> {
    let file = match &params.config {
        Some(path) => load_config(path)?,
        None => ConfigFile::default(),
    };
    let mut cfg = RunConfig::default();
    if let Some(preset) = params.preset.or(file.preset) {
        (cfg.winner_advantage, cfg.sigma) = preset.regime();
    }
    let pick = |flag: Option<f64>, from_file: Option<f64>, fallback: f64| {
        flag.or(from_file).unwrap_or(fallback)
    };
    cfg.delta = pick(params.delta, file.delta, cfg.delta);
    cfg.cost = pick(params.cost, file.cost, cfg.cost);
    cfg.winner_advantage = pick(
        params.winner_advantage,
        file.winner_advantage,
        cfg.winner_advantage,
    );
    cfg.sigma = pick(params.sigma, file.sigma, cfg.sigma);
    cfg.race_safety = pick(params.race_safety, file.race_safety, cfg.race_safety);
    cfg.grid = grid.or(file.grid).unwrap_or(cfg.grid);
    cfg.out = if out.is_empty() {
        file.out.into_iter().collect()
    } else {
        out.to_vec()
    };
    cfg.format = format.or(file.format);
    cfg.seed = seed.or(file.seed).unwrap_or(cfg.seed);
    cfg.samples = samples.or(file.samples).unwrap_or(cfg.samples);
    Ok(cfg)
}

impl RunConfig {
    /// Game at the configured point; a negative lead is normalized by
    /// swapping the roles.
    pub fn game(&self) -> Result<GameParams<f64>, CliError> {
        let (params, _) = GameParams::from_signed_delta(
            self.delta,
            self.winner_advantage,
            self.cost,
            self.sigma,
            self.race_safety,
        )?;
        Ok(params)
    }

    pub fn sweep_spec(&self) -> Result<SweepSpec<f64>, CliError> {
        let spec = SweepSpec {
            delta_steps: self.grid.delta_steps,
            c_steps: self.grid.c_steps,
            winner_advantage: self.winner_advantage,
            sigma: self.sigma,
            s_race: self.race_safety,
            ..SweepSpec::default()
        };
        spec.validate()?;
        Ok(spec)
    }
}

#[derive(Debug, Serialize)]
struct ParamsReport {
    delta: f64,
    cost: f64,
    winner_advantage: f64,
    sigma: f64,
    race_safety: f64,
    boost: f64,
}

#[derive(Debug, Serialize)]
struct PayoffRow {
    frontrunner: Strategy,
    laggard: Strategy,
    eu_frontrunner: f64,
    eu_laggard: f64,
}

#[derive(Debug, Serialize)]
struct BestResponseRow {
    role: Role,
    rival: Strategy,
    best_response: Strategy,
    pause_minus_race: f64,
    tie: bool,
}

/// Machine-readable result of `analyze`.
#[derive(Debug, Serialize)]
pub struct AnalyzeReport {
    params: ParamsReport,
    payoff_table: Vec<PayoffRow>,
    best_responses: Vec<BestResponseRow>,
    equilibria: EquilibriumSet,
    world: World,
    thresholds: Thresholds<f64>,
}

pub fn analyze(params: &GameParams<f64>) -> AnalyzeReport {
    AnalyzeReport {
        params: ParamsReport {
            delta: params.delta(),
            cost: params.cost(),
            winner_advantage: params.winner_advantage(),
            sigma: params.sigma(),
            race_safety: params.s_race(),
            boost: params.boost(),
        },
        payoff_table: payoff_table(params)
            .into_iter()
            .map(|(p, cell)| PayoffRow {
                frontrunner: p.frontrunner,
                laggard: p.laggard,
                eu_frontrunner: cell.eu_frontrunner,
                eu_laggard: cell.eu_laggard,
            })
            .collect(),
        best_responses: Role::ALL
            .into_iter()
            .flat_map(|role| Strategy::ALL.into_iter().map(move |rival| (role, rival)))
            .map(|(role, rival)| {
                let br = best_response(role, rival, params);
                BestResponseRow {
                    role,
                    rival,
                    best_response: br.strategy,
                    pause_minus_race: br.gap,
                    tie: br.tie,
                }
            })
            .collect(),
        equilibria: pure_nash(params),
        world: classify_world(params),
        thresholds: Thresholds::at(params),
    }
}

impl AnalyzeReport {
    pub fn world(&self) -> World {
        self.world
    }

    pub fn to_table(&self) -> String {
        let p = &self.params;
        let mut s = String::new();
        let _ = writeln!(
            s,
            "delta={:.6}  C={:.6}  W={:.6}  sigma={:.6}  s_race={:.6}  B={:.6}",
            p.delta, p.cost, p.winner_advantage, p.sigma, p.race_safety, p.boost
        );
        let _ = writeln!(s);
        let _ = writeln!(s, "payoffs (EU Frontrunner, EU Laggard)");
        let _ = writeln!(s, "{:<20}{:<26}Laggard Race", "", "Laggard Pause");
        for f in Strategy::ALL {
            let mut line = format!("{:<20}", format!("Frontrunner {f}"));
            for row in self.payoff_table.iter().filter(|r| r.frontrunner == f) {
                line.push_str(&format!(
                    "{:<26}",
                    format!("({:.6}, {:.6})", row.eu_frontrunner, row.eu_laggard)
                ));
            }
            let _ = writeln!(s, "{}", line.trim_end());
        }
        let _ = writeln!(s);
        let _ = writeln!(s, "best responses");
        for br in &self.best_responses {
            let _ = writeln!(
                s,
                "  {:<11} vs {:<5} -> {:<5}  EU(Pause)-EU(Race) = {:.6}{}",
                br.role.to_string(),
                br.rival.to_string(),
                br.best_response.to_string(),
                br.pause_minus_race,
                if br.tie { "  (tie)" } else { "" }
            );
        }
        let _ = writeln!(s);
        let _ = writeln!(s, "equilibria: {}", self.equilibria);
        let _ = writeln!(s, "world: {}", self.world);
        let _ = writeln!(s);
        let _ = writeln!(s, "thresholds at delta");
        for kind in ThresholdKind::ALL {
            let _ = writeln!(s, "  {:<4} {:.6}", kind.code(), self.thresholds.get(kind));
        }
        s
    }
}

fn cmd_analyze(args: &AnalyzeArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let cfg = resolve(&args.params, None, &[], args.format, None, None)?;
    let params = cfg.game()?;
    let report = analyze(&params);
    let text = match cfg.format.unwrap_or(Format::Table) {
        Format::Json => serde_json::to_string_pretty(&report).expect("report serializes") + "\n",
        Format::Table => report.to_table(),
        other => {
            return Err(CliError::usage(format!(
                "analyze supports --format table|json, not {other:?}"
            )))
        }
    };
    write_out(out, text.as_bytes())
}

#[derive(Debug, Serialize)]
struct ThresholdRow {
    kind: ThresholdKind,
    closed_form: f64,
    bisection: f64,
}

fn cmd_thresholds(args: &AnalyzeArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let cfg = resolve(&args.params, None, &[], args.format, None, None)?;
    let (d, w, sigma, s) = (cfg.delta, cfg.winner_advantage, cfg.sigma, cfg.race_safety);
    let rows = ThresholdKind::ALL
        .into_iter()
        .map(|kind| {
            let closed_form = threshold(kind, d, w, sigma, s)?;
            let bisection =
                threshold_by_bisection(kind, d, w, sigma, s, 10.0 * (closed_form.max(0.0) + 2.0))?;
            Ok(ThresholdRow {
                kind,
                closed_form,
                bisection,
            })
        })
        .collect::<Result<Vec<_>, crate::error::ModelError>>()?;
    let text = match cfg.format.unwrap_or(Format::Table) {
        Format::Json => serde_json::to_string_pretty(&rows).expect("rows serialize") + "\n",
        Format::Table => {
            let mut t = format!("{:<5}{:>16}{:>16}\n", "kind", "closed form", "bisection");
            for r in &rows {
                let _ = writeln!(
                    t,
                    "{:<5}{:>16.6}{:>16.6}",
                    r.kind.code(),
                    r.closed_form,
                    r.bisection
                );
            }
            t
        }
        other => {
            return Err(CliError::usage(format!(
                "thresholds supports --format table|json, not {other:?}"
            )))
        }
    };
    write_out(out, text.as_bytes())
}

fn artifact_format(path: &Path, fallback: Option<Format>) -> Result<Format, CliError> {
    match path
        .extension()
        .and_then(|e| e.to_str())
        .map(str::to_ascii_lowercase)
        .as_deref()
    {
        Some("csv") => Ok(Format::Csv),
        Some("svg") => Ok(Format::Svg),
        _ => match fallback {
            Some(f @ (Format::Csv | Format::Svg)) => Ok(f),
            _ => Err(CliError::usage(format!(
                "cannot tell the format of {}; use a .csv/.svg extension or --format csv|svg",
                path.display()
            ))),
        },
    }
}

fn areas_table(areas: &RegionAreas) -> String {
    let mut s = String::from("region areas (fraction of cells)\n");
    for (world, frac) in areas.iter() {
        if world.is_canonical() || frac > 0.0 {
            let _ = writeln!(s, "  {:<18} {:.6}", world.name(), frac);
        }
    }
    s
}

fn cmd_phase(args: &PhaseArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    let cfg = resolve(&args.params, args.grid, &args.out, args.format, None, None)?;
    let spec = cfg.sweep_spec()?;
    let grid = sweep(&spec)?;
    let areas = region_areas(&grid);
    let render = |format: Format, sink: &mut dyn Write| match format {
        Format::Svg => render_svg(&grid, sink),
        _ => emit_csv(&grid, sink),
    };

    let mut summary_to_stderr = false;
    if cfg.out.is_empty() {
        if let Some(f @ (Format::Csv | Format::Svg)) = cfg.format {
            render(f, out).map_err(|e| CliError::failure(format!("stdout: {e}")))?;
            summary_to_stderr = true;
        }
    }
    for path in &cfg.out {
        let format = artifact_format(path, cfg.format)?;
        let file = fs::File::create(path)
            .map_err(|e| CliError::failure(format!("{}: {e}", path.display())))?;
        let mut writer = std::io::BufWriter::new(file);
        render(format, &mut writer)
            .map_err(|e| CliError::failure(format!("{}: {e}", path.display())))?;
    }

    let summary = if cfg.format == Some(Format::Json) {
        #[derive(Serialize)]
        struct PhaseSummary<'a> {
            spec: &'a SweepSpec<f64>,
            areas: &'a RegionAreas,
        }
        serde_json::to_string_pretty(&PhaseSummary {
            spec: &spec,
            areas: &areas,
        })
        .expect("summary serializes")
            + "\n"
    } else {
        format!(
            "W={} sigma={} s_race={} grid {}x{}\n{}",
            format_sig9(spec.winner_advantage),
            format_sig9(spec.sigma),
            format_sig9(spec.s_race),
            spec.delta_steps,
            spec.c_steps,
            areas_table(&areas)
        )
    };
    if summary_to_stderr {
        write_out(err, summary.as_bytes())
    } else {
        write_out(out, summary.as_bytes())
    }
}

fn cmd_verify(args: &VerifyArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let cfg = resolve(
        &args.params,
        None,
        &[],
        args.format,
        args.seed,
        args.samples,
    )?;
    let config = VerifyConfig {
        seed: cfg.seed,
        samples: cfg.samples,
    };
    let report = match args.perturb_thresholds {
        Some(factor) => {
            let perturbed = move |kind, d, w, sigma, s| {
                threshold(kind, d, w, sigma, s).map(|c| (c + 1.0) * factor - 1.0)
            };
            verify::run_with(config, &perturbed)?
        }
        None => verify::run(config)?,
    };
    let text = match cfg.format.unwrap_or(Format::Table) {
        Format::Json => serde_json::to_string_pretty(&report).expect("report serializes") + "\n",
        Format::Table => report.to_string() + "\n",
        other => {
            return Err(CliError::usage(format!(
                "verify supports --format table|json, not {other:?}"
            )))
        }
    };
    write_out(out, text.as_bytes())?;
    if report.all_passed() {
        Ok(())
    } else {
        Err(CliError {
            code: EXIT_FAILURE,
            message: format!(
                "{} of {} samples failed (seed {})",
                report.samples - report.passed,
                report.samples,
                report.seed
            ),
        })
    }
}

fn write_out(sink: &mut dyn Write, bytes: &[u8]) -> Result<(), CliError> {
    sink.write_all(bytes)
        .and_then(|_| sink.flush())
        .map_err(|e| CliError::failure(format!("write failed: {e}")))
}

/// Parses `args` and runs the command, returning the process exit code.
pub fn run<I, A>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = A>,
    A: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if code == EXIT_OK {
                out.write_all(rendered.as_bytes())
            } else {
                err.write_all(rendered.as_bytes())
            };
            return code;
        }
    };
    let result = match &cli.command {
        Command::Analyze(a) => cmd_analyze(a, out),
        Command::Thresholds(a) => cmd_thresholds(a, out),
        Command::Phase(a) => cmd_phase(a, out, err),
        Command::Verify(a) => cmd_verify(a, out),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {}", e.message);
            e.code
        }
    }
}
