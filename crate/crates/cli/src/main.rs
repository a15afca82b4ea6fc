use std::path::PathBuf;

use clap::{Parser, Subcommand};

use vervaat::decomp::{
    build_vb, build_vervaat_bridge_neg, build_vervaat_bridge_pos, conditioned_above_line,
    direct_vb, direct_vervaat_bridge, DecompSample,
};
use vervaat::grid::GridPath;
use vervaat::lattice::z_pmf;
use vervaat::laws::{arcsine, fa, fz, fztilde, meander_marginal, rayleigh, ClosedFormLaw};
use vervaat::rng::RngStream;
use vervaat::transform::{default_bandwidth, quantile_transform_bm, shift, vervaat};
use vervaat::{Error, Result};

use vervaat_cli::config::ExperimentConfig;
use vervaat_cli::experiments;
use vervaat_cli::plot;
use vervaat_cli::table::{num, Table};

#[derive(Parser)]
#[command(name = "vervaat", version, about = "Seeded path-transform experiments")]
struct Cli {
    /// Flat JSON config file; flags override its values.
    #[arg(long, global = true)]
    config: Option<String>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Grid steps per unit-time path (power of two in [2^4, 2^16]).
    #[arg(long, global = true)]
    grid: Option<usize>,
    #[arg(long, global = true)]
    reps: Option<usize>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    lambda: Option<f64>,
    #[arg(long, global = true)]
    alpha: Option<f64>,
    #[arg(long = "out-dir", global = true)]
    out_dir: Option<String>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Draw seeded paths from one of the construction laws as CSV.
    Sample {
        /// vbridge-neg | vbridge-pos | vb | vb-direct | vbridge-direct | vbridge-cond
        #[arg(long)]
        law: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Apply a path transform to every row of a path CSV.
    Transform {
        #[arg(long)]
        input: PathBuf,
        /// vervaat | shift | quantile
        #[arg(long)]
        op: String,
        /// Shift amount for op = shift.
        #[arg(long, allow_negative_numbers = true)]
        u: Option<f64>,
        /// Occupation bandwidth for op = quantile.
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact first-visit pmf of the lattice transform as rational CSV.
    Enumerate {
        #[arg(long)]
        n: usize,
        #[arg(long, allow_negative_numbers = true)]
        a: i64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tabulate a closed-form law as t,pdf,cdf CSV.
    Laws {
        /// fz | fa | fztilde | meander | arcsine | rayleigh
        #[arg(long)]
        name: String,
        /// Time argument for the meander marginal.
        #[arg(long)]
        t: Option<f64>,
        #[arg(long, default_value_t = 512)]
        points: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run an experiment suite (or `all`) and report pass/fail.
    Verify {
        #[arg(long)]
        suite: String,
        /// Write the report array as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
        /// Write the slope-cdf comparison CSV (hull suite).
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Emit per-figure CSV data.
    PlotData {
        /// vbridge-neg | vbridge-pos | vb | overlay | lattice
        #[arg(long)]
        figure: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn build_config(cli: &Cli) -> Result<ExperimentConfig> {
    let mut cfg = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(v) = cli.seed {
        cfg.seed = v;
    }
    if let Some(v) = cli.grid {
        cfg.grid = v;
    }
    if let Some(v) = cli.reps {
        cfg.reps = v;
    }
    if let Some(v) = cli.lambda {
        cfg.lambda = v;
    }
    if let Some(v) = cli.alpha {
        cfg.alpha = v;
    }
    if let Some(v) = &cli.out_dir {
        cfg.out_dir = Some(v.clone());
    }
    cfg.apply_env()?;
    cfg.validate()?;
    Ok(cfg)
}

fn emit(table: &Table, out: Option<&PathBuf>) -> Result<()> {
    match out {
        Some(path) => table.write(path),
        None => {
            print!("{}", table.render());
            Ok(())
        }
    }
}

fn sample_once(law: &str, cfg: &ExperimentConfig, rng: &mut RngStream) -> Result<DecompSample> {
    match law {
        "vbridge-neg" => build_vervaat_bridge_neg(cfg.lambda, cfg.grid, rng),
        "vbridge-pos" => build_vervaat_bridge_pos(cfg.lambda.abs(), cfg.grid, rng),
        "vb" => build_vb(cfg.grid, rng),
        "vb-direct" => direct_vb(cfg.grid, rng),
        "vbridge-direct" => direct_vervaat_bridge(cfg.lambda, cfg.grid, rng),
        "vbridge-cond" => conditioned_above_line(cfg.lambda, cfg.grid, 1_000_000, rng),
        other => Err(Error::invalid(format!(
            "unknown law {other:?}; available: vbridge-neg, vbridge-pos, vb, \
             vb-direct, vbridge-direct, vbridge-cond"
        ))),
    }
}

fn latent_columns(law: &str) -> &'static [&'static str] {
    match law {
        "vbridge-neg" => &["z"],
        "vbridge-pos" => &["zhat"],
        "vb" => &["a"],
        "vb-direct" => &["a", "t0"],
        "vbridge-direct" => &["a", "z", "zhat"],
        _ => &["attempts"],
    }
}

fn cmd_sample(law: &str, cfg: &ExperimentConfig, out: Option<&PathBuf>) -> Result<()> {
    let latents = latent_columns(law);
    let mut header: Vec<String> = (0..=cfg.grid).map(|i| format!("v_{i}")).collect();
    header.extend(latents.iter().map(|s| s.to_string()));
    let mut table = Table::new(header);
    for rep in 0..cfg.reps {
        let mut rng = RngStream::new(cfg.seed, rep as u64);
        let s = sample_once(law, cfg, &mut rng)?;
        let mut row: Vec<String> = s.path.values().iter().map(|&v| num(v)).collect();
        for name in latents {
            row.push(match *name {
                "attempts" => s.attempts.to_string(),
                other => s.latent(other).map(num).unwrap_or_else(|| "nan".into()),
            });
        }
        table.push(row);
    }
    emit(&table, out)
}

fn read_paths(input: &PathBuf) -> Result<Vec<Vec<f64>>> {
    let text = std::fs::read_to_string(input)
        .map_err(|e| Error::invalid(format!("read {}: {e}", input.display())))?;
    // Keep only the leading v_0..v_N columns when the header has them,
    // so files produced by `sample` (which append latent columns) round
    // trip; headerless or unlabeled files are taken whole.
    let mut keep = usize::MAX;
    let mut rows = Vec::new();
    let mut width = None;
    for (k, line) in text.lines().enumerate() {
        if line.is_empty() {
            continue;
        }
        if k == 0 {
            let cols: Vec<&str> = line.split(',').collect();
            if cols.first() == Some(&"v_0") {
                keep = cols.iter().take_while(|c| c.starts_with("v_")).count();
            }
            continue;
        }
        let row: Vec<f64> = line
            .split(',')
            .take(keep)
            .map(|f| {
                f.parse()
                    .map_err(|_| Error::invalid(format!("line {}: bad number {f:?}", k + 1)))
            })
            .collect::<Result<_>>()?;
        if *width.get_or_insert(row.len()) != row.len() {
            return Err(Error::invalid(format!("line {}: ragged row", k + 1)));
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::invalid("input has no data rows"));
    }
    Ok(rows)
}

fn cmd_transform(
    input: &PathBuf,
    op: &str,
    u: Option<f64>,
    eps: Option<f64>,
    out: Option<&PathBuf>,
) -> Result<()> {
    let rows = read_paths(input)?;
    let n = rows[0].len() - 1;
    let mut header: Vec<String> = (0..=n).map(|i| format!("v_{i}")).collect();
    if op == "vervaat" {
        header.push("split".into());
    }
    let mut table = Table::new(header);
    for row in rows {
        let p = GridPath::new(1.0, row)?;
        let (values, split) = match op {
            "vervaat" => {
                let r = vervaat(&p)?;
                (r.path.values().to_vec(), Some(r.split_time))
            }
            "shift" => {
                let u = u.ok_or_else(|| Error::invalid("op shift requires --u"))?;
                (shift(&p, u)?.values().to_vec(), None)
            }
            "quantile" => {
                let eps = eps.unwrap_or_else(|| default_bandwidth(n));
                (quantile_transform_bm(&p, eps)?.values().to_vec(), None)
            }
            other => {
                return Err(Error::invalid(format!(
                    "unknown op {other:?}; available: vervaat, shift, quantile"
                )))
            }
        };
        let mut out_row: Vec<String> = values.iter().map(|&v| num(v)).collect();
        if let Some(s) = split {
            out_row.push(num(s));
        }
        table.push(out_row);
    }
    emit(&table, out)
}

fn cmd_enumerate(n: usize, a: i64, out: Option<&PathBuf>) -> Result<()> {
    let pmf = z_pmf(n, a)?;
    let mut table = Table::new(["l", "numerator", "denominator"]);
    for (l, mass) in pmf.support().iter().zip(pmf.masses()) {
        table.push([l.to_string(), mass.numer().to_string(), mass.denom().to_string()]);
    }
    emit(&table, out)
}

fn law_by_name(name: &str, cfg: &ExperimentConfig, t: Option<f64>) -> Result<(ClosedFormLaw, f64, f64)> {
    match name {
        "fz" => Ok((fz(cfg.lambda)?, 0.0, 1.0)),
        "fa" => Ok((fa(cfg.lambda)?, 0.0, 1.0)),
        "fztilde" => Ok((fztilde(cfg.lambda)?, 0.0, 1.0)),
        "meander" => Ok((meander_marginal(t.unwrap_or(0.5))?, 0.0, 8.0)),
        "arcsine" => Ok((arcsine(), 0.0, 1.0)),
        "rayleigh" => Ok((rayleigh(), 0.0, 6.0)),
        other => Err(Error::invalid(format!(
            "unknown law {other:?}; available: fz, fa, fztilde, meander, arcsine, rayleigh"
        ))),
    }
}

fn cmd_laws(name: &str, cfg: &ExperimentConfig, t: Option<f64>, points: usize, out: Option<&PathBuf>) -> Result<()> {
    if points < 2 {
        return Err(Error::invalid("points must be at least 2"));
    }
    let (law, lo, hi) = law_by_name(name, cfg, t)?;
    let mut table = Table::new(["t", "pdf", "cdf"]);
    for i in 0..points {
        let x = lo + (hi - lo) * i as f64 / (points - 1) as f64;
        table.push([num(x), num(law.pdf(x)), num(law.cdf(x))]);
    }
    emit(&table, out)
}

fn cmd_verify(
    suite: &str,
    cfg: &ExperimentConfig,
    json: Option<&PathBuf>,
    csv: Option<&PathBuf>,
) -> Result<i32> {
    let suites: Vec<&str> = if suite == "all" {
        experiments::CATALOG.to_vec()
    } else if experiments::CATALOG.contains(&suite) {
        vec![suite]
    } else {
        return Err(Error::invalid(format!(
            "unknown suite {suite:?}; available: all, {}",
            experiments::CATALOG.join(", ")
        )));
    };

    let mut all_reports = Vec::new();
    let mut gating_failures = Vec::new();
    for name in suites {
        let reports = experiments::run(name, cfg)?;
        for r in &reports {
            let verdict = if r.pass { "PASS" } else { "FAIL" };
            let p = r
                .p_value
                .map(|p| format!(" p={p:.3e}"))
                .unwrap_or_default();
            println!(
                "{verdict} [{name}] {} statistic={:.6}{p} n={}",
                r.name, r.statistic, r.n
            );
            if !r.pass && experiments::gating(name) {
                gating_failures.push(r.name.clone());
            }
        }
        if name == "hull-mc" {
            if let Some(path) = csv {
                experiments::slope_table(cfg)?.write(path)?;
            }
        }
        all_reports.extend(reports);
    }

    if let Some(path) = json {
        let text = serde_json::to_string_pretty(&all_reports)
            .map_err(|e| Error::invalid(format!("serialize reports: {e}")))?;
        std::fs::write(path, text)
            .map_err(|e| Error::invalid(format!("write {}: {e}", path.display())))?;
    }

    if gating_failures.is_empty() {
        Ok(0)
    } else {
        eprintln!("failing checks: {}", gating_failures.join(", "));
        Ok(1)
    }
}

fn run(cli: &Cli) -> Result<i32> {
    let cfg = build_config(cli)?;
    match &cli.cmd {
        Cmd::Sample { law, out } => {
            cmd_sample(law, &cfg, out.as_ref())?;
            Ok(0)
        }
        Cmd::Transform { input, op, u, eps, out } => {
            cmd_transform(input, op, *u, *eps, out.as_ref())?;
            Ok(0)
        }
        Cmd::Enumerate { n, a, out } => {
            cmd_enumerate(*n, *a, out.as_ref())?;
            Ok(0)
        }
        Cmd::Laws { name, t, points, out } => {
            cmd_laws(name, &cfg, *t, *points, out.as_ref())?;
            Ok(0)
        }
        Cmd::Verify { suite, json, csv } => cmd_verify(suite, &cfg, json.as_ref(), csv.as_ref()),
        Cmd::PlotData { figure, out } => {
            let table = plot::figure_table(figure, &cfg)?;
            emit(&table, out.as_ref())?;
            Ok(0)
        }
    }
}

fn main() {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(2);
        }
    }
}
