use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use hexcover::cli_bench::{
    parse_config, read_plan_csv, run_bench, tour_svg, write_plan_csv, write_tour_csv, ExperimentConfig,
};
use hexcover::planners::{disk_cover_with, hex_cover_with, plan_report, spacing_radius, PlanOptions};
use hexcover::tsp::{ChristofidesOptions, MatchingMode};
use hexcover::verification::{check_feasibility, counterexample_check, monte_carlo_mse};
use hexcover::{Environment, Error, FieldParams, PlanningQuery};

#[derive(Parser)]
#[command(name = "hexcover", version, about = "Measurement placement and tours with a kriging error guarantee")]
struct Cli {
    /// More log output (-v info, -vv debug). RUST_LOG overrides.
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Place measurements and write plan.csv (x,y,tag).
    Plan(PlanArgs),
    /// Place measurements, order them into a tour, write tour.csv and tour.svg.
    Tour(TourArgs),
    /// Run the area x tolerance x algorithm sweep.
    Bench(BenchArgs),
    /// Reproduce the four-sample counterexample to the earlier radius bound.
    Counterexample(JsonFlag),
    /// Check an existing plan CSV against the tolerance.
    Verify(VerifyArgs),
}

#[derive(Args, Clone)]
struct JsonFlag {
    /// Print a machine-readable JSON report instead of text.
    #[arg(long)]
    json: bool,
}

#[derive(Args, Clone)]
struct Problem {
    /// Rectangle as WIDTHxHEIGHT in metres, lower-left corner at the origin.
    #[arg(long, value_parser = parse_rect)]
    rect: (f64, f64),
    /// Prior standard deviation of the field.
    #[arg(long, default_value_t = 12.87)]
    sigma0: f64,
    /// Covariance length scale in metres.
    #[arg(long, default_value_t = 8.33)]
    length_scale: f64,
    /// Observation noise variance.
    #[arg(long, default_value_t = 0.0361)]
    noise_var: f64,
    /// Error tolerance as a fraction of sigma0^2.
    #[arg(long)]
    delta_frac: f64,
    /// Verification grid step in metres [default: spacing / 20].
    #[arg(long)]
    grid_step: Option<f64>,
    #[arg(long, default_value = ".")]
    output_dir: PathBuf,
    #[command(flatten)]
    json: JsonFlag,
}

#[derive(Clone, Copy, ValueEnum)]
enum Planner {
    Hexcover,
    Diskcover,
}

#[derive(Args)]
struct PlanArgs {
    #[command(flatten)]
    problem: Problem,
    #[arg(long, value_enum, default_value = "hexcover")]
    algorithm: Planner,
}

#[derive(Args)]
struct TourArgs {
    #[command(flatten)]
    problem: Problem,
    #[arg(long, value_enum, default_value = "hexcover")]
    algorithm: Planner,
    /// Odd-vertex matching in Christofides.
    #[arg(long, default_value = "exact")]
    matching: MatchingMode,
    /// Above this many odd vertices exact matching falls back to greedy.
    #[arg(long, default_value_t = 5000)]
    greedy_threshold: usize,
    /// Skip 2-opt and keep the raw Christofides tour.
    #[arg(long)]
    no_two_opt: bool,
}

#[derive(Args)]
struct BenchArgs {
    /// JSON sweep description; defaults are used when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    output_dir: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    matching: Option<MatchingMode>,
    #[arg(long)]
    grid_step: Option<f64>,
    #[command(flatten)]
    json: JsonFlag,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    problem: Problem,
    /// Plan CSV with header x,y,tag.
    #[arg(long)]
    plan: PathBuf,
    /// Monte Carlo trials at the worst grid point (0 to skip).
    #[arg(long, default_value_t = 0)]
    mc_trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn parse_rect(s: &str) -> Result<(f64, f64), String> {
    let (w, h) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected WIDTHxHEIGHT, got '{s}'"))?;
    let num = |v: &str| {
        v.trim()
            .parse::<f64>()
            .ok()
            .filter(|x| *x > 0.0 && x.is_finite())
            .ok_or_else(|| format!("'{v}' is not a positive length"))
    };
    Ok((num(w)?, num(h)?))
}

enum Failure {
    Verification(String),
    Infeasible(String),
    Input(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InfeasibleTolerance { .. } => Failure::Infeasible(e.to_string()),
            Error::Domain(_) | Error::InvalidEnvironment(_) | Error::Config(_) => Failure::Input(e.to_string()),
            _ => Failure::Verification(e.to_string()),
        }
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Verification(_) => 1,
            Failure::Infeasible(_) => 2,
            Failure::Input(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Verification(m) | Failure::Infeasible(m) | Failure::Input(m) => m,
        }
    }
}

type CmdResult = Result<(), Failure>;

struct Setup {
    env: Environment,
    params: FieldParams,
    query: PlanningQuery,
}

impl Problem {
    fn setup(&self) -> Result<Setup, Failure> {
        let params = FieldParams::new(self.sigma0 * self.sigma0, self.length_scale, self.noise_var)?;
        let query = PlanningQuery::from_fraction(params, self.delta_frac)?;
        let env = Environment::rect(self.rect.0, self.rect.1)?;
        if let Some(step) = self.grid_step {
            if !(step > 0.0 && step.is_finite()) {
                return Err(Failure::Input(format!("--grid-step must be positive, got {step}")));
            }
        }
        std::fs::create_dir_all(&self.output_dir).map_err(|e| Failure::Verification(e.to_string()))?;
        Ok(Setup { env, params, query })
    }
}

fn print_json<T: Serialize>(value: &T) {
    println!("{}", serde_json::to_string_pretty(value).expect("report serializes"));
}

fn cmd_plan(args: &PlanArgs) -> CmdResult {
    let p = &args.problem;
    let Setup { env, params, query } = p.setup()?;
    let opts = PlanOptions {
        grid_step: p.grid_step,
        ..PlanOptions::default()
    };
    let samples = match args.algorithm {
        Planner::Hexcover => hex_cover_with(&env, &params, query.delta, &opts)?,
        Planner::Diskcover => disk_cover_with(&env, &params, query.delta, &opts)?,
    };
    let path = p.output_dir.join("plan.csv");
    write_plan_csv(&path, &samples)?;
    let report = plan_report(&env, &params, query.delta, samples, &opts, false)?;
    if p.json.json {
        print_json(&report);
    } else {
        let f = &report.feasibility;
        let b = &report.diagnostics;
        println!("plan written to {}", path.display());
        println!("samples          {}", report.samples.len());
        println!("r_min            {:.6} m", query.r_min);
        println!("r_max            {:.6} m", query.r_max);
        println!("sample bounds    lower {:.3} (count {}), upper {:.3}", b.sample_lower_bound, b.sample_lower_count(), b.sample_upper_bound);
        println!("sample ratio     {:.3} (guarantee {:.3})", b.realized_sample_ratio, b.alpha_samples);
        println!("feasible         {} (worst error {:.6} <= {:.6} at ({:.3}, {:.3}), {} grid points)",
            f.feasible, f.worst_error, query.delta, f.worst_point.x, f.worst_point.y, f.points_checked);
    }
    if !report.feasibility.feasible {
        return Err(Failure::Verification("plan failed its feasibility check".into()));
    }
    Ok(())
}

fn cmd_tour(args: &TourArgs) -> CmdResult {
    let p = &args.problem;
    let Setup { env, params, query } = p.setup()?;
    let opts = PlanOptions {
        grid_step: p.grid_step,
        christofides: ChristofidesOptions {
            matching: args.matching,
            greedy_threshold: args.greedy_threshold,
        },
        two_opt: !args.no_two_opt,
    };
    let samples = match args.algorithm {
        Planner::Hexcover => hex_cover_with(&env, &params, query.delta, &opts)?,
        Planner::Diskcover => disk_cover_with(&env, &params, query.delta, &opts)?,
    };
    let report = plan_report(&env, &params, query.delta, samples, &opts, true)?;
    let tour = report.tour.as_ref().expect("tour requested");
    let csv_path = p.output_dir.join("tour.csv");
    let svg_path = p.output_dir.join("tour.svg");
    write_tour_csv(&csv_path, tour, &report.samples.points)?;
    std::fs::write(&svg_path, tour_svg(&env, &report.samples, tour, spacing_radius(&query)))
        .map_err(|e| Failure::Verification(e.to_string()))?;
    if p.json.json {
        print_json(&report);
    } else {
        let b = &report.diagnostics;
        println!("tour written to {} and {}", csv_path.display(), svg_path.display());
        println!("samples          {}", report.samples.len());
        println!("tour length      {:.6} m", tour.length);
        println!("raw christofides {:.6} m ({} matching)", report.raw_tour_length.unwrap_or(0.0),
            report.matching_used.map(|m| m.to_string()).unwrap_or_default());
        println!("tour bounds      lower {:.3} m, upper {:.3} m", b.tour_lower_bound, b.tour_upper_bound);
        println!("tour ratio       {:.3} (guarantee {:.3})", b.realized_tour_ratio.unwrap_or(0.0), b.alpha_tour);
        println!("feasible         {}", report.feasibility.feasible);
    }
    if !report.feasibility.feasible {
        return Err(Failure::Verification("plan failed its feasibility check".into()));
    }
    Ok(())
}

fn cmd_bench(args: &BenchArgs) -> CmdResult {
    let mut config = match &args.config {
        Some(path) => parse_config(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(dir) = &args.output_dir {
        config.output_dir = dir.clone();
    }
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(m) = args.matching {
        config.matching = m;
    }
    if args.grid_step.is_some() {
        config.grid_step = args.grid_step;
    }
    let rows = run_bench(&config)?;
    if args.json.json {
        print_json(&rows);
    } else {
        println!("{} rows written to {}", rows.len(), config.output_dir.join("results.csv").display());
        println!("{:<14} {:>10} {:>6} {:>8} {:>12} {:>10}", "algorithm", "area_m2", "frac", "samples", "tour_m", "ms");
        for r in &rows {
            println!(
                "{:<14} {:>10.1} {:>6} {:>8} {:>12} {:>10.1}",
                r.algorithm.name(),
                r.area_m2,
                r.delta_fraction,
                r.n_samples,
                r.tour_length_m.map(|l| format!("{l:.1}")).unwrap_or_else(|| "-".into()),
                r.runtime_ms
            );
        }
    }
    Ok(())
}

fn cmd_counterexample(args: &JsonFlag) -> CmdResult {
    let r = counterexample_check();
    if args.json {
        print_json(&r);
    } else {
        println!("claimed radius (rhs)  {:.8}", r.rhs_bound);
        println!("sample distance       {:.8}", r.r_used);
        println!("estimation error      {:.6}", r.error_value);
        println!("tolerance             {}", r.delta);
        println!("contradiction         {}", r.contradiction);
    }
    if r.contradiction {
        Ok(())
    } else {
        Err(Failure::Verification("counterexample did not produce a contradiction".into()))
    }
}

fn cmd_verify(args: &VerifyArgs) -> CmdResult {
    #[derive(Serialize)]
    struct VerifyReport {
        samples: usize,
        all_inside: bool,
        feasibility: hexcover::verification::FeasibilityResult,
        monte_carlo: Option<hexcover::verification::MonteCarloEstimate>,
    }
    let p = &args.problem;
    let Setup { env, params, query } = p.setup()?;
    let r = spacing_radius(&query);
    let set = read_plan_csv(&args.plan, r)?;
    let all_inside = set.points.iter().all(|&q| env.contains(q));
    let step = p.grid_step.unwrap_or(r / 20.0);
    let feasibility = check_feasibility(&env, &set.points, &params, query.delta, step)?;
    let monte_carlo = if args.mc_trials > 0 {
        let x = feasibility.worst_point;
        let mut local: Vec<_> = set.points.iter().copied().filter(|&s| hexcover::geometry::distance(s, x) <= query.r_max).collect();
        local.sort_by(|a, b| hexcover::geometry::distance(*a, x).total_cmp(&hexcover::geometry::distance(*b, x)));
        local.truncate(hexcover::verification::MONTE_CARLO_MAX_SAMPLES);
        Some(monte_carlo_mse(x, &local, &params, args.mc_trials, args.seed)?)
    } else {
        None
    };
    let report = VerifyReport {
        samples: set.len(),
        all_inside,
        feasibility,
        monte_carlo,
    };
    if p.json.json {
        print_json(&report);
    } else {
        let f = &report.feasibility;
        println!("samples          {}", report.samples);
        println!("all inside       {}", all_inside);
        println!("worst error      {:.6} at ({:.3}, {:.3})", f.worst_error, f.worst_point.x, f.worst_point.y);
        println!("tolerance        {:.6}", query.delta);
        println!("grid points      {} (step {})", f.points_checked, f.grid_step);
        if let Some(mc) = &report.monte_carlo {
            println!("monte carlo mse  {:.6} +- {:.6} ({} trials, seed {})", mc.empirical_mse, mc.standard_error, mc.trials, mc.seed);
        }
        println!("feasible         {}", f.feasible && all_inside);
    }
    if !all_inside {
        return Err(Failure::Verification("plan has points outside the environment".into()));
    }
    if !report.feasibility.feasible {
        return Err(Failure::Verification("plan exceeds the tolerance".into()));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(3) } else { ExitCode::SUCCESS };
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    let result = match &cli.command {
        Command::Plan(a) => cmd_plan(a),
        Command::Tour(a) => cmd_tour(a),
        Command::Bench(a) => cmd_bench(a),
        Command::Counterexample(a) => cmd_counterexample(a),
        Command::Verify(a) => cmd_verify(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
