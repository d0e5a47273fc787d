use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use cvsim::criteria::{
    analyze_cut, classify_tripartite, duan, Bipartition, ClassConvention, CutReport,
    TripartiteClass,
};
use cvsim::interface::{run_steps, GeometryFile};
use cvsim::protocols::{
    bipartite_thermal, cluster_sweep, erase_entanglement, smolin_generate, smolin_trajectory,
    smolin_unlock, tied_kappa, tied_probe, unlock_point, unlock_sweep, ClusterShape, SmolinParams,
    Steps, SweepResult, ThermalParams,
};
use cvsim::{Error, GaussianState};

#[derive(Parser)]
#[command(
    name = "cvsim",
    version,
    about = "Gaussian light-atom interface simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Entangle two thermal ensembles with one or two measured beams.
    Bipartite(BipartiteArgs),
    /// Remove the entanglement of a stored two-ensemble state.
    Erase(EraseArgs),
    /// Classify three-ensemble cluster states over a (kappa, T) grid.
    Cluster(ClusterArgs),
    /// Generate the four-mode bound-entangled state, optionally unlocking it.
    Smolin(SmolinArgs),
    /// PPT and negativity across the given cuts of a stored state.
    Criteria(CriteriaArgs),
    /// Apply the beams of a geometry file to a state.
    Run(RunArgs),
    /// Inspect or validate a state file.
    State {
        #[command(subcommand)]
        action: StateAction,
    },
}

#[derive(Args)]
struct BipartiteArgs {
    #[arg(long)]
    n1: f64,
    #[arg(long)]
    n2: f64,
    #[arg(long)]
    kappa: f64,
    #[arg(long, default_value = "one")]
    steps: Steps,
    /// Homodyne outcomes, one per beam; missing outcomes are zero.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    outcomes: Vec<f64>,
    /// Weight of the variance test.
    #[arg(long, default_value_t = 1.0)]
    lambda: f64,
    /// Also run the erasure beam on the result.
    #[arg(long)]
    erase: bool,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    erase_outcome: f64,
    /// Directory for state files.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EraseArgs {
    #[arg(long)]
    state: PathBuf,
    #[arg(long)]
    n1: f64,
    #[arg(long)]
    n2: f64,
    #[arg(long)]
    kappa: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    outcome: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Shape {
    Linear,
    Triangular,
}

#[derive(Clone, Copy, ValueEnum)]
enum Convention {
    Standard,
    Alternate,
}

#[derive(Args)]
struct ClusterArgs {
    #[arg(long, value_enum)]
    shape: Shape,
    /// start,stop,count
    #[arg(long, value_parser = parse_grid)]
    kappa_grid: Grid,
    /// start,stop,count
    #[arg(long = "T-grid", value_parser = parse_grid)]
    t_grid: Grid,
    #[arg(long, default_value_t = 1.0)]
    omega: f64,
    #[arg(long, value_enum, default_value = "standard")]
    convention: Convention,
    /// CSV destination; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SmolinArgs {
    #[arg(long, allow_hyphen_values = true)]
    r: Option<f64>,
    /// Coupling, or `auto` to tie it to the squeezing.
    #[arg(long, default_value = "auto")]
    kappa: Auto,
    #[arg(long, default_value_t = 1.0)]
    var_p: f64,
    /// Probe x variance, or `auto`.
    #[arg(long, default_value = "auto")]
    var_x_probe: Auto,
    #[arg(long)]
    unlock: bool,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    x_plus: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    p_minus: f64,
    /// Sweep tied parameters over an r grid and a var_p grid instead.
    #[arg(long)]
    sweep: bool,
    #[arg(long, value_parser = parse_grid, default_value = "0.1,1.5,15")]
    r_grid: Grid,
    #[arg(long, value_parser = parse_grid, default_value = "0.5,4,8")]
    var_p_grid: Grid,
    /// Sample one measurement trajectory with this seed.
    #[arg(long)]
    seed: Option<u64>,
    /// File for the state or the sweep CSV.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CriteriaArgs {
    #[arg(long)]
    state: PathBuf,
    /// Cuts such as `12|34`, separated by `;`.
    #[arg(long, value_delimiter = ';')]
    cuts: Vec<String>,
    /// Duan test on a two-mode state with this weight.
    #[arg(long)]
    lambda: Option<f64>,
    /// Tripartite classification of a three-mode state.
    #[arg(long)]
    classify: bool,
}

#[derive(Args)]
struct RunArgs {
    /// Initial state; vacuum ensembles when absent.
    #[arg(long)]
    state: Option<PathBuf>,
    #[arg(long, required_unless_present = "state")]
    ensembles: Option<usize>,
    #[arg(long)]
    geometry: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum StateAction {
    /// Print modes, symplectic spectrum and physicality margin.
    Inspect { file: PathBuf },
    /// Exit 0 if the file holds a physical state.
    Validate { file: PathBuf },
}

#[derive(Clone, Copy, Debug)]
struct Grid {
    start: f64,
    stop: f64,
    count: usize,
}

impl Grid {
    fn values(self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        (0..self.count)
            .map(|i| self.start + (self.stop - self.start) * i as f64 / (self.count - 1) as f64)
            .collect()
    }
}

fn parse_grid(s: &str) -> Result<Grid, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let [a, b, n] = parts.as_slice() else {
        return Err(format!("expected start,stop,count, got `{s}`"));
    };
    let start = a.parse::<f64>().map_err(|e| e.to_string())?;
    let stop = b.parse::<f64>().map_err(|e| e.to_string())?;
    let count = n.parse::<usize>().map_err(|e| e.to_string())?;
    if count == 0 || !start.is_finite() || !stop.is_finite() {
        return Err(format!("bad grid `{s}`"));
    }
    Ok(Grid { start, stop, count })
}

#[derive(Clone, Copy, Debug)]
enum Auto {
    Auto,
    Value(f64),
}

impl std::str::FromStr for Auto {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s.eq_ignore_ascii_case("auto") {
            Ok(Auto::Auto)
        } else {
            s.parse::<f64>().map(Auto::Value).map_err(|e| e.to_string())
        }
    }
}

fn cut_json(c: &CutReport) -> Value {
    json!({
        "cut": c.cut,
        "ppt": c.ppt,
        "min_symplectic_eig": c.min_symplectic_eig,
        "margin": c.margin,
        "log_negativity": c.log_negativity,
        "negativity": c.negativity,
    })
}

fn print_json(v: &Value) -> cvsim::Result<()> {
    println!("{}", serde_json::to_string_pretty(v)?);
    Ok(())
}

fn save_into(dir: &Path, name: &str, state: &GaussianState) -> cvsim::Result<()> {
    std::fs::create_dir_all(dir)?;
    state.save(&dir.join(name))
}

fn max_abs_diff(a: &GaussianState, b: &GaussianState) -> f64 {
    a.cm()
        .iter()
        .zip(b.cm().iter())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn bipartite(a: &BipartiteArgs) -> cvsim::Result<()> {
    let params = ThermalParams::new(vec![a.n1, a.n2])?;
    let res = bipartite_thermal(&params, a.kappa, a.steps, &a.outcomes)?;
    let d = duan(&res.state, a.lambda)?;
    let mut summary = json!({
        "n1": a.n1,
        "n2": a.n2,
        "kappa": a.kappa,
        "steps": if a.steps == Steps::One { "one" } else { "two" },
        "cut": cut_json(&res.verdict.cuts[0]),
        "duan": { "lambda": a.lambda, "var_u": d.var_u, "var_v": d.var_v, "bound": d.bound, "margin": d.margin, "violated": d.violated() },
    });
    if let Some(dir) = &a.out {
        save_into(dir, "state.json", &res.state)?;
    }
    if a.erase {
        let erased = erase_entanglement(&res.state, a.n1, a.n2, a.kappa, a.erase_outcome)?;
        let cut = analyze_cut(&erased, &Bipartition::new(&[0], 2)?)?;
        let initial = params.state()?;
        let restored = max_abs_diff(&erased, &initial) <= 1e-9;
        summary["erased"] = json!({ "cut": cut_json(&cut), "restored": restored });
        if let Some(dir) = &a.out {
            save_into(dir, "erased.json", &erased)?;
        }
    }
    if let Some(dir) = &a.out {
        std::fs::write(
            dir.join("verdict.json"),
            serde_json::to_string_pretty(&summary)? + "\n",
        )?;
    }
    print_json(&summary)
}

fn erase(a: &EraseArgs) -> cvsim::Result<()> {
    let state = GaussianState::load(&a.state)?;
    let erased = erase_entanglement(&state, a.n1, a.n2, a.kappa, a.outcome)?;
    let cut = analyze_cut(&erased, &Bipartition::new(&[0], 2)?)?;
    let restored = max_abs_diff(&erased, &GaussianState::thermal(&[a.n1, a.n2])?) <= 1e-9;
    if let Some(out) = &a.out {
        erased.save(out)?;
    }
    print_json(&json!({ "cut": cut_json(&cut), "restored": restored }))
}

fn cluster(a: &ClusterArgs) -> cvsim::Result<()> {
    let shape = match a.shape {
        Shape::Linear => ClusterShape::Linear,
        Shape::Triangular => ClusterShape::Triangular,
    };
    let convention = match a.convention {
        Convention::Standard => ClassConvention::Standard,
        Convention::Alternate => ClassConvention::Alternate,
    };
    let rows = cluster_sweep(shape, &a.kappa_grid.values(), &a.t_grid.values(), a.omega)?;
    let undecided = rows
        .iter()
        .filter(|r| r.class == TripartiteClass::Undecided)
        .count();
    if undecided > 0 {
        eprintln!("warning: {undecided} points left undecided (class 0)");
    }
    let table = SweepResult::cluster(&rows, convention);
    match &a.out {
        Some(path) => table.write_csv(path),
        None => {
            print!("{}", table.to_csv());
            Ok(())
        }
    }
}

fn smolin(a: &SmolinArgs) -> cvsim::Result<()> {
    if a.sweep {
        let rows = unlock_sweep(&a.r_grid.values(), &a.var_p_grid.values())?;
        let table = SweepResult::unlock(&rows);
        return match &a.out {
            Some(path) => table.write_csv(path),
            None => {
                print!("{}", table.to_csv());
                Ok(())
            }
        };
    }
    let r = a
        .r
        .ok_or_else(|| Error::InvalidParameter("--r is required unless --sweep is given".into()))?;
    let kappa = match a.kappa {
        Auto::Auto => tied_kappa(r),
        Auto::Value(k) => k,
    };
    let probe = match a.var_x_probe {
        Auto::Auto => tied_probe(r),
        Auto::Value(v) => v,
    };
    let params = SmolinParams::new(r, kappa, a.var_p, probe)?;
    let (state, p_bar) = match a.seed {
        Some(seed) => {
            let t = smolin_trajectory(&params, seed)?;
            (t.state, Some(t.p_bar))
        }
        None => (smolin_generate(&params)?, None),
    };
    let cuts: Vec<Value> = [
        "12|34", "13|24", "14|23", "1|234", "2|134", "3|124", "4|123",
    ]
    .iter()
    .map(|c| Ok(cut_json(&analyze_cut(&state, &Bipartition::parse(c, 4)?)?)))
    .collect::<cvsim::Result<_>>()?;
    let mut summary = json!({
        "r": r,
        "kappa": kappa,
        "var_p": a.var_p,
        "var_x_probe": probe,
        "f": params.f(),
        "cuts": cuts,
    });
    if let Some(pb) = p_bar {
        summary["seed"] = json!(a.seed);
        summary["p_bar"] = json!(pb);
    }
    if a.unlock {
        let u = smolin_unlock(&state, &params, a.x_plus, a.p_minus)?;
        let row = unlock_point(&params)?;
        summary["unlock"] = json!({
            "delta": u.delta,
            "gain": u.gain,
            "cut": cut_json(&u.cut),
            "logneg_unlocked": u.cut.log_negativity,
            "logneg_epr": row.logneg_epr,
            "ratio": row.ratio,
            "negativity_unlocked": u.cut.negativity,
            "negativity_epr": row.negativity_epr,
            "negativity_ratio": row.negativity_ratio,
            "admissible": row.admissible,
            "known_displacement": u.known_displacement(a.x_plus, a.p_minus),
        });
    }
    if let Some(out) = &a.out {
        state.save(out)?;
    }
    print_json(&summary)
}

fn criteria(a: &CriteriaArgs) -> cvsim::Result<()> {
    let state = GaussianState::load(&a.state)?;
    let n = state.n_modes();
    let cuts = if a.cuts.is_empty() {
        Bipartition::one_vs_rest(n)?
    } else {
        a.cuts
            .iter()
            .map(|c| Bipartition::parse(c, n))
            .collect::<cvsim::Result<_>>()?
    };
    let reports: Vec<Value> = cuts
        .iter()
        .map(|c| Ok(cut_json(&analyze_cut(&state, c)?)))
        .collect::<cvsim::Result<_>>()?;
    let mut summary = json!({ "modes": n, "cuts": reports });
    if let Some(lambda) = a.lambda {
        let d = duan(&state, lambda)?;
        summary["duan"] = json!({ "lambda": lambda, "var_u": d.var_u, "var_v": d.var_v, "bound": d.bound, "margin": d.margin, "violated": d.violated() });
    }
    if a.classify {
        let t = classify_tripartite(&state)?;
        if t.class == TripartiteClass::Undecided {
            eprintln!("warning: separability undecided (class 0)");
        }
        summary["tripartite"] = json!({
            "pattern": t.pattern,
            "class": t.class,
            "class_standard": t.class_standard,
            "class_alternate": t.class_alternate,
            "separability": t.separability,
        });
    }
    print_json(&summary)
}

fn run(a: &RunArgs) -> cvsim::Result<()> {
    let state = match (&a.state, a.ensembles) {
        (Some(p), _) => GaussianState::load(p)?,
        (None, Some(n)) => GaussianState::vacuum(n),
        (None, None) => {
            return Err(Error::InvalidParameter(
                "--state or --ensembles is required".into(),
            ))
        }
    };
    let geometry = GeometryFile::from_json(&std::fs::read_to_string(&a.geometry)?)?;
    let out = run_steps(&state, &geometry.steps()?)?;
    match &a.out {
        Some(path) => out.save(path),
        None => {
            println!("{}", out.to_json()?);
            Ok(())
        }
    }
}

fn state_action(a: &StateAction) -> cvsim::Result<()> {
    match a {
        StateAction::Inspect { file } => {
            let s = GaussianState::load(file)?;
            print_json(&json!({
                "modes": s.n_modes(),
                "labels": s.labels(),
                "hbar": s.hbar(),
                "symplectic_eigenvalues": s.symplectic_eigenvalues()?,
                "physicality_margin": s.physicality_margin(),
            }))
        }
        StateAction::Validate { file } => {
            let s = GaussianState::load(file)?;
            println!(
                "ok: {} modes, physicality margin {:e}",
                s.n_modes(),
                s.physicality_margin()
            );
            Ok(())
        }
    }
}

fn configure_threads() {
    if let Some(n) = std::env::var("CVSIM_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
    {
        if n > 0 {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global();
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::NoConvergence { .. } => 4,
        e if e.is_physics_violation() => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_threads();
    let result = match &cli.command {
        Command::Bipartite(a) => bipartite(a),
        Command::Erase(a) => erase(a),
        Command::Cluster(a) => cluster(a),
        Command::Smolin(a) => smolin(a),
        Command::Criteria(a) => criteria(a),
        Command::Run(a) => run(a),
        Command::State { action } => state_action(action),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
