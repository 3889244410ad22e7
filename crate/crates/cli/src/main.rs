//! Batch front-end for the trace-kernel experiments.
//!
//! Exit codes: 0 = pass, 1 = acceptance threshold failed, 2 = usage error,
//! 3 = missing input file.

mod config;
mod manifest;

use anatrace::horocycle::{decay_scan, twisted_integral, HorocycleMethod, HorocycleOptions};
use anatrace::modular::{
    load_coefficients, ramanujan_tau_table, synthetic_maass_table, write_table, CoefficientTable,
    Parity, WhittakerEvaluator, WhittakerMethod,
};
use anatrace::oscillatory::TestFunction;
use anatrace::sums::{
    correlation_sum, delta_identity, exponent_scan, voronoi_check, windowed_sum,
    CorrelationBackend, VoronoiKernelChoice, VoronoiOptions,
};
use anatrace::tracefn::{
    make_bessel_family, make_exponential_family, make_highrank_family, verify_conditions,
    ConditionThresholds, TraceFamilySpec,
};
use clap::{Parser, Subcommand};
use config::Config;
use manifest::Manifest;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "anatrace", version, about = "trace-kernel experiments")]
struct Cli {
    /// Flat key=value config file (flags win; default from $ANATRACE_CONFIG)
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory for CSVs and manifests
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// Worker threads (results are bit-identical for any value)
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the condition verifier for one kernel family
    Verify {
        /// bessel | highrank:<n> | exponential
        #[arg(long)]
        family: String,
        #[arg(long, default_value_t = 64.0)]
        t: f64,
    },
    /// Batch experiments emitting CSV rows and a manifest
    Scan {
        #[command(subcommand)]
        kind: ScanKind,
    },
    /// Generate a coefficient table file
    GenTable {
        /// synthetic | delta | constant
        #[arg(long)]
        kind: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 10_000)]
        n_max: u64,
        #[arg(long, default_value_t = 20260808)]
        seed: u64,
        #[arg(long, default_value_t = 9.5337)]
        t_f: f64,
        #[arg(long, default_value = "even")]
        parity: String,
    },
}

#[derive(Subcommand)]
enum ScanKind {
    /// Exact delta-method identity over n ∈ [-10, 10]
    Delta {
        #[arg(long, default_value_t = 5.0)]
        q: f64,
    },
    /// Correlation sums S(t) over a t-grid with the exponent fit
    Correlation {
        #[arg(long)]
        table: PathBuf,
        #[arg(long, default_value = "bessel")]
        family: String,
        #[arg(long, default_value = "64,128,256,512")]
        t_grid: String,
        #[arg(long, default_value = "contour")]
        backend: String,
    },
    /// Windowed sums Z(N) at fixed t
    Windowed {
        #[arg(long)]
        table: PathBuf,
        #[arg(long, default_value = "bessel")]
        family: String,
        #[arg(long, default_value_t = 512.0)]
        t: f64,
        #[arg(long, default_value = "256,384,512")]
        n_grid: String,
    },
    /// Twisted horocycle decay over a dyadic y-grid
    Horocycle {
        #[arg(long)]
        table: PathBuf,
        #[arg(long, default_value = "bessel")]
        family: String,
        /// Denominators: y = 1/d for each entry
        #[arg(long, default_value = "64,128,256,512")]
        y_denoms: String,
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        #[arg(long, default_value_t = 2.0)]
        beta: f64,
    },
    /// Voronoi summation identity check
    Voronoi {
        #[arg(long)]
        table: PathBuf,
        #[arg(long, default_value_t = 0)]
        a: i64,
        #[arg(long, default_value_t = 1)]
        c: i64,
        #[arg(long, default_value_t = 50.0)]
        f_lo: f64,
        #[arg(long, default_value_t = 150.0)]
        f_hi: f64,
    },
    /// Whittaker dual-representation agreement scan
    Whittaker {
        #[arg(long, default_value_t = 9.5337)]
        t_f: f64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut cfg = match Config::load(cli.config.as_deref()) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: cannot read config: {e}");
            return ExitCode::from(3);
        }
    };
    if let Some(dir) = &cli.out_dir {
        cfg.set("out_dir", dir.display());
    }
    if let Some(w) = cli.workers {
        cfg.set("workers", w);
    }
    let workers = cfg.get_usize("workers", 1);
    if rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build_global()
        .is_err()
    {
        // pool already built (tests); proceed
    }
    let out_dir = PathBuf::from(cfg.get("out_dir").unwrap_or("out"));
    if let Err(e) = std::fs::create_dir_all(&out_dir) {
        eprintln!("error: cannot create output directory: {e}");
        return ExitCode::from(3);
    }

    let result = match cli.command {
        Command::Verify { family, t } => cmd_verify(&family, t, &cfg, &out_dir),
        Command::Scan { kind } => match kind {
            ScanKind::Delta { q } => cmd_delta(q, &cfg, &out_dir),
            ScanKind::Correlation {
                table,
                family,
                t_grid,
                backend,
            } => cmd_correlation(&table, &family, &t_grid, &backend, &cfg, &out_dir),
            ScanKind::Windowed {
                table,
                family,
                t,
                n_grid,
            } => cmd_windowed(&table, &family, t, &n_grid, &cfg, &out_dir),
            ScanKind::Horocycle {
                table,
                family,
                y_denoms,
                alpha,
                beta,
            } => cmd_horocycle(&table, &family, &y_denoms, alpha, beta, &cfg, &out_dir),
            ScanKind::Voronoi {
                table,
                a,
                c,
                f_lo,
                f_hi,
            } => cmd_voronoi(&table, a, c, f_lo, f_hi, &cfg, &out_dir),
            ScanKind::Whittaker { t_f } => cmd_whittaker(t_f, &cfg, &out_dir),
        },
        Command::GenTable {
            kind,
            out,
            n_max,
            seed,
            t_f,
            parity,
        } => cmd_gen_table(&kind, &out, n_max, seed, t_f, &parity),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}

fn parse_family(name: &str) -> Result<TraceFamilySpec, String> {
    if name == "bessel" {
        Ok(make_bessel_family())
    } else if name == "exponential" {
        Ok(make_exponential_family())
    } else if let Some(n) = name.strip_prefix("highrank:") {
        let n: u32 = n.parse().map_err(|_| format!("bad rank {n:?}"))?;
        make_highrank_family(n).map_err(|e| e.to_string())
    } else {
        Err(format!(
            "unknown family {name:?} (expected bessel | highrank:<n> | exponential)"
        ))
    }
}

fn load_table(path: &Path) -> Result<CoefficientTable, std::io::Error> {
    if !path.exists() {
        return Err(std::io::Error::new(
            std::io::ErrorKind::NotFound,
            format!("coefficient file {} not found", path.display()),
        ));
    }
    load_coefficients(path)
        .map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidData, e.to_string()))
}

fn parse_grid(spec: &str) -> Result<Vec<f64>, String> {
    spec.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| format!("bad grid entry {s:?}"))
        })
        .collect()
}

fn cmd_verify(
    family: &str,
    t: f64,
    cfg: &Config,
    out_dir: &Path,
) -> Result<ExitCode, Box<dyn std::error::Error>> {
    let spec = parse_family(family).map_err(usage)?;
    let mut manifest = Manifest::new(format!("verify {family} --t {t}"));
    manifest.record_config(cfg);
    let report = verify_conditions(&spec, t, &ConditionThresholds::default())?;
    let csv_path = out_dir.join(format!("condition_report_{}_t{t}.csv", slug(family)));
    let mut csv = String::from("condition,nu,margin,pass\n");
    for row in &report.rows {
        csv.push_str(&format!(
            "{},{},{},{}\n",
            row.condition, row.nu, row.margin, row.pass
        ));
    }
    std::fs::write(&csv_path, csv)?;
    manifest.record_output(&csv_path);
    for s in &report.summaries {
        println!(
            "{:10} worst_margin={:+.4e} pass={} ({})",
            s.condition, s.worst_margin, s.pass, s.grid
        );
        manifest.record(
            &format!("summary.{}", s.condition),
            format!("{}:{}", s.pass, s.worst_margin),
        );
    }
    let pass = report.all_pass();
    manifest.write(&out_dir.join(format!("manifest_verify_{}.txt", slug(family))))?;
    println!("verify {family}: {}", if pass { "PASS" } else { "FAIL" });
    Ok(if pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn cmd_delta(q: f64, cfg: &Config, out_dir: &Path) -> Result<ExitCode, Box<dyn std::error::Error>> {
    let mut manifest = Manifest::new(format!("scan delta --q {q}"));
    manifest.record_config(cfg);
    let tol = cfg.get_f64("delta_tol", 1e-12);
    let csv_path = out_dir.join("delta_scan.csv");
    let mut csv = String::from("n,q,delta,abs_err\n");
    let mut worst: f64 = 0.0;
    for n in -10..=10i64 {
        let d = delta_identity(n, q)?;
        let expected = if n == 0 { 1.0 } else { 0.0 };
        let err = (d - expected).abs();
        worst = worst.max(err);
        csv.push_str(&format!("{n},{q},{d},{err}\n"));
    }
    std::fs::write(&csv_path, csv)?;
    manifest.record_output(&csv_path);
    manifest.record("worst_abs_err", worst);
    manifest.write(&out_dir.join("manifest_delta.txt"))?;
    println!("delta identity: worst |δ - [n=0]| = {worst:.3e} (tol {tol:.0e})");
    Ok(if worst <= tol {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn cmd_correlation(
    table_path: &Path,
    family: &str,
    t_grid: &str,
    backend: &str,
    cfg: &Config,
    out_dir: &Path,
) -> Result<ExitCode, Box<dyn std::error::Error>> {
    let table = load_table(table_path)?;
    let spec = parse_family(family).map_err(usage)?;
    let backend = match backend {
        "contour" => CorrelationBackend::Contour,
        "oracle" => CorrelationBackend::SchlafliOracle,
        other => return Err(usage(format!("unknown backend {other:?}"))),
    };
    let grid = parse_grid(t_grid).map_err(usage)?;
    let window = TestFunction::normalized_bump(1.0, 2.0);
    let mut manifest = Manifest::new(format!(
        "scan correlation --family {family} --t-grid {t_grid}"
    ));
    manifest.record_config(cfg);
    let mut records = Vec::new();
    let csv_path = out_dir.join(format!("correlation_{}.csv", slug(family)));
    let mut csv =
        String::from("parameter,value_re,value_im,value_abs,trivial_bound,saving_exponent_local\n");
    let mut all_below_trivial = true;
    for &t in &grid {
        let rec = correlation_sum(&table, &spec, t, &window, backend)?;
        all_below_trivial &= rec.value.norm() < rec.trivial_bound;
        csv.push_str(&format!(
            "{},{},{},{},{},{}\n",
            rec.parameter,
            rec.value.re,
            rec.value.im,
            rec.value.norm(),
            rec.trivial_bound,
            rec.saving_exponent_local
        ));
        println!("S({t}) = {:.6e}", rec.value.norm());
        records.push(rec);
    }
    std::fs::write(&csv_path, csv)?;
    manifest.record_output(&csv_path);
    let fit = exponent_scan(&records)?;
    println!(
        "fitted slope = {:.4} ± {:.4} (95%)",
        fit.slope, fit.slope_ci95
    );
    manifest.record("slope", fit.slope);
    manifest.record("slope_ci95", fit.slope_ci95);
    manifest.write(&out_dir.join(format!("manifest_correlation_{}.txt", slug(family))))?;
    let slope_max = cfg.get_f64("slope_max", 0.95);
    Ok(if fit.slope <= slope_max && all_below_trivial {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn cmd_windowed(
    table_path: &Path,
    family: &str,
    t: f64,
    n_grid: &str,
    cfg: &Config,
    out_dir: &Path,
) -> Result<ExitCode, Box<dyn std::error::Error>> {
    let table = load_table(table_path)?;
    let spec = parse_family(family).map_err(usage)?;
    let grid = parse_grid(n_grid).map_err(usage)?;
    let window = TestFunction::normalized_bump(1.0, 2.0);
    let mut manifest = Manifest::new(format!("scan windowed --t {t} --n-grid {n_grid}"));
    manifest.record_config(cfg);
    let csv_path = out_dir.join(format!("windowed_{}_t{t}.csv", slug(family)));
    let mut csv = String::from(
        "parameter,value_re,value_im,value_abs,trivial_bound,saving_exponent_local,comparator,below_saving_threshold\n",
    );
    let comparator_factor = cfg.get_f64("windowed_comparator_factor", 10.0);
    let mut pass = true;
    for &n in &grid {
        let rec = windowed_sum(&table, &spec, t, n, &window)?;
        pass &= rec.record.value.norm() <= comparator_factor * rec.comparator;
        csv.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            rec.record.parameter,
            rec.record.value.re,
            rec.record.value.im,
            rec.record.value.norm(),
            rec.record.trivial_bound,
            rec.record.saving_exponent_local,
            rec.comparator,
            rec.below_saving_threshold
        ));
        println!(
            "Z({n}) = {:.6e}  comparator {:.3e}{}",
            rec.record.value.norm(),
            rec.comparator,
            if rec.below_saving_threshold {
                "  [below saving threshold]"
            } else {
                ""
            }
        );
    }
    std::fs::write(&csv_path, csv)?;
    manifest.record_output(&csv_path);
    manifest.write(&out_dir.join(format!("manifest_windowed_{}.txt", slug(family))))?;
    Ok(if pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn cmd_horocycle(
    table_path: &Path,
    family: &str,
    y_denoms: &str,
    alpha: f64,
    beta: f64,
    cfg: &Config,
    out_dir: &Path,
) -> Result<ExitCode, Box<dyn std::error::Error>> {
    let table = load_table(table_path)?;
    let spec = parse_family(family).map_err(usage)?;
    let denoms = parse_grid(y_denoms).map_err(usage)?;
    let y_grid: Vec<f64> = denoms.iter().map(|d| 1.0 / d).collect();
    let window = TestFunction::peak_one_bump(0.5, 2.5);
    let mut manifest = Manifest::new(format!("scan horocycle --y-denoms {y_denoms}"));
    manifest.record_config(cfg);
    let opts = HorocycleOptions::default();
    let (runs, fit) = decay_scan(&table, &spec, &y_grid, alpha, beta, &window, opts)?;
    let csv_path = out_dir.join(format!("horocycle_{}.csv", slug(family)));
    let mut csv = String::from("y,alpha,beta,value_re,value_im,value_abs,n_cut,method\n");
    for r in &runs {
        csv.push_str(&format!(
            "{},{},{},{},{},{},{},fourier_side\n",
            r.y,
            r.alpha,
            r.beta,
            r.value.re,
            r.value.im,
            r.value.norm(),
            r.n_cut
        ));
        println!("|I(y = 1/{:.0})| = {:.6e}", 1.0 / r.y, r.value.norm());
    }
    std::fs::write(&csv_path, csv)?;
    manifest.record_output(&csv_path);
    // dual-method check at the two largest heights
    let mut dual_worst: f64 = 0.0;
    for &y in y_grid.iter().take(2) {
        let f = twisted_integral(
            &table,
            &spec,
            y,
            alpha,
            beta,
            &window,
            HorocycleMethod::FourierSide,
            opts,
        )?;
        let d = twisted_integral(
            &table,
            &spec,
            y,
            alpha,
            beta,
            &window,
            HorocycleMethod::DirectXQuadrature,
            opts,
        )?;
        dual_worst = dual_worst.max((f.value - d.value).norm() / f.value.norm().max(1e-300));
    }
    println!(
        "decay slope = {:.4} ± {:.4}; dual-method agreement {:.3e}",
        fit.slope, fit.slope_ci95, dual_worst
    );
    manifest.record("decay_slope", fit.slope);
    manifest.record("dual_method_rel", dual_worst);
    manifest.write(&out_dir.join(format!("manifest_horocycle_{}.txt", slug(family))))?;
    let decay_min = cfg.get_f64("decay_min", 0.05);
    let dual_max = cfg.get_f64("dual_method_max", 1e-3);
    Ok(if fit.slope >= decay_min && dual_worst <= dual_max {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn cmd_voronoi(
    table_path: &Path,
    a: i64,
    c: i64,
    f_lo: f64,
    f_hi: f64,
    cfg: &Config,
    out_dir: &Path,
) -> Result<ExitCode, Box<dyn std::error::Error>> {
    let table = load_table(table_path)?;
    let kernels = VoronoiKernelChoice::for_table(&table)?;
    let window = TestFunction::peak_one_bump(f_lo, f_hi);
    let mut manifest = Manifest::new(format!("scan voronoi --a {a} --c {c}"));
    manifest.record_config(cfg);
    let report = voronoi_check(&table, a, c, &window, kernels, VoronoiOptions::default())?;
    let csv_path = out_dir.join(format!("voronoi_a{a}_c{c}.csv"));
    let csv = format!(
        "a,c,lhs_re,lhs_im,rhs_re,rhs_im,rhs_truncation,rel_error\n{},{},{},{},{},{},{},{}\n",
        a,
        c,
        report.lhs.re,
        report.lhs.im,
        report.rhs.re,
        report.rhs.im,
        report.rhs_truncation,
        report.rel_error
    );
    std::fs::write(&csv_path, csv)?;
    manifest.record_output(&csv_path);
    manifest.record("rel_error", report.rel_error);
    manifest.write(&out_dir.join(format!("manifest_voronoi_a{a}_c{c}.txt")))?;
    println!(
        "voronoi (a={a}, c={c}): lhs {:.6e}, rhs {:.6e}, rel_error {:.3e} ({} dual terms)",
        report.lhs.norm(),
        report.rhs.norm(),
        report.rel_error,
        report.rhs_truncation
    );
    let tol = cfg.get_f64("voronoi_rel_max", 1e-2);
    Ok(if report.rel_error <= tol {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn cmd_whittaker(
    t_f: f64,
    cfg: &Config,
    out_dir: &Path,
) -> Result<ExitCode, Box<dyn std::error::Error>> {
    let mut manifest = Manifest::new(format!("scan whittaker --t-f {t_f}"));
    manifest.record_config(cfg);
    let int_rep = WhittakerEvaluator::new(t_f, WhittakerMethod::IntegralRepresentation);
    let bes = WhittakerEvaluator::new(t_f, WhittakerMethod::BesselRelation);
    // grid in the representation's conditioned domain
    let y_lo = if t_f > 2.0 { 14.0 } else { 0.5 };
    let csv_path = out_dir.join("whittaker_dual.csv");
    let mut csv = String::from("y,t_f,integral_rep,bessel_rel,rel_dev\n");
    let mut worst: f64 = 0.0;
    for i in 0..50 {
        let y = y_lo + (30.0 - y_lo) * i as f64 / 49.0;
        let a = int_rep.eval(y)?.value;
        let b = bes.eval(y)?.value;
        let rel = (a - b).abs() / b.abs().max(1e-300);
        worst = worst.max(rel);
        csv.push_str(&format!("{y},{t_f},{a},{b},{rel}\n"));
    }
    std::fs::write(&csv_path, csv)?;
    manifest.record_output(&csv_path);
    manifest.record("worst_rel_dev", worst);
    manifest.write(&out_dir.join("manifest_whittaker.txt"))?;
    println!("whittaker dual agreement: worst rel dev {worst:.3e} over 50 points");
    let tol = cfg.get_f64("whittaker_rel_max", 1e-8);
    Ok(if worst <= tol {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn cmd_gen_table(
    kind: &str,
    out: &Path,
    n_max: u64,
    seed: u64,
    t_f: f64,
    parity: &str,
) -> Result<ExitCode, Box<dyn std::error::Error>> {
    let parity = match parity {
        "even" => Parity::Even,
        "odd" => Parity::Odd,
        other => return Err(usage(format!("parity must be even|odd, got {other:?}"))),
    };
    let table = match kind {
        "synthetic" => synthetic_maass_table(seed, n_max, t_f, parity),
        "delta" => ramanujan_tau_table(n_max),
        "constant" => {
            let lambda = vec![1.0; n_max as usize];
            CoefficientTable::from_lambda(
                anatrace::modular::FormKind::Maass { t_f },
                parity,
                "constant mock",
                lambda,
            )?
        }
        other => return Err(usage(format!("unknown table kind {other:?}"))),
    };
    if let Some(dir) = out.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)?;
        }
    }
    write_table(&table, out)?;
    println!(
        "wrote {} ({} coefficients, ρ₁ = {:.6})",
        out.display(),
        table.n_max(),
        table.rho1
    );
    Ok(ExitCode::SUCCESS)
}

fn slug(s: &str) -> String {
    s.replace(':', "_")
}

fn usage(msg: impl std::fmt::Display) -> Box<dyn std::error::Error> {
    // clap reserves exit code 2 for flag errors; semantic usage errors
    // surface the same way
    eprintln!("usage error: {msg}");
    std::process::exit(2);
}
