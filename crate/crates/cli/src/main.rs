//! `modelset` command-line front end.
//!
//! Exit codes: 0 success, 2 usage or parameter error, 3 verification
//! failure, 4 resource limit.

use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use modelset::correlations::{
    correlation_measure, correlations_equal, freq_empirical, freq_exact, Pattern,
};
use modelset::homometry::{pattern_table, rigid_equivalent, tables_equal, thinned_model_set};
use modelset::io::{dot_rows_svg, read_deck, write_deck, write_pointset};
use modelset::pointsets::{generate, PointSet, Region};
use modelset::reconstruct::{
    report_from_deck, self_test, ReconstructionOptions, DEFAULT_MIN_KNOWN,
};
use modelset::schemes::{
    parse_real, parse_window, QuadInt, Real, ResidueSet, Scheme, SchemeKind, Window,
};
use modelset::spectra::{
    deck_functions_with, diffraction, full_period, sample_indicator, DiffractionOptions,
};
use modelset::{Error, Result};

const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser)]
#[command(
    name = "modelset",
    version,
    about = "Cut-and-project model sets: point sets, correlations, diffraction, homometry and window recovery"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the points of a model set in a region.
    ///
    /// Reproduces the Fibonacci fragment with window [-1,1/tau) and, with
    /// `--thin A --thin B --svg`, its thinned versions drawn above and below.
    Generate(GenerateArgs),
    /// Exact and empirical n-point correlations.
    ///
    /// Reproduces the equality of 2- and 3-point correlations of the
    /// Fibonacci set thinned by A and by B (`--compare`).
    Correlate(CorrelateArgs),
    /// Bragg peak intensities as CSV, optionally a stick-plot SVG.
    ///
    /// Reproduces the periodic diffraction of A over one full cycle, with
    /// extinctions at every even b other than 0 and 32.
    Diffract(DiffractArgs),
    /// Recover a window from its 2- and 3-point deck data.
    ///
    /// Reproduces window recovery end to end: a sampled window is recovered,
    /// up to translation, from its deck data alone.
    Reconstruct(ReconstructArgs),
    /// Homometry checks for residue sets mod 32.
    ///
    /// Reproduces the cyclotomic pair A, B: equal 2- and 3-point tables,
    /// different 4-point tables, no rigid motion between them.
    Homometry(HomometryArgs),
}

#[derive(Args)]
struct SchemeWindow {
    /// `fibonacci`, `periodic:N` or `combined:N`.
    #[arg(long)]
    scheme: Scheme,
    /// Window literal, e.g. `[-1,1/tau)`, `fib`, `{A}`, `fib x {B}`.
    #[arg(long)]
    window: String,
}

impl SchemeWindow {
    fn parse(&self) -> Result<(Scheme, Window)> {
        Ok((self.scheme, self.scheme.parse_window(&self.window)?))
    }
}

#[derive(Args)]
struct GenerateArgs {
    #[command(flatten)]
    sw: SchemeWindow,
    /// Physical interval; defaults to [0, N-1] for periodic schemes.
    #[arg(long, num_args = 2, value_names = ["LO", "HI"], allow_negative_numbers = true)]
    region: Option<Vec<f64>>,
    /// Point-set file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Dot-row plot of the points.
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Residue set mod 32 (A, B or `{...}`) thinning a Fibonacci window by
    /// `u mod 32`; repeatable. The first row is drawn above the full set.
    #[arg(long)]
    thin: Vec<String>,
}

#[derive(Args)]
struct CorrelateArgs {
    #[command(flatten)]
    sw: SchemeWindow,
    #[arg(long, default_value_t = 2)]
    order: usize,
    /// Largest physical size of a tuple entry.
    #[arg(long, default_value_t = 5.0)]
    cutoff: f64,
    /// Also count on a patch with averaging interval of this length.
    #[arg(long, value_name = "R")]
    empirical: Option<f64>,
    /// A single pattern, comma-separated, e.g. `tau,1+tau`; 0 is implied.
    #[arg(long)]
    pattern: Option<String>,
    /// Second window to compare against; prints EQUAL or DIFFERENT and
    /// exits 3 on a difference.
    #[arg(long, value_name = "WINDOW")]
    compare: Option<String>,
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DiffractArgs {
    #[command(flatten)]
    sw: SchemeWindow,
    /// Largest |k|; periodic schemes always cover one full period.
    #[arg(long, default_value_t = 3.0)]
    kmax: f64,
    /// Smallest reported intensity.
    #[arg(long, default_value_t = 1e-6)]
    floor: f64,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Args)]
struct ReconstructArgs {
    /// Sample `--window`, compute its deck data and reconstruct from that.
    #[arg(long, requires = "window", conflicts_with = "deck")]
    selftest: bool,
    /// Interval-union window for the self-test.
    #[arg(long)]
    window: Option<String>,
    /// Grid size M.
    #[arg(long, default_value_t = 512)]
    grid: usize,
    /// Deck-table JSON file to reconstruct from.
    #[arg(long)]
    deck: Option<PathBuf>,
    /// Save the self-test deck tables.
    #[arg(long)]
    write_deck: Option<PathBuf>,
    /// Near-zero threshold for |f̂|; default 1e-4 · max |f̂|.
    #[arg(long)]
    eps_zero: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_MIN_KNOWN)]
    min_known: f64,
    /// Self-test fails when the aligned mismatch reaches this fraction.
    #[arg(long, default_value_t = 0.01)]
    threshold: f64,
    /// Permit grids above 512.
    #[arg(long)]
    allow_large: bool,
    /// Report JSON; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Recovered cells as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct HomometryArgs {
    /// Two residue sets mod 32: A, B or `{...}` literals.
    #[arg(long, num_args = 2, value_names = ["X", "Y"])]
    sets: Option<Vec<String>>,
    /// Compare the tables of this order only, printing a witness if any.
    #[arg(long)]
    order: Option<usize>,
    /// Write the first set's table at `--order` (default 2) as CSV.
    #[arg(long)]
    table: Option<PathBuf>,
}

enum Failure {
    Lib(Error),
    Verify(String),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type Outcome = std::result::Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(msg) = configure_threads() {
        eprintln!("error: {msg}");
        return ExitCode::from(2);
    }
    let result = match cli.command {
        Command::Generate(a) => cmd_generate(a),
        Command::Correlate(a) => cmd_correlate(a),
        Command::Diffract(a) => cmd_diffract(a),
        Command::Reconstruct(a) => cmd_reconstruct(a),
        Command::Homometry(a) => cmd_homometry(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::Resource { .. } => 4,
                Error::Reconstruction { .. } | Error::Invariant(_) => 3,
                _ => 2,
            })
        }
        Err(Failure::Verify(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(3)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn configure_threads() -> std::result::Result<(), String> {
    let Ok(v) = std::env::var("MODELSET_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("MODELSET_THREADS must be a positive integer, got `{v}`"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

/// Writes via a temporary file in the target directory, then renames.
fn write_atomic(path: &Path, contents: &str) -> Outcome {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let io = |e: std::io::Error| Failure::Io(format!("{}: {e}", path.display()));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(contents.as_bytes()).map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

fn emit(path: Option<&Path>, contents: &str) -> Outcome {
    match path {
        Some(p) => write_atomic(p, contents),
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

fn csv_header(what: &str) -> String {
    format!("# modelset {VERSION} {what}\n")
}

fn svg_with_header(svg: String) -> String {
    format!("<!-- modelset {VERSION} -->\n{svg}")
}

fn region_arg(scheme: &Scheme, region: Option<&[f64]>) -> Result<Region> {
    match (region, scheme.kind()) {
        (Some([lo, hi]), _) => Region::new(*lo, *hi),
        (None, SchemeKind::Periodic(n)) => Region::new(0.0, n as f64 - 1.0),
        _ => Err(Error::Parameter(
            "--region LO HI is required for this scheme".into(),
        )),
    }
}

fn residue_set(lit: &str) -> Result<ResidueSet> {
    let lit = match lit.trim() {
        "A" => "{A}",
        "B" => "{B}",
        other => other,
    };
    match parse_window(lit, Some(modelset::homometry::MODULUS))? {
        Window::Residues(s) => Ok(s),
        w => Err(Error::Parameter(format!(
            "expected a residue set, got a window of kind `{}`",
            w.kind_name()
        ))),
    }
}

fn cmd_generate(a: GenerateArgs) -> Outcome {
    let (scheme, w) = a.sw.parse()?;
    let region = region_arg(&scheme, a.region.as_deref())?;
    let ps = generate(&scheme, &w, region)?;
    let comment = format!("modelset {VERSION}");
    emit(a.out.as_deref(), &write_pointset(&ps, Some(&comment)))?;

    if !a.thin.is_empty() {
        if a.svg.is_none() {
            return Err(Error::Parameter("--thin only affects the --svg plot".into()).into());
        }
        if !matches!(scheme.kind(), SchemeKind::Fibonacci) {
            return Err(Error::Parameter("--thin needs the fibonacci scheme".into()).into());
        }
    }
    if let Some(svg) = &a.svg {
        let thinned: Vec<(String, PointSet)> = match &w {
            Window::Intervals(iu) => a
                .thin
                .iter()
                .map(|lit| {
                    Ok((
                        format!("thinned by {lit}"),
                        thinned_model_set(iu, &residue_set(lit)?, region)?,
                    ))
                })
                .collect::<Result<_>>()?,
            _ => Vec::new(),
        };
        let mut rows: Vec<(String, &PointSet)> = Vec::new();
        let mut rest = thinned.iter();
        if let Some((label, p)) = rest.next() {
            rows.push((label.clone(), p));
        }
        rows.push((format!("window {}", ps.window()), &ps));
        rows.extend(rest.map(|(l, p)| (l.clone(), p)));
        write_atomic(
            svg,
            &svg_with_header(dot_rows_svg(&rows, region.lo, region.hi)),
        )?;
    }
    Ok(())
}

fn parse_pattern(scheme: &Scheme, text: &str) -> Result<Pattern> {
    let mut pts = Vec::new();
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let bad = || Error::Parameter(format!("pattern entry `{item}` is not of the form u+v*tau"));
        let Ok(Real::Exact(q)) = parse_real(item) else {
            return Err(bad());
        };
        let (u, v, d) = q.parts();
        if d != 1 {
            return Err(bad());
        }
        let p = QuadInt::new(u, v);
        scheme.check_point(p)?;
        pts.push(p);
    }
    Ok(Pattern::new(pts))
}

fn patch_for(scheme: &Scheme, w: &Window, r: f64, reach: f64) -> Result<PointSet> {
    if !(r.is_finite() && r > 0.0) {
        return Err(Error::Parameter(format!(
            "--empirical must be positive, got {r}"
        )));
    }
    let margin = r / 2.0 + reach + 1.0;
    generate(scheme, w, Region::new(-margin, margin)?)
}

fn cmd_correlate(a: CorrelateArgs) -> Outcome {
    let (scheme, w) = a.sw.parse()?;

    if let Some(text) = &a.pattern {
        let pat = parse_pattern(&scheme, text)?;
        let exact = freq_exact(&scheme, &w, &pat)?;
        let mut out = csv_header("correlate") + "pattern,exact";
        let mut row = format!("\"{pat}\",{}", modelset::format::sig15(exact));
        if let Some(r) = a.empirical {
            let reach = pat
                .points()
                .iter()
                .fold(0.0f64, |m, p| m.max(p.physical().abs()));
            let ps = patch_for(&scheme, &w, r, reach)?;
            out.push_str(",empirical");
            row.push_str(&format!(
                ",{}",
                modelset::format::sig15(freq_empirical(&ps, &pat, r)?)
            ));
        }
        out.push('\n');
        out.push_str(&row);
        out.push('\n');
        return emit(a.out.as_deref(), &out);
    }

    let measure = correlation_measure(&scheme, &w, a.order, a.cutoff)?;
    if let Some(other) = &a.compare {
        let w2 = scheme.parse_window(other)?;
        let m2 = correlation_measure(&scheme, &w2, a.order, a.cutoff)?;
        return match correlations_equal(&measure, &m2, a.tol)? {
            None => {
                println!(
                    "EQUAL: order {} correlations within cutoff {} agree on {} tuples (tol {:e})",
                    a.order,
                    a.cutoff,
                    measure.len(),
                    a.tol
                );
                Ok(())
            }
            Some(d) => {
                println!("DIFFERENT: {d}");
                Err(Failure::Verify(format!(
                    "order {} correlations differ",
                    a.order
                )))
            }
        };
    }
    let csv = match a.empirical {
        Some(r) => {
            let ps = patch_for(&scheme, &w, r, a.cutoff)?;
            measure.to_csv_with_empirical(&measure.empirical(&ps, r)?)?
        }
        None => measure.to_csv(),
    };
    emit(a.out.as_deref(), &(csv_header("correlate") + &csv))
}

fn cmd_diffract(a: DiffractArgs) -> Outcome {
    let (scheme, w) = a.sw.parse()?;
    let spectrum = match scheme.kind() {
        SchemeKind::Periodic(_) => full_period(&scheme, &w)?,
        _ => diffraction(
            &scheme,
            &w,
            DiffractionOptions {
                floor: a.floor,
                ..DiffractionOptions::new(a.kmax)
            },
        )?,
    };
    emit(
        a.out.as_deref(),
        &(csv_header("diffract") + &spectrum.to_csv()),
    )?;
    if let Some(svg) = &a.svg {
        write_atomic(svg, &svg_with_header(spectrum.to_svg()))?;
    }
    Ok(())
}

fn cmd_reconstruct(a: ReconstructArgs) -> Outcome {
    let opts = ReconstructionOptions {
        eps_zero: a.eps_zero,
        min_known_fraction: a.min_known,
        allow_large: a.allow_large,
    };
    let report = if a.selftest {
        let lit = a.window.as_deref().unwrap_or_default();
        let Window::Intervals(w) = parse_window(lit, None)? else {
            return Err(
                Error::Parameter("reconstruction needs an interval-union window".into()).into(),
            );
        };
        if let Some(path) = &a.write_deck {
            let l_half = modelset::reconstruct::selftest_l_half(&w)?;
            let deck = deck_functions_with(
                &sample_indicator(&w, a.grid, l_half),
                a.grid,
                l_half,
                a.allow_large,
            )?;
            write_atomic(path, &write_deck(&deck))?;
        }
        self_test(&w, a.grid, &opts)?
    } else if let Some(path) = &a.deck {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
        report_from_deck(&read_deck(&text, a.allow_large)?, &opts)?
    } else {
        return Err(Error::Parameter("give --selftest --window W or --deck FILE".into()).into());
    };
    emit(a.out.as_deref(), &report.to_json())?;
    if let Some(csv) = &a.csv {
        write_atomic(csv, &(csv_header("reconstruct") + &report.recovered_csv()))?;
    }
    match report.mismatch {
        Some(m) if m >= a.threshold => Err(Failure::Verify(format!(
            "aligned mismatch {m} is not below {}",
            a.threshold
        ))),
        _ => Ok(()),
    }
}

fn cmd_homometry(a: HomometryArgs) -> Outcome {
    let default_pair = a.sets.is_none();
    let (x, y, names) = match &a.sets {
        Some(v) => (
            residue_set(&v[0])?,
            residue_set(&v[1])?,
            (v[0].clone(), v[1].clone()),
        ),
        None => (
            residue_set("A")?,
            residue_set("B")?,
            ("A".to_string(), "B".to_string()),
        ),
    };
    if let Some(path) = &a.table {
        let t = pattern_table(&x, a.order.unwrap_or(2))?;
        write_atomic(path, &(csv_header("homometry") + &t.to_csv()))?;
    }

    if let Some(order) = a.order {
        let (tx, ty) = (pattern_table(&x, order)?, pattern_table(&y, order)?);
        match tables_equal(&tx, &ty)? {
            None => println!(
                "order {order} tables of {} and {} are equal",
                names.0, names.1
            ),
            Some(w) => println!(
                "order {order} tables of {} and {} differ: {w}",
                names.0, names.1
            ),
        }
        return Ok(());
    }

    let mut failed = Vec::new();
    let mut line = |name: String, ok: bool, expect: bool| {
        let status = if !default_pair {
            if ok {
                "yes"
            } else {
                "no"
            }
        } else if ok == expect {
            "PASS"
        } else {
            failed.push(name.clone());
            "FAIL"
        };
        println!("{name:<48} {status}");
    };
    for order in [2, 3] {
        let eq = tables_equal(&pattern_table(&x, order)?, &pattern_table(&y, order)?)?;
        line(format!("order-{order} tables equal"), eq.is_none(), true);
    }
    let witness = tables_equal(&pattern_table(&x, 4)?, &pattern_table(&y, 4)?)?;
    let label = match &witness {
        Some(w) => format!("order-4 tables differ ({w})"),
        None => "order-4 tables differ".to_string(),
    };
    line(label, witness.is_some(), true);
    match rigid_equivalent(&x, &y)? {
        None => line(
            format!(
                "rigidly inequivalent (none of 64 motions maps {} to {})",
                names.0, names.1
            ),
            true,
            true,
        ),
        Some(m) => line(
            format!("rigidly inequivalent (rigid equivalence {m})"),
            false,
            true,
        ),
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Verify(failed.join("; ")))
    }
}
