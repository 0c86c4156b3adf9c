//! Command-line front end for the q-auction numerics: emits the profit
//! table, intensity curves, asymptotic comparisons, and seeded simulation
//! reports as plot-ready CSV or JSON, each carrying a run manifest so any
//! artifact can be reproduced from its own metadata.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use qauction::{
    asymptotic_max_rho, empirical_gumbel_distance, gumbel_sup_distance, log_fit, max_rho,
    rho_bidder, rho_seller, simulate_config, simulate_joint, AuctionConfig, JointSeller,
    JointStrategy2D, QError, Strategy, Withdrawal,
};

#[derive(Parser)]
#[command(
    name = "qauction",
    version,
    about = "Numerical tables, curves, and simulations for probabilistic English auctions"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    #[command(flatten)]
    shared: Shared,
}

#[derive(Args)]
struct Shared {
    /// Dispersion of the Gaussian strategies, in log-price units.
    #[arg(long, global = true, default_value_t = 1.0)]
    sigma: f64,

    /// Seed for simulation commands (ignored by pure-quadrature commands).
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Trial count for simulation commands.
    #[arg(long, global = true)]
    trials: Option<u64>,

    /// Worker threads; the default uses every core. Outputs do not depend
    /// on this.
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Output file; stdout when absent. File output of CSV also writes a
    /// `<out>.manifest.json` sidecar.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// csv (default for tables) or json; `simulate` is always json.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Cmd {
    /// The N-bidder profit table: max ρ_N, the open-auction ρ_N(−∞), and
    /// their ratio, one row per N.
    Table1 {
        #[arg(long, default_value_t = 10)]
        n_max: u32,
    },

    /// Seller profit intensity ρ_N(p′) along a withdrawal-price range.
    RhoCurve {
        #[arg(long, default_value_t = 3)]
        n: u32,
        #[arg(long, default_value_t = -6.0, allow_hyphen_values = true)]
        p_min: f64,
        #[arg(long, default_value_t = 2.0, allow_hyphen_values = true)]
        p_max: f64,
        #[arg(long, default_value_t = 101)]
        steps: u32,
        /// Report the price axis multiplicatively (c′ = e^{p′}) instead of
        /// in log units.
        #[arg(long)]
        multiplicative: bool,
    },

    /// Quadrature maxima against the closed asymptotic and the logarithmic
    /// fit, with their differences.
    Asym {
        #[arg(long, value_delimiter = ',', default_value = "3,10,100,1000,10000")]
        n_list: Vec<u32>,
        /// Largest N still evaluated by quadrature; rows above it carry NA
        /// in the quadrature columns.
        #[arg(long, default_value_t = 10_000)]
        exact_cutoff: u32,
    },

    /// Bidder profit intensity ρ_{k′}(q′) per N over a bid range.
    Bidder {
        #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
        n_list: Vec<u32>,
        #[arg(long, default_value_t = -2.0, allow_hyphen_values = true)]
        q_min: f64,
        #[arg(long, default_value_t = 2.0, allow_hyphen_values = true)]
        q_max: f64,
        #[arg(long, default_value_t = 101)]
        steps: u32,
        /// Seller withdrawal price: a number, or -inf for the open auction.
        #[arg(long, default_value = "-inf", allow_hyphen_values = true)]
        p_prime: String,
        /// Report the bid axis multiplicatively (c = e^{−q′}) instead of in
        /// log units.
        #[arg(long)]
        multiplicative: bool,
    },

    /// Simulate a configuration file (one- or two-dimensional strategies)
    /// and write the SimulationReport as JSON.
    Simulate {
        /// JSON file with {"seller": …, "bidders": […]}.
        config: PathBuf,
    },

    /// Distance of the rescaled winning bid from the Gumbel limit: exact
    /// sup-distance and seeded empirical Kolmogorov–Smirnov, per N.
    Gumbel {
        #[arg(long, value_delimiter = ',', default_value = "100,10000")]
        n_list: Vec<u32>,
    },
}

enum CliError {
    Usage(String),
    Parse(String),
    Numerical(QError),
    Io(std::io::Error),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Parse(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Parse(m) => write!(f, "{m}"),
            CliError::Numerical(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "{e}"),
        }
    }
}

impl From<QError> for CliError {
    fn from(e: QError) -> Self {
        CliError::Numerical(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

#[derive(Serialize)]
struct RunManifest {
    command: String,
    parameters: BTreeMap<String, String>,
    seed: Option<u64>,
    output_path: String,
    tool_version: String,
}

/// A rectangular artifact; cells render as fixed-precision decimals in CSV
/// and as numbers (with NA → "NA", blank → null) in JSON.
struct Table {
    columns: Vec<String>,
    rows: Vec<Vec<Cell>>,
}

#[derive(Clone, Copy)]
enum Cell {
    Int(u64),
    Num(f64),
    Blank,
    Na,
}

impl Cell {
    fn csv(self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Num(v) => {
                let s = format!("{v:.9}");
                // quadrature noise below the printed precision must not
                // surface as a signed zero
                match s.strip_prefix('-') {
                    Some(rest) if rest.chars().all(|c| c == '0' || c == '.') => rest.to_string(),
                    _ => s,
                }
            }
            Cell::Blank => String::new(),
            Cell::Na => "NA".into(),
        }
    }

    fn json(self) -> Value {
        match self {
            Cell::Int(v) => json!(v),
            Cell::Num(v) => json!(v),
            Cell::Blank => Value::Null,
            Cell::Na => json!("NA"),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.shared.threads {
        // bound the global pool before any parallel work starts
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let sigma = cli.shared.sigma;
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(CliError::Usage(format!("sigma must be positive and finite, got {sigma}")));
    }
    match &cli.command {
        Cmd::Table1 { n_max } => cmd_table1(cli, *n_max),
        Cmd::RhoCurve { n, p_min, p_max, steps, multiplicative } => {
            cmd_rho_curve(cli, *n, *p_min, *p_max, *steps, *multiplicative)
        }
        Cmd::Asym { n_list, exact_cutoff } => cmd_asym(cli, n_list, *exact_cutoff),
        Cmd::Bidder { n_list, q_min, q_max, steps, p_prime, multiplicative } => {
            cmd_bidder(cli, n_list, *q_min, *q_max, *steps, p_prime, *multiplicative)
        }
        Cmd::Simulate { config } => cmd_simulate(cli, config),
        Cmd::Gumbel { n_list } => cmd_gumbel(cli, n_list),
    }
}

fn gaussian(sigma: f64) -> Strategy {
    Strategy::gaussian(0.0, sigma).expect("validated sigma")
}

fn linspace(a: f64, b: f64, steps: u32) -> impl Iterator<Item = f64> {
    let d = (b - a) / (steps - 1) as f64;
    (0..steps).map(move |i| if i + 1 == steps { b } else { a + d * i as f64 })
}

fn cmd_table1(cli: &Cli, n_max: u32) -> Result<(), CliError> {
    if n_max < 1 {
        return Err(CliError::Usage("n-max must be at least 1".into()));
    }
    let eta = gaussian(cli.shared.sigma);
    let mut rows = Vec::new();
    for n in 1..=n_max {
        let mp = max_rho(&eta, n)?;
        let inf = rho_seller(&eta, n, Withdrawal::MinusInfinity)?.rho;
        let ratio = if n >= 2 { Cell::Num(mp.rho_star / inf) } else { Cell::Blank };
        rows.push(vec![Cell::Int(n.into()), Cell::Num(mp.rho_star), Cell::Num(inf), ratio]);
    }
    let table = Table {
        columns: ["n", "max_rho", "rho_inf", "ratio"].map(String::from).to_vec(),
        rows,
    };
    let params = BTreeMap::from([
        ("n_max".into(), n_max.to_string()),
        ("sigma".into(), cli.shared.sigma.to_string()),
    ]);
    emit_table(cli, "table1", params, table)
}

fn cmd_rho_curve(
    cli: &Cli,
    n: u32,
    p_min: f64,
    p_max: f64,
    steps: u32,
    multiplicative: bool,
) -> Result<(), CliError> {
    if n < 1 {
        return Err(CliError::Usage("n must be at least 1".into()));
    }
    if steps < 2 {
        return Err(CliError::Usage("steps must be at least 2".into()));
    }
    if !(p_min < p_max) {
        return Err(CliError::Usage(format!("p-min ({p_min}) must be below p-max ({p_max})")));
    }
    let eta = gaussian(cli.shared.sigma);
    let mut rows = Vec::new();
    for p in linspace(p_min, p_max, steps) {
        let rho = rho_seller(&eta, n, Withdrawal::Finite(p))?.rho;
        let price = if multiplicative { p.exp() } else { p };
        rows.push(vec![Cell::Num(price), Cell::Num(rho)]);
    }
    let price_col = if multiplicative { "c_prime" } else { "p_prime" };
    let table = Table { columns: [price_col, "rho"].map(String::from).to_vec(), rows };
    let params = BTreeMap::from([
        ("n".into(), n.to_string()),
        ("p_min".into(), p_min.to_string()),
        ("p_max".into(), p_max.to_string()),
        ("steps".into(), steps.to_string()),
        ("multiplicative".into(), multiplicative.to_string()),
        ("sigma".into(), cli.shared.sigma.to_string()),
    ]);
    emit_table(cli, "rho-curve", params, table)
}

fn cmd_asym(cli: &Cli, n_list: &[u32], exact_cutoff: u32) -> Result<(), CliError> {
    if let Some(bad) = n_list.iter().find(|&&n| n < 3) {
        return Err(CliError::Usage(format!(
            "the asymptotic comparison needs every n ≥ 3, got {bad}"
        )));
    }
    let sigma = cli.shared.sigma;
    let eta = gaussian(sigma);
    let mut rows = Vec::new();
    for &n in n_list {
        let asym = sigma * asymptotic_max_rho(n)?;
        let fit = sigma * log_fit(n);
        let (exact, exact_minus_fit) = if n <= exact_cutoff {
            let mr = max_rho(&eta, n)?.rho_star;
            (Cell::Num(mr), Cell::Num(mr - fit))
        } else {
            (Cell::Na, Cell::Na)
        };
        rows.push(vec![
            Cell::Int(n.into()),
            exact,
            Cell::Num(asym),
            Cell::Num(fit),
            Cell::Num(asym - fit),
            exact_minus_fit,
        ]);
    }
    let table = Table {
        columns: ["n", "max_rho", "asymptotic", "log_fit", "asym_minus_fit", "max_rho_minus_fit"]
            .map(String::from)
            .to_vec(),
        rows,
    };
    let params = BTreeMap::from([
        ("n_list".into(), join(n_list)),
        ("exact_cutoff".into(), exact_cutoff.to_string()),
        ("sigma".into(), sigma.to_string()),
    ]);
    emit_table(cli, "asym", params, table)
}

fn cmd_bidder(
    cli: &Cli,
    n_list: &[u32],
    q_min: f64,
    q_max: f64,
    steps: u32,
    p_prime_raw: &str,
    multiplicative: bool,
) -> Result<(), CliError> {
    if n_list.is_empty() || n_list.iter().any(|&n| n < 1) {
        return Err(CliError::Usage("n-list needs values ≥ 1".into()));
    }
    if steps < 2 {
        return Err(CliError::Usage("steps must be at least 2".into()));
    }
    if !(q_min < q_max) {
        return Err(CliError::Usage(format!("q-min ({q_min}) must be below q-max ({q_max})")));
    }
    let p_prime = parse_withdrawal(p_prime_raw)?;
    let eta = gaussian(cli.shared.sigma);

    let mut columns = vec![if multiplicative { "c_prime".to_string() } else { "q_prime".to_string() }];
    columns.extend(n_list.iter().map(|n| format!("rho_n{n}")));
    let mut rows = Vec::new();
    for q in linspace(q_min, q_max, steps) {
        let mut row =
            vec![Cell::Num(if multiplicative { (-q).exp() } else { q })];
        for &n in n_list {
            row.push(Cell::Num(rho_bidder(&eta, n, p_prime, q)?));
        }
        rows.push(row);
    }
    let params = BTreeMap::from([
        ("n_list".into(), join(n_list)),
        ("q_min".into(), q_min.to_string()),
        ("q_max".into(), q_max.to_string()),
        ("steps".into(), steps.to_string()),
        ("p_prime".into(), p_prime_raw.to_string()),
        ("multiplicative".into(), multiplicative.to_string()),
        ("sigma".into(), cli.shared.sigma.to_string()),
    ]);
    emit_table(cli, "bidder", params, Table { columns, rows })
}

fn cmd_simulate(cli: &Cli, config: &PathBuf) -> Result<(), CliError> {
    if cli.shared.format == Some(Format::Csv) {
        return Err(CliError::Usage("simulate writes JSON reports; drop --format csv".into()));
    }
    let trials = cli.shared.trials.unwrap_or(1_000_000);
    if trials < 1_000 {
        return Err(CliError::Usage(format!("simulation needs at least 1000 trials, got {trials}")));
    }
    let seed = cli.shared.seed.unwrap_or(0);
    let shown = config.display().to_string();
    let text = fs::read_to_string(config)
        .map_err(|e| CliError::Parse(format!("{shown}: {e}")))?;
    let value: Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Parse(format!("{shown}: {e}")))?;

    let is_joint = value
        .pointer("/bidders/0/type")
        .and_then(Value::as_str)
        == Some("joint2d");
    let result = if is_joint {
        let raw: JointConfigFile =
            serde_json::from_value(value).map_err(|e| CliError::Parse(format!("{shown}: {e}")))?;
        let seller = match raw.seller.get("type").and_then(Value::as_str) {
            Some("joint2d") => JointSeller::Joint(
                serde_json::from_value(raw.seller)
                    .map_err(|e| CliError::Parse(format!("{shown}: seller: {e}")))?,
            ),
            _ => JointSeller::Price(
                serde_json::from_value(raw.seller)
                    .map_err(|e| CliError::Parse(format!("{shown}: seller: {e}")))?,
            ),
        };
        serde_json::to_value(simulate_joint(&raw.bidders, &seller, trials, seed)?)
    } else {
        let cfg: AuctionConfig = serde_json::from_str(&text)
            .map_err(|e| CliError::Parse(format!("{shown}: {e}")))?;
        serde_json::to_value(simulate_config(&cfg, trials, seed)?)
    }
    .expect("reports serialize");

    let params = BTreeMap::from([
        ("config".into(), shown),
        ("trials".into(), trials.to_string()),
        ("sigma".into(), cli.shared.sigma.to_string()),
    ]);
    let manifest = manifest(cli, "simulate", params, Some(seed));
    let body = to_pretty(&json!({ "manifest": manifest, "result": result }));
    write_out(cli, body)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct JointConfigFile {
    seller: Value,
    bidders: Vec<JointStrategy2D>,
}

fn cmd_gumbel(cli: &Cli, n_list: &[u32]) -> Result<(), CliError> {
    if let Some(bad) = n_list.iter().find(|&&n| n < 2) {
        return Err(CliError::Usage(format!("the Gumbel comparison needs every n ≥ 2, got {bad}")));
    }
    let trials = cli.shared.trials.unwrap_or(100_000);
    if trials < 1 {
        return Err(CliError::Usage("trials must be positive".into()));
    }
    let seed = cli.shared.seed.unwrap_or(0);
    let mut rows = Vec::new();
    for &n in n_list {
        let empirical = empirical_gumbel_distance(n, trials, seed)?;
        let exact = gumbel_sup_distance(n)?;
        rows.push(vec![Cell::Int(n.into()), Cell::Num(empirical), Cell::Num(exact)]);
    }
    let table = Table {
        columns: ["n", "empirical_ks", "exact_sup"].map(String::from).to_vec(),
        rows,
    };
    let params = BTreeMap::from([
        ("n_list".into(), join(n_list)),
        ("trials".into(), trials.to_string()),
    ]);
    emit_table_seeded(cli, "gumbel", params, Some(seed), table)
}

fn parse_withdrawal(raw: &str) -> Result<Withdrawal, CliError> {
    if raw == "-inf" {
        return Ok(Withdrawal::MinusInfinity);
    }
    match raw.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(Withdrawal::Finite(v)),
        _ => Err(CliError::Usage(format!(
            "p-prime must be a finite number or -inf, got {raw:?}"
        ))),
    }
}

fn join(ns: &[u32]) -> String {
    ns.iter().map(u32::to_string).collect::<Vec<_>>().join(",")
}

fn manifest(
    cli: &Cli,
    command: &str,
    mut parameters: BTreeMap<String, String>,
    seed: Option<u64>,
) -> RunManifest {
    parameters.insert("format".into(), if effective_format(cli) == Format::Csv { "csv" } else { "json" }.into());
    RunManifest {
        command: command.into(),
        parameters,
        seed,
        output_path: cli
            .shared
            .out
            .as_ref()
            .map_or_else(|| "-".into(), |p| p.display().to_string()),
        tool_version: env!("CARGO_PKG_VERSION").into(),
    }
}

fn effective_format(cli: &Cli) -> Format {
    match (&cli.command, cli.shared.format) {
        (Cmd::Simulate { .. }, _) => Format::Json,
        (_, Some(f)) => f,
        (_, None) => Format::Csv,
    }
}

fn emit_table(
    cli: &Cli,
    command: &str,
    params: BTreeMap<String, String>,
    table: Table,
) -> Result<(), CliError> {
    emit_table_seeded(cli, command, params, None, table)
}

fn emit_table_seeded(
    cli: &Cli,
    command: &str,
    params: BTreeMap<String, String>,
    seed: Option<u64>,
    table: Table,
) -> Result<(), CliError> {
    let manifest = manifest(cli, command, params, seed);
    match effective_format(cli) {
        Format::Csv => {
            let mut body = table.columns.join(",");
            body.push('\n');
            for row in &table.rows {
                let line: Vec<String> = row.iter().map(|c| c.csv()).collect();
                let _ = writeln!(body, "{}", line.join(","));
            }
            if let Some(out) = &cli.shared.out {
                fs::write(out, &body)?;
                let sidecar = out.with_extension(append_ext(out, "manifest.json"));
                fs::write(sidecar, to_pretty(&serde_json::to_value(&manifest).unwrap()))?;
            } else {
                print!("{body}");
            }
            Ok(())
        }
        Format::Json => {
            let rows: Vec<Value> = table
                .rows
                .iter()
                .map(|row| {
                    Value::Object(
                        table
                            .columns
                            .iter()
                            .zip(row)
                            .map(|(c, cell)| (c.clone(), cell.json()))
                            .collect(),
                    )
                })
                .collect();
            let body = to_pretty(&json!({ "manifest": manifest, "rows": rows }));
            write_out(cli, body)
        }
    }
}

/// "table.csv" → "csv.manifest.json" suffix helper: keeps the original
/// extension visible in the sidecar name.
fn append_ext(out: &std::path::Path, tail: &str) -> String {
    match out.extension().and_then(|e| e.to_str()) {
        Some(e) => format!("{e}.{tail}"),
        None => tail.to_string(),
    }
}

fn to_pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
    s.push('\n');
    s
}

fn write_out(cli: &Cli, body: String) -> Result<(), CliError> {
    match &cli.shared.out {
        Some(out) => fs::write(out, body).map_err(CliError::from),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}
