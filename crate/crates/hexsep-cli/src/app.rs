//! Argument handling and subcommand dispatch.
//!
//! Exit codes: 0 success, 2 validation/usage error, 3 numerical-budget
//! error (quadrature or integration could not reach its target), 1 I/O.

use clap::{Args, Parser, Subcommand, ValueEnum};
use hexsep::{
    build_constellation, decision_regions, neighbor_stats, report, sep, sim, BSource, Channel,
    ConstellationKind, CorrectionMethod, Error as HexError, QuadratureSpec, SnrPoint,
    SweepOptions,
};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "hexsep",
    version,
    about = "Hexagonal QAM constellations, closed-form SEP, oracles, and Monte Carlo"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Regular,
    Irregular,
    #[value(name = "3psk")]
    ThreePsk,
}

impl From<KindArg> for ConstellationKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Regular => ConstellationKind::RegularHqam,
            KindArg::Irregular => ConstellationKind::IrregularHqam,
            KindArg::ThreePsk => ConstellationKind::ThreePsk,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ChannelArg {
    Awgn,
    Rayleigh,
}

impl From<ChannelArg> for Channel {
    fn from(c: ChannelArg) -> Self {
        match c {
            ChannelArg::Awgn => Channel::Awgn,
            ChannelArg::Rayleigh => Channel::RayleighFlat,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum BSourceArg {
    Table1,
    Geometric,
}

impl From<BSourceArg> for BSource {
    fn from(b: BSourceArg) -> Self {
        match b {
            BSourceArg::Table1 => BSource::Table1,
            BSourceArg::Geometric => BSource::Geometric,
        }
    }
}

#[derive(Args, Clone, Copy)]
struct SnrArg {
    /// SNR in dB
    #[arg(long, allow_hyphen_values = true, conflicts_with = "snr_linear")]
    snr_db: Option<f64>,
    /// SNR as a linear ratio (0 is the zero-SNR limit)
    #[arg(long)]
    snr_linear: Option<f64>,
}

impl SnrArg {
    fn resolve(&self) -> Result<SnrPoint, String> {
        match (self.snr_db, self.snr_linear) {
            (Some(db), None) => Ok(SnrPoint::from_db(db)),
            (None, Some(lin)) if lin >= 0.0 => Ok(SnrPoint::from_linear(lin)),
            (None, Some(lin)) => Err(format!("--snr-linear must be >= 0, got {lin}")),
            _ => Err("exactly one of --snr-db or --snr-linear is required".into()),
        }
    }
}

#[derive(Args, Clone, Copy)]
struct McArgs {
    /// Symbols to simulate
    #[arg(long, default_value_t = 1_000_000)]
    n_symbols: u64,
    /// Base RNG seed
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Symbols per RNG batch/stream
    #[arg(long, default_value_t = 65_536)]
    batch_size: u64,
}

#[derive(Subcommand)]
enum Cmd {
    /// Write constellation points (and optionally decision regions) as CSV
    Constellation {
        #[arg(long)]
        order: usize,
        #[arg(long, value_enum)]
        kind: KindArg,
        /// Points CSV output path
        #[arg(long)]
        out: PathBuf,
        /// Decision-region CSV output path
        #[arg(long)]
        regions_out: Option<PathBuf>,
    },
    /// Print the (alpha, A, A_c, B) parameter set of a constellation
    Params {
        #[arg(long)]
        order: usize,
        #[arg(long, value_enum)]
        kind: KindArg,
    },
    /// Evaluate all SEP estimators at a single SNR point
    Sep {
        #[arg(long)]
        order: usize,
        #[arg(long, value_enum)]
        kind: KindArg,
        #[command(flatten)]
        snr: SnrArg,
        #[arg(long, value_enum, default_value = "table1")]
        b_source: BSourceArg,
        /// Skip the (slower) exact polygon oracle
        #[arg(long)]
        skip_exact: bool,
    },
    /// Run the Monte Carlo link simulation at a single SNR point
    Simulate {
        #[arg(long)]
        order: usize,
        #[arg(long, value_enum)]
        kind: KindArg,
        #[command(flatten)]
        snr: SnrArg,
        #[arg(long, value_enum, default_value = "awgn")]
        channel: ChannelArg,
        #[command(flatten)]
        mc: McArgs,
    },
    /// Sweep estimators over an SNR grid and write the comparison CSV
    Sweep {
        #[arg(long)]
        order: usize,
        #[arg(long, value_enum)]
        kind: KindArg,
        /// Grid as start:stop:step in dB, e.g. -4:23:3
        #[arg(long, allow_hyphen_values = true)]
        grid: String,
        #[arg(long, value_enum, default_value = "awgn")]
        channel: ChannelArg,
        #[arg(long, value_enum, default_value = "table1")]
        b_source: BSourceArg,
        #[arg(long)]
        out: PathBuf,
        /// Also write a JSON mirror
        #[arg(long)]
        json: Option<PathBuf>,
        /// Include the exact oracle column
        #[arg(long)]
        with_exact: bool,
        /// Include the Monte Carlo column
        #[arg(long)]
        with_mc: bool,
        #[command(flatten)]
        mc: McArgs,
    },
    /// Recompute the published 256-point AE comparison
    Table2 {
        #[arg(long, value_enum, default_value = "irregular")]
        kind: KindArg,
        #[arg(long, value_enum, default_value = "table1")]
        b_source: BSourceArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fading-averaged closed form vs oracle vs Monte Carlo over a grid
    RayleighCurve {
        #[arg(long)]
        order: usize,
        #[arg(long, value_enum)]
        kind: KindArg,
        /// Grid as start:stop:step in dB
        #[arg(long, allow_hyphen_values = true)]
        grid: String,
        #[arg(long, value_enum, default_value = "table1")]
        b_source: BSourceArg,
        #[arg(long)]
        out: PathBuf,
        /// Skip the (slow) exact oracle column
        #[arg(long)]
        skip_exact: bool,
        #[command(flatten)]
        mc: McArgs,
    },
}

pub fn run(argv: Vec<String>) -> ExitCode {
    if let Ok(threads) = std::env::var("HEXSEP_THREADS") {
        match threads.parse::<usize>() {
            Ok(n) if n > 0 => hexsep::set_worker_threads(n),
            _ => {
                eprintln!("HEXSEP_THREADS must be a positive integer, got '{threads}'");
                return ExitCode::from(2);
            }
        }
    }
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            // clap prints usage and the offending flag; help/version are success
            let code = if e.exit_code() == 0 { 0 } else { 2 };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let invocation = argv.join(" ");
    match dispatch(cli.cmd, &invocation) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Lib(e)) => {
            eprintln!("error: {e}");
            let code = match e {
                HexError::QuadratureNotConverged { .. }
                | HexError::IntegrationBudgetExceeded { .. } => 3,
                _ => 2,
            };
            ExitCode::from(code)
        }
        Err(CliError::Io(e)) => {
            eprintln!("i/o error: {e}");
            ExitCode::from(1)
        }
    }
}

enum CliError {
    Usage(String),
    Lib(HexError),
    Io(std::io::Error),
}

impl From<HexError> for CliError {
    fn from(e: HexError) -> Self {
        CliError::Lib(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

fn parse_grid(spec: &str) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(CliError::Usage(format!(
            "--grid expects start:stop:step in dB, got '{spec}'"
        )));
    }
    let nums: Vec<f64> = parts
        .iter()
        .map(|p| p.parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| CliError::Usage(format!("--grid has a non-numeric field in '{spec}'")))?;
    let (start, stop, step) = (nums[0], nums[1], nums[2]);
    if step <= 0.0 || stop < start {
        return Err(CliError::Usage(format!(
            "--grid needs stop >= start and step > 0, got '{spec}'"
        )));
    }
    let mut grid = Vec::new();
    let mut k = 0u32;
    loop {
        let v = start + step * k as f64;
        if v > stop + 1e-9 {
            break;
        }
        grid.push(v);
        k += 1;
    }
    Ok(grid)
}

fn header(invocation: &str, seed: Option<u64>) -> Vec<String> {
    let mut lines = vec![
        format!("hexsep {}", hexsep::VERSION),
        format!("invocation: {invocation}"),
    ];
    match seed {
        Some(s) => lines.push(format!("seed: {s}")),
        None => lines.push("seed: none".to_string()),
    }
    lines
}

fn prepend_comments(body: &str, comments: &[String]) -> String {
    let mut out = String::new();
    for line in comments {
        out.push_str("# ");
        out.push_str(line);
        out.push('\n');
    }
    out.push_str(body);
    out
}

fn dispatch(cmd: Cmd, invocation: &str) -> Result<(), CliError> {
    match cmd {
        Cmd::Constellation {
            order,
            kind,
            out,
            regions_out,
        } => {
            let c = build_constellation(order, kind.into())?;
            let comments = header(invocation, None);
            std::fs::write(
                &out,
                prepend_comments(&hexsep::lattice::points_csv(&c), &comments),
            )?;
            println!(
                "wrote {} points (d_min = {}, avg energy = {}) to {}",
                c.order(),
                c.d_min,
                c.avg_energy,
                out.display()
            );
            if let Some(path) = regions_out {
                let regions = decision_regions(&c);
                std::fs::write(
                    &path,
                    prepend_comments(&hexsep::lattice::regions_csv(&regions), &comments),
                )?;
                let open = regions.iter().filter(|r| !r.is_bounded()).count();
                println!(
                    "wrote {} decision regions ({} open) to {}",
                    regions.len(),
                    open,
                    path.display()
                );
            }
            Ok(())
        }
        Cmd::Params { order, kind } => {
            let kind: ConstellationKind = kind.into();
            let c = build_constellation(order, kind)?;
            let st = neighbor_stats(&c);
            let geometric = sep::resolve_params(order, kind, BSource::Geometric)?;
            println!("order      {order}");
            println!("kind       {}", kind.as_str());
            println!("alpha      {}", st.alpha);
            println!("A          {}", st.a);
            println!("A_c        {}", st.a_c);
            println!("B_geometric {}", geometric.b);
            match sep::b_table(order, kind) {
                Some(b) => println!("B_table1   {b}"),
                None => println!("B_table1   (not tabulated)"),
            }
            Ok(())
        }
        Cmd::Sep {
            order,
            kind,
            snr,
            b_source,
            skip_exact,
        } => {
            let snr = snr.resolve().map_err(CliError::Usage)?;
            let kind: ConstellationKind = kind.into();
            let c = build_constellation(order, kind)?;
            let params = sep::resolve_params(order, kind, b_source.into())?;
            let spec = QuadratureSpec::default();
            println!(
                "order {order} ({}), snr: {} linear ({} dB)",
                kind.as_str(),
                snr.linear(),
                snr.db()
            );
            println!("sep_nn        {}", sep::sep_nn_awgn(&params, snr));
            println!("sep_closed    {}", sep::sep_hqam_closed(&params, snr));
            println!(
                "sep_corrected {}",
                sep::sep_hqam_corrected(&params, snr, &spec)?
            );
            if order == 3 {
                println!(
                    "sep_3psk_numeric {}",
                    sep::sep_3psk_exact(snr, CorrectionMethod::NumericEq4, &spec)?
                );
                println!(
                    "sep_3psk_closed  {}",
                    sep::sep_3psk_exact(snr, CorrectionMethod::ClosedEq16, &spec)?
                );
            }
            println!(
                "sep_rayleigh  {}",
                sep::sep_hqam_rayleigh(&params, snr)?
            );
            if !skip_exact {
                if snr.linear() > 0.0 {
                    let exact = hexsep::exact_sep_awgn(&c, snr)?;
                    println!(
                        "sep_exact     {} (err bound {:e})",
                        exact.value, exact.abs_err_bound
                    );
                } else {
                    println!("sep_exact     (skipped at zero snr)");
                }
            }
            Ok(())
        }
        Cmd::Simulate {
            order,
            kind,
            snr,
            channel,
            mc,
        } => {
            let snr = snr.resolve().map_err(CliError::Usage)?;
            let c = build_constellation(order, kind.into())?;
            let cfg = sim::SimConfig {
                n_symbols: mc.n_symbols,
                seed: mc.seed,
                channel: channel.into(),
                batch_size: mc.batch_size,
            };
            let est = sim::simulate(&c, snr, &cfg)?;
            println!("channel    {}", cfg.channel.as_str());
            println!("n_symbols  {}", est.n_symbols);
            println!("n_errors   {}", est.n_errors);
            println!("sep_hat    {}", est.sep_hat);
            println!("ci95       {}", est.ci95_halfwidth);
            println!("seed       {}", est.seed);
            Ok(())
        }
        Cmd::Sweep {
            order,
            kind,
            grid,
            channel,
            b_source,
            out,
            json,
            with_exact,
            with_mc,
            mc,
        } => {
            let grid = parse_grid(&grid)?;
            let kind: ConstellationKind = kind.into();
            let channel: Channel = channel.into();
            let c = build_constellation(order, kind)?;
            let params = sep::resolve_params(order, kind, b_source.into())?;
            let opts = SweepOptions {
                with_exact,
                mc: with_mc.then_some((mc.n_symbols, mc.seed, mc.batch_size)),
                ..SweepOptions::default()
            };
            let rows = report::sweep(&c, &params, &grid, channel, &opts)?;
            let seed = with_mc.then_some(mc.seed);
            let comments = header(invocation, seed);
            std::fs::write(&out, report::sweep_csv(&rows, &comments))?;
            println!("wrote {} rows to {}", rows.len(), out.display());
            if let Some(path) = json {
                let meta = serde_json::json!({
                    "version": hexsep::VERSION,
                    "invocation": invocation,
                    "seed": seed,
                });
                std::fs::write(&path, report::sweep_json(&rows, meta))?;
                println!("wrote JSON mirror to {}", path.display());
            }
            for row in rows.iter().filter(|r| r.error.is_some()) {
                eprintln!(
                    "row {} dB: {}",
                    row.snr_db,
                    row.error.as_deref().unwrap_or_default()
                );
            }
            Ok(())
        }
        Cmd::Table2 {
            kind,
            b_source,
            out,
        } => {
            let kind: ConstellationKind = kind.into();
            let reference = report::ReferenceTable::published_256();
            let c = build_constellation(256, kind)?;
            let params = sep::resolve_params(256, kind, b_source.into())?;
            let opts = SweepOptions {
                with_corrected: false,
                with_nn: false,
                with_exact: true,
                ..SweepOptions::default()
            };
            let rows = report::sweep(&c, &params, &reference.snr_db, Channel::Awgn, &opts)?;
            let rep = report::table2_report(&rows, &reference)?;
            print!("{}", rep.to_text());
            if let Some(path) = out {
                let comments = header(invocation, None);
                std::fs::write(&path, prepend_comments(&rep.csv(), &comments))?;
                println!("wrote comparison to {}", path.display());
            }
            Ok(())
        }
        Cmd::RayleighCurve {
            order,
            kind,
            grid,
            b_source,
            out,
            skip_exact,
            mc,
        } => {
            let grid = parse_grid(&grid)?;
            let kind: ConstellationKind = kind.into();
            let c = build_constellation(order, kind)?;
            let params = sep::resolve_params(order, kind, b_source.into())?;
            let opts = SweepOptions {
                with_corrected: false,
                with_nn: false,
                with_exact: !skip_exact,
                mc: Some((mc.n_symbols, mc.seed, mc.batch_size)),
                ..SweepOptions::default()
            };
            let rows = report::sweep(&c, &params, &grid, Channel::RayleighFlat, &opts)?;
            let comments = header(invocation, Some(mc.seed));
            std::fs::write(&out, report::sweep_csv(&rows, &comments))?;
            println!("wrote {} rows to {}", rows.len(), out.display());
            Ok(())
        }
    }
}
