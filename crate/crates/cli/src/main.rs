//! Command-line surface: build networks into text artifacts, verify the
//! constructions' bounds, sweep parameters into CSV, and export parameter
//! tables.
//!
//! Exit codes: 0 all checks pass, 1 a bound was violated, 2 usage or
//! parameter error. `KOROBOV_CNN_THREADS` caps evaluation fan-out.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use korobov_cnn::{
    build_approximator, build_basis_net, build_half_reduction, build_phi_net, build_product_net,
    build_sq_net, Axis, NormOrder, TermPolicy,
};
use korobov_cnn_cli::netfile::{params_map, NetworkFile};
use korobov_cnn_cli::{sweep, targets, verify};

#[derive(Parser)]
#[command(
    name = "korobov-cnn",
    version,
    about = "Explicit convolutional ReLU networks for Korobov-class approximation: build, verify, sweep, export"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Construct a network and print its structure; optionally write it as
    /// a JSON artifact.
    Build(BuildArgs),
    /// Run a verification suite; prints measured values against bounds.
    Verify(VerifyArgs),
    /// Sweep n = 1..=n-max and write one CSV row per configuration.
    Sweep(SweepArgs),
    /// Write a built network as a JSON or CSV artifact.
    Export(ExportArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum BuildKind {
    Sq,
    Prd,
    Product,
    Phi,
    Basis,
    Approximator,
}

#[derive(Args)]
struct BuildArgs {
    #[arg(value_enum)]
    kind: BuildKind,
    /// Squaring depth parameter.
    #[arg(long, default_value_t = 2)]
    n: usize,
    /// Spatial side length of the input.
    #[arg(long, default_value_t = 4)]
    d: usize,
    /// Kernel half-width.
    #[arg(long, default_value_t = 1)]
    k: usize,
    /// Channel count for sq builds.
    #[arg(long, default_value_t = 1)]
    c: usize,
    /// Named target (approximator; single-term targets for phi/basis).
    #[arg(long, default_value = "hat111")]
    target: String,
    /// Write the JSON artifact here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Suite: sq, prd, product, selector, phi, basis, e2e, size.
    suite: String,
    #[arg(long, default_value_t = 4)]
    d: usize,
    #[arg(long, default_value_t = 1)]
    k: usize,
    /// Depth parameter for single-configuration suites (e2e, size).
    #[arg(long, default_value_t = 2)]
    n: usize,
    /// Upper end of the n range for sweeping suites.
    #[arg(long, default_value_t = 4)]
    n_max: usize,
    #[arg(long, default_value_t = 200)]
    samples: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Target for e2e and size suites.
    #[arg(long, default_value = "hat111")]
    target: String,
    /// Norm order for e2e measurement: a number >= 1 or "inf".
    #[arg(long, default_value = "inf")]
    p: String,
    /// Accuracy target for the selection rows of the size suite.
    #[arg(long)]
    epsilon: Option<f64>,
}

#[derive(Args)]
struct SweepArgs {
    /// Sweep kind: product or basis.
    kind: String,
    #[arg(long, default_value_t = 4)]
    d: usize,
    #[arg(long, default_value_t = 1)]
    k: usize,
    #[arg(long, default_value_t = 4)]
    n_max: usize,
    #[arg(long, default_value_t = 100)]
    samples: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Output CSV path.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum ExportFormat {
    Json,
    Csv,
}

#[derive(Args)]
struct ExportArgs {
    #[arg(value_enum)]
    kind: BuildKind,
    #[arg(long, default_value_t = 2)]
    n: usize,
    #[arg(long, default_value_t = 4)]
    d: usize,
    #[arg(long, default_value_t = 1)]
    k: usize,
    #[arg(long, default_value_t = 1)]
    c: usize,
    #[arg(long, default_value = "hat111")]
    target: String,
    #[arg(long, value_enum, default_value_t = ExportFormat::Json)]
    format: ExportFormat,
    /// Output path.
    #[arg(long)]
    out: PathBuf,
}

fn parse_norm(text: &str) -> anyhow::Result<NormOrder> {
    match text {
        "inf" | "infinity" | "sup" => Ok(NormOrder::Infinity),
        other => {
            let value: f64 = other
                .parse()
                .with_context(|| format!("norm order '{other}' is neither a number nor 'inf'"))?;
            Ok(NormOrder::new(value)?)
        }
    }
}

fn construct(
    kind: BuildKind,
    n: usize,
    d: usize,
    k: usize,
    c: usize,
    target: &str,
) -> anyhow::Result<NetworkFile> {
    let file = match kind {
        BuildKind::Sq => {
            let sq = build_sq_net(n, c, d, k)?;
            NetworkFile::from_net(
                "sq",
                &sq.net,
                params_map(&[("c", c.to_string()), ("n", n.to_string())]),
                None,
            )
        }
        BuildKind::Prd => {
            // The standalone pairing stage: each entry multiplied with its
            // left neighbor.
            let net = build_half_reduction(1, Axis::Cols, n, d, k)?;
            NetworkFile::from_net("prd", &net, params_map(&[("n", n.to_string())]), None)
        }
        BuildKind::Product => {
            let product = build_product_net(n, d, k)?;
            NetworkFile::from_net("product", &product.net, params_map(&[("n", n.to_string())]), None)
        }
        BuildKind::Phi => {
            let li = targets::resolve_single_index(target, d * d, n as u32)?;
            let net = build_phi_net(&li, d, k)?;
            NetworkFile::from_net(
                "phi",
                &net,
                params_map(&[("index", li.to_string()), ("target", target.to_string())]),
                None,
            )
        }
        BuildKind::Basis => {
            let li = targets::resolve_single_index(target, d * d, n as u32)?;
            let basis = build_basis_net(&li, n, d, k)?;
            NetworkFile::from_net(
                "basis",
                &basis.net,
                params_map(&[
                    ("index", li.to_string()),
                    ("n", n.to_string()),
                    ("target", target.to_string()),
                ]),
                None,
            )
        }
        BuildKind::Approximator => {
            let expansion = targets::resolve(target, d * d, n as u32)?;
            let app = build_approximator(&expansion, n, d, k, TermPolicy::FullBudget)?;
            NetworkFile::from_hypothesis(
                "approximator",
                app.hypothesis(),
                params_map(&[("n", n.to_string()), ("target", target.to_string())]),
            )
        }
    };
    Ok(file)
}

fn print_structure(file: &NetworkFile) {
    let meta = &file.metadata;
    let width = meta.channel_sizes.iter().copied().max().unwrap_or(0);
    let weights: u64 = file
        .layers
        .iter()
        .map(|layer| {
            let kernel: u64 = layer
                .blocks
                .iter()
                .map(|b| {
                    b.free
                        .iter()
                        .map(|row| row.iter().filter(|f| **f).count() as u64)
                        .sum::<u64>()
                })
                .sum();
            kernel + layer.bias.free.iter().filter(|f| **f).count() as u64
        })
        .sum();
    println!("construction: {}", meta.construction);
    println!("d: {}, k: {}, input channels: {}", meta.d, meta.k, meta.input_channels);
    println!("depth: {} layers", meta.channel_sizes.len());
    println!("width: {width}");
    print!("free parameters: {weights} in layers");
    if let Some(r) = &file.readout {
        let alpha = r.alpha_free.iter().filter(|f| **f).count();
        let beta = u64::from(r.beta_free);
        println!(" + {alpha} readout + {beta} offset");
    } else {
        println!();
    }
    for (key, value) in &meta.params {
        println!("param {key}: {value}");
    }
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    match cli.cmd {
        Cmd::Build(a) => {
            let file = construct(a.kind, a.n, a.d, a.k, a.c, &a.target)?;
            print_structure(&file);
            if let Some(path) = a.out {
                std::fs::write(&path, file.to_json())
                    .with_context(|| format!("writing {}", path.display()))?;
                println!("wrote {}", path.display());
            }
            Ok(true)
        }
        Cmd::Verify(a) => {
            let params = verify::Params {
                d: a.d,
                k: a.k,
                n: a.n,
                n_max: a.n_max,
                samples: a.samples,
                seed: a.seed,
                target: a.target.clone(),
                p: parse_norm(&a.p)?,
                epsilon: a.epsilon,
            };
            let report = verify::run(&a.suite, &params)?;
            report.print(&a.suite);
            Ok(report.all_pass())
        }
        Cmd::Sweep(a) => {
            let outcome = sweep::run(&a.kind, a.d, a.k, a.n_max, a.samples, a.seed)?;
            std::fs::write(&a.out, &outcome.csv)
                .with_context(|| format!("writing {}", a.out.display()))?;
            println!(
                "wrote {} ({} rows)",
                a.out.display(),
                outcome.csv.lines().count() - 1
            );
            Ok(outcome.all_within_bound)
        }
        Cmd::Export(a) => {
            let file = construct(a.kind, a.n, a.d, a.k, a.c, &a.target)?;
            let text = match a.format {
                ExportFormat::Json => file.to_json(),
                ExportFormat::Csv => file.to_csv(),
            };
            std::fs::write(&a.out, text)
                .with_context(|| format!("writing {}", a.out.display()))?;
            println!("wrote {}", a.out.display());
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
