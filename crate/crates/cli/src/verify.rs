//! Verification suites: each run prints one row per check (measured value
//! against its bound) and fails the process with exit code 1 on any
//! violation. All randomness flows from the given seed; results are
//! identical for any thread count because inputs are generated sequentially
//! and only evaluation fans out.

use anyhow::bail;
use korobov_cnn::{
    basis_bound, basis_nd, build_approximator, build_basis_net, build_phi_net, build_product_net,
    build_selector, build_sq_net, eq5_rhs_log2, masking_oracle, measure_error, phi_oracle,
    prd_oracle, product_bound, select_n, size_bound_budgeted, size_bound_per_level, sq_oracle,
    theta_count, vectorize, DataTensor, LevelIndex, NormOrder, TermPolicy, UniformStream,
};

use crate::targets;

#[derive(Debug, Clone)]
pub struct CheckRow {
    pub check: String,
    pub measured: f64,
    pub bound: f64,
    pub pass: bool,
}

#[derive(Debug, Default)]
pub struct Report {
    pub rows: Vec<CheckRow>,
}

impl Report {
    fn push(&mut self, check: impl Into<String>, measured: f64, bound: f64) {
        let check = check.into();
        self.rows.push(CheckRow {
            check,
            measured,
            bound,
            pass: measured <= bound,
        });
    }

    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn print(&self, suite: &str) {
        println!("{:<58} {:>13} {:>13}  verdict", "check", "measured", "bound");
        for r in &self.rows {
            println!(
                "{:<58} {:>13.6e} {:>13.6e}  {}",
                r.check,
                r.measured,
                r.bound,
                if r.pass { "PASS" } else { "FAIL" }
            );
        }
        let passed = self.rows.iter().filter(|r| r.pass).count();
        println!("suite {suite}: {passed}/{} checks passed", self.rows.len());
    }
}

/// Evaluation fan-out cap: KOROBOV_CNN_THREADS when set, otherwise the
/// machine's parallelism.
fn thread_cap() -> usize {
    std::env::var("KOROBOV_CNN_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&t| t >= 1)
        .unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(std::num::NonZeroUsize::get)
                .unwrap_or(1)
        })
        .min(64)
}

/// Max of `eval` over `inputs`, fanned out across up to the thread cap.
/// The reduction is max, so chunking cannot change the result.
fn max_over<F>(inputs: &[DataTensor], eval: F) -> f64
where
    F: Fn(&DataTensor) -> f64 + Sync,
{
    let threads = thread_cap().min(inputs.len().max(1));
    if threads <= 1 {
        return inputs.iter().map(&eval).fold(0.0, f64::max);
    }
    let chunk = inputs.len().div_ceil(threads);
    std::thread::scope(|scope| {
        let workers: Vec<_> = inputs
            .chunks(chunk)
            .map(|part| scope.spawn(|| part.iter().map(&eval).fold(0.0, f64::max)))
            .collect();
        workers
            .into_iter()
            .map(|w| w.join().expect("evaluation worker panicked"))
            .fold(0.0, f64::max)
    })
}

fn sample_tensors(rng: &mut UniformStream, count: usize, channels: usize, d: usize) -> Vec<DataTensor> {
    (0..count).map(|_| rng.next_tensor(channels, d)).collect()
}

pub struct Params {
    pub d: usize,
    pub k: usize,
    pub n: usize,
    pub n_max: usize,
    pub samples: usize,
    pub seed: u64,
    pub target: String,
    pub p: NormOrder,
    pub epsilon: Option<f64>,
}

pub fn suite_sq(p: &Params) -> anyhow::Result<Report> {
    let mut report = Report::default();
    let mut rng = UniformStream::new(p.seed);
    for n in 1..=p.n_max {
        let bound = 0.25f64.powi(n as i32 + 1);
        let mut max_r: f64 = 0.0;
        let mut min_r: f64 = 0.0;
        for j in 0..=2_000u32 {
            let x = f64::from(j) / 2_000.0;
            let r = sq_oracle(n, x) - x * x;
            max_r = max_r.max(r);
            min_r = min_r.min(r);
        }
        report.push(format!("sq n={n} residual max on grid"), max_r, bound);
        report.push(format!("sq n={n} residual stays nonnegative"), -min_r, 0.0);

        let net = build_sq_net(n, 1, p.d, p.k)?;
        let inputs = sample_tensors(&mut rng, p.samples, 1, p.d);
        let diff = max_over(&inputs, |x| {
            let y = net.net.forward(x).expect("forward");
            let mut worst: f64 = 0.0;
            for m in 1..=p.d {
                for c in 1..=p.d {
                    worst = worst.max((y.get(1, m, c) - sq_oracle(n, x.get(1, m, c))).abs());
                }
            }
            worst
        });
        report.push(format!("sq n={n} network matches oracle"), diff, 1e-9);
    }
    Ok(report)
}

pub fn suite_prd(p: &Params) -> anyhow::Result<Report> {
    let mut report = Report::default();
    for n in 1..=p.n_max {
        let bound = 3.0 * 2f64.powi(-(2 * n as i32) - 1);
        let mut max_e: f64 = 0.0;
        for a in 0..=200u32 {
            for b in 0..=200u32 {
                let x = f64::from(a) / 200.0;
                let y = f64::from(b) / 200.0;
                max_e = max_e.max((prd_oracle(n, x, y) - x * y).abs());
            }
        }
        report.push(format!("prd n={n} |prd - xy| on grid"), max_e, bound);
        let mut zero_dev: f64 = 0.0;
        let mut one_dev: f64 = 0.0;
        for j in 0..=1_000u32 {
            let y = f64::from(j) / 1_000.0;
            zero_dev = zero_dev.max(prd_oracle(n, 0.0, y).abs());
            one_dev = one_dev.max((prd_oracle(n, 1.0, y) - y).abs());
        }
        report.push(format!("prd n={n} annihilates at zero"), zero_dev, 0.0);
        report.push(format!("prd n={n} fixes the unit argument"), one_dev, 1e-12);
    }
    Ok(report)
}

pub fn suite_product(p: &Params) -> anyhow::Result<Report> {
    let mut report = Report::default();
    let mut rng = UniformStream::new(p.seed);
    for n in 1..=p.n_max {
        let net = build_product_net(n, p.d, p.k)?;
        let inputs = sample_tensors(&mut rng, p.samples, 1, p.d);
        let measured = max_over(&inputs, |x| {
            let want: f64 = x.values().iter().product();
            (net.evaluate(x).expect("forward") - want).abs()
        });
        report.push(
            format!("product d={} n={n} error vs exact product", p.d),
            measured,
            product_bound(n, p.d),
        );
        let ones = DataTensor::constant(1, p.d, 1.0);
        report.push(
            format!("product d={} n={n} exact at all-ones", p.d),
            (net.evaluate(&ones)? - 1.0).abs(),
            0.0,
        );
        let mut zeroed = rng.next_tensor(1, p.d);
        zeroed.set(1, 1, 1, 0.0);
        report.push(
            format!("product d={} n={n} exact zero propagation", p.d),
            net.evaluate(&zeroed)?.abs(),
            0.0,
        );
    }
    Ok(report)
}

pub fn suite_selector(p: &Params) -> anyhow::Result<Report> {
    let mut report = Report::default();
    let mut rng = UniformStream::new(p.seed);
    let mut max_len = 0usize;
    let mut max_dev: f64 = 0.0;
    for m in 1..=p.d {
        for n in 1..=p.d {
            let plan = build_selector(m, n, p.d)?;
            max_len = max_len.max(plan.len());
            for _ in 0..3 {
                let x = rng.next_tensor(1, p.d);
                let got = plan.apply(&x)?;
                let want = masking_oracle(m, n, &x);
                for (a, b) in got.values().iter().zip(want.values()) {
                    max_dev = max_dev.max((a - b).abs());
                }
            }
        }
    }
    let len_bound = (5 * p.d - 2) / 2;
    report.push(
        format!("selector d={} max sequence length", p.d),
        max_len as f64,
        len_bound as f64,
    );
    report.push(
        format!("selector d={} masking equality", p.d),
        max_dev,
        0.0,
    );
    Ok(report)
}

fn representative_indices(dim: usize) -> Vec<LevelIndex> {
    let edit = |edits: &[(usize, u32, u64)]| {
        let mut l = vec![1u32; dim];
        let mut i = vec![1u64; dim];
        for &(j, lv, iv) in edits {
            l[j] = lv;
            i[j] = iv;
        }
        LevelIndex::new(l, i).expect("valid index")
    };
    vec![
        edit(&[]),
        edit(&[(0, 2, 1)]),
        edit(&[(dim / 2, 2, 3), (dim - 1, 3, 5)]),
    ]
}

pub fn suite_phi(p: &Params) -> anyhow::Result<Report> {
    let mut report = Report::default();
    let mut rng = UniformStream::new(p.seed);
    for (idx, li) in representative_indices(p.d * p.d).into_iter().enumerate() {
        let net = build_phi_net(&li, p.d, p.k)?;
        let inputs = sample_tensors(&mut rng, p.samples, 1, p.d);
        let measured = max_over(&inputs, |x| {
            let got = net.forward(x).expect("forward");
            let want = phi_oracle(&li, x).expect("oracle");
            got.values()
                .iter()
                .zip(want.values())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max)
        });
        report.push(
            format!("phi d={} index #{idx} network matches hats", p.d),
            measured,
            1e-9,
        );
    }
    Ok(report)
}

pub fn suite_basis(p: &Params) -> anyhow::Result<Report> {
    let mut report = Report::default();
    let mut rng = UniformStream::new(p.seed);
    for n in 1..=p.n_max {
        for (idx, li) in representative_indices(p.d * p.d).into_iter().enumerate() {
            let net = build_basis_net(&li, n, p.d, p.k)?;
            let inputs = sample_tensors(&mut rng, p.samples, 1, p.d);
            let measured = max_over(&inputs, |x| {
                let want = basis_nd(&li, &vectorize(x)).expect("basis value");
                (net.evaluate(x).expect("forward") - want).abs()
            });
            report.push(
                format!("basis d={} n={n} index #{idx} error", p.d),
                measured,
                basis_bound(n, p.d),
            );
        }
    }
    Ok(report)
}

pub fn suite_e2e(p: &Params) -> anyhow::Result<Report> {
    let mut report = Report::default();
    let expansion = targets::resolve(&p.target, p.d * p.d, p.n as u32)?;
    let app = build_approximator(&expansion, p.n, p.d, p.k, TermPolicy::ExpansionOnly)?;
    let mass = expansion.abs_coefficient_sum();
    let reference = expansion.clone();
    let f = move |x: &[f64]| reference.eval(x).expect("reference");
    let rep = measure_error(&app, &f, p.p, p.samples, p.seed)?;
    report.push(
        format!(
            "e2e target={} d={} n={} error vs truncation ({} points)",
            p.target, p.d, p.n, rep.points
        ),
        rep.error,
        basis_bound(p.n, p.d) * mass,
    );
    Ok(report)
}

pub fn suite_size(p: &Params) -> anyhow::Result<Report> {
    let mut report = Report::default();
    let expansion = targets::resolve(&p.target, p.d * p.d, p.n as u32)?;
    let app = build_approximator(&expansion, p.n, p.d, p.k, TermPolicy::FullBudget)?;
    let theta = theta_count(p.d * p.d, p.n as u32);
    let levels = (p.d as f64).log2().ceil() as usize;
    report.push(
        format!("size d={} n={} width identity", p.d, p.n),
        (app.width() as f64 - (2 * theta * (p.d * p.d) as u64) as f64).abs(),
        0.0,
    );
    report.push(
        format!("size d={} n={} depth identity", p.d, p.n),
        (app.depth() as f64 - (2 * (2 * p.n + 3) * levels + 6 * p.d) as f64).abs(),
        0.0,
    );
    report.push(
        format!("size d={} n={} budgeted bound (N = theta_n)", p.d, p.n),
        app.size() as f64,
        size_bound_budgeted(p.k, p.d, theta),
    );
    report.push(
        format!("size d={} n={} per-level bound", p.d, p.n),
        app.size() as f64,
        size_bound_per_level(p.k, p.d, p.n, theta),
    );
    if let Some(eps) = p.epsilon {
        let sel = select_n(eps, p.p, p.d)?;
        report.push(
            format!("selection eps={eps} validity (eta <= 1/3)"),
            sel.eta,
            1.0 / 3.0,
        );
        report.push(
            format!("selection eps={eps} bound under target (log2 space)"),
            eq5_rhs_log2(sel.log2_n, p.p, p.d),
            eps.log2(),
        );
    }
    Ok(report)
}

pub fn run(suite: &str, p: &Params) -> anyhow::Result<Report> {
    match suite {
        "sq" => suite_sq(p),
        "prd" => suite_prd(p),
        "product" => suite_product(p),
        "selector" => suite_selector(p),
        "phi" => suite_phi(p),
        "basis" => suite_basis(p),
        "e2e" => suite_e2e(p),
        "size" => suite_size(p),
        other => bail!(
            "unknown suite '{other}' (expected sq, prd, product, selector, phi, basis, e2e, size)"
        ),
    }
}
