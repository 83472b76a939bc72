//! Parameter sweeps emitting one CSV row per configuration. Identical seed
//! and parameters give byte-identical output except for the wall-time
//! column.

use std::time::Instant;

use anyhow::bail;
use korobov_cnn::{
    basis_bound, basis_nd, build_basis_net, build_product_net, product_bound, vectorize,
    DataTensor, LevelIndex, UniformStream,
};

pub const CSV_HEADER: &str = "n,d,k,bound,measured_error,samples,seed,wall_time_ms";

/// Mid-cell values near 1. The squaring stages interpolate on a grid of
/// pitch 2^{-n} and their residual peaks halfway between knots, so these
/// values expose the worst case; staying near 1 keeps every pairwise
/// product above the scale where small inputs flatten to exact zero and
/// would hide the n-dependence of the error.
fn midcell_values(n: usize) -> Vec<f64> {
    let step = 2f64.powi(-(n as i32 + 1));
    let mut values: Vec<f64> = (0..1usize << n.min(4))
        .map(|m| 1.0 - (2 * m + 1) as f64 * step)
        .filter(|v| *v > 0.0)
        .collect();
    // Geometric approach to 1: at coarse n the exact product of many
    // near-1 factors stays large while the network underestimates it,
    // which is where the coarse-grid error actually peaks.
    values.extend((1..=12).map(|j| 1.0 - 2f64.powi(-j)));
    values
}

pub struct SweepOutcome {
    pub csv: String,
    pub all_within_bound: bool,
}

/// Runs the sweep for n = 1..=n_max. `kind` is `product` (error of the
/// product network against the exact product) or `basis` (error of the
/// level-one basis network against the exact basis function).
pub fn run(
    kind: &str,
    d: usize,
    k: usize,
    n_max: usize,
    samples: usize,
    seed: u64,
) -> anyhow::Result<SweepOutcome> {
    if n_max < 1 {
        bail!("empty sweep range: n-max must be at least 1");
    }
    let mut csv = String::from(CSV_HEADER);
    csv.push('\n');
    let mut all_within = true;
    for n in 1..=n_max {
        let start = Instant::now();
        let mut rng = UniformStream::new(seed);
        let (bound, measured) = match kind {
            "product" => {
                let net = build_product_net(n, d, k)?;
                let mut worst: f64 = 0.0;
                let mut trial = |x: &DataTensor| -> anyhow::Result<()> {
                    let want: f64 = x.values().iter().product();
                    worst = worst.max((net.evaluate(x)? - want).abs());
                    Ok(())
                };
                for v in midcell_values(n) {
                    trial(&DataTensor::constant(1, d, v))?;
                }
                for _ in 0..samples {
                    trial(&rng.next_tensor(1, d))?;
                }
                (product_bound(n, d), worst)
            }
            "basis" => {
                let li = LevelIndex::new(vec![1; d * d], vec![1; d * d])?;
                let net = build_basis_net(&li, n, d, k)?;
                let mut worst: f64 = 0.0;
                let mut trial = |x: &DataTensor| -> anyhow::Result<()> {
                    let want = basis_nd(&li, &vectorize(x))?;
                    worst = worst.max((net.evaluate(x)? - want).abs());
                    Ok(())
                };
                // Level-one hats take value v at x = v/2 and 1 - v/2.
                for v in midcell_values(n) {
                    for x in [v / 2.0, 1.0 - v / 2.0] {
                        trial(&DataTensor::constant(1, d, x))?;
                    }
                }
                for _ in 0..samples {
                    trial(&rng.next_tensor(1, d))?;
                }
                (basis_bound(n, d), worst)
            }
            other => bail!("unknown sweep kind '{other}' (expected product or basis)"),
        };
        if measured > bound {
            all_within = false;
        }
        let wall = start.elapsed().as_millis();
        csv.push_str(&format!(
            "{n},{d},{k},{bound},{measured},{samples},{seed},{wall}\n"
        ));
    }
    Ok(SweepOutcome {
        csv,
        all_within_bound: all_within,
    })
}
