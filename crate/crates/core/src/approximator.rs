//! Full approximator assembly: duplicate the input across channels, run one
//! basis network per hierarchical index, and read the per-channel (d, d)
//! entries out with the expansion coefficients.
//!
//! Channel c carries the basis network of the c-th index in the fixed
//! enumeration order, so the readout vector is free exactly at positions
//! c d^2 and the whole function is sum_c v_c [g_c(X)]_{d,d}.

use std::ops::Range;

use crate::basis::{build_basis_net, tensor_from_point, BasisNet};
use crate::error::{Error, Result};
use crate::grid::{enumerate_indices, theta_count, LevelIndex, NormOrder, SparseExpansion};
use crate::network::{ConvLayer, ConvNet, HypothesisFunction};
use crate::rng::UniformStream;
use crate::tensor::{BiasVector, ConvKernel, DataTensor};

/// Which indices get a basis-network channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TermPolicy {
    /// One channel for every index in the level budget, as the width and
    /// size statements assume. Width 2 theta_n d^2.
    FullBudget,
    /// Channels only for the expansion's own terms. Pointwise identical to
    /// FullBudget (missing channels would be read out with coefficient 0)
    /// and the only feasible choice when theta_n is large.
    ExpansionOnly,
}

/// The assembled network plus the expansion it realizes.
#[derive(Debug, Clone)]
pub struct KorobovApproximator {
    n: usize,
    d: usize,
    k: usize,
    policy: TermPolicy,
    expansion: SparseExpansion,
    channels: Vec<LevelIndex>,
    h: HypothesisFunction,
    segments: Vec<(&'static str, Range<usize>)>,
}

impl KorobovApproximator {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn policy(&self) -> TermPolicy {
        self.policy
    }

    pub fn expansion(&self) -> &SparseExpansion {
        &self.expansion
    }

    /// Index realized by each output channel, in channel order.
    pub fn channels(&self) -> &[LevelIndex] {
        &self.channels
    }

    pub fn hypothesis(&self) -> &HypothesisFunction {
        &self.h
    }

    pub fn width(&self) -> usize {
        self.h.net.width()
    }

    pub fn depth(&self) -> usize {
        self.h.net.depth()
    }

    pub fn size(&self) -> u64 {
        self.h.size()
    }

    pub fn evaluate(&self, x: &DataTensor) -> Result<f64> {
        self.h.evaluate(x)
    }

    /// Truncated expansion the network approximates, at a vectorized point.
    pub fn target(&self, x: &[f64]) -> Result<f64> {
        self.expansion.eval(x)
    }
}

/// Builds the approximator. The network is the duplication layer, the
/// concatenated basis networks, and d - 1 trailing identity layers, giving
/// depth exactly 2(2n + 3) log2(d) + 6d; under TermPolicy::FullBudget the
/// width is exactly 2 theta_n d^2. An empty channel list (empty expansion
/// under ExpansionOnly) degenerates to the zero function over an empty net.
pub fn build_approximator(
    expansion: &SparseExpansion,
    n: usize,
    d: usize,
    k: usize,
    policy: TermPolicy,
) -> Result<KorobovApproximator> {
    if expansion.dim() != d * d {
        return Err(Error::DimensionMismatch {
            context: "expansion dimension",
            expected: d * d,
            got: expansion.dim(),
        });
    }
    let budget = n as u64 + (d * d) as u64 - 1;
    for (li, _) in expansion.terms() {
        if u64::from(li.level_sum()) > budget {
            return Err(Error::BudgetExceeded(li.to_string(), budget));
        }
    }

    let channels: Vec<LevelIndex> = match policy {
        TermPolicy::FullBudget => enumerate_indices(d * d, n as u32)?,
        TermPolicy::ExpansionOnly => {
            let mut terms: Vec<LevelIndex> =
                expansion.terms().iter().map(|(li, _)| li.clone()).collect();
            terms.sort_by_key(|li| {
                (
                    li.level_sum(),
                    li.levels().to_vec(),
                    li.positions().to_vec(),
                )
            });
            terms
        }
    };

    if channels.is_empty() {
        let net = ConvNet::empty(1, d, k);
        let h = HypothesisFunction::with_masks(net, vec![0.0; d * d], vec![false; d * d], 0.0, false)?;
        return Ok(KorobovApproximator {
            n,
            d,
            k,
            policy,
            expansion: expansion.clone(),
            channels,
            h,
            segments: Vec::new(),
        });
    }

    let theta = channels.len();

    // Duplication layer: theta copies of the input on separate channels.
    let mut dup = ConvKernel::new(theta, 1, k);
    for c in 1..=theta {
        dup.place(c, 1, 0, 0, 1.0)?;
    }
    let mut net = ConvNet::empty(1, d, k);
    net.push_layer(ConvLayer::new(dup, BiasVector::zeros(theta))?)?;

    let basis_nets: Vec<BasisNet> = channels
        .iter()
        .map(|li| build_basis_net(li, n, d, k))
        .collect::<Result<_>>()?;
    let refs: Vec<&ConvNet> = basis_nets.iter().map(|b| &b.net).collect();
    let stage = ConvNet::concatenate_many(&refs)?;
    let basis_depth = stage.depth();
    let net = net.compose(&stage)?;
    let before_padding = net.depth();
    let net = net.deepen(before_padding + d - 1)?;

    let segments = vec![
        ("input-duplication", 0..1),
        ("basis-stage", 1..1 + basis_depth),
        ("depth-padding", 1 + basis_depth..1 + basis_depth + d - 1),
    ];

    // Readout: free exactly at the (d, d) slot of each channel.
    let len = theta * d * d;
    let mut alpha = vec![0.0; len];
    let mut alpha_free = vec![false; len];
    for (c, li) in channels.iter().enumerate() {
        let at = (c + 1) * d * d - 1;
        alpha[at] = expansion.coefficient(li);
        alpha_free[at] = true;
    }
    let h = HypothesisFunction::with_masks(net, alpha, alpha_free, 0.0, false)?;

    let p = d.trailing_zeros() as usize;
    debug_assert_eq!(h.net.depth(), 2 * (2 * n + 3) * p + 6 * d);

    Ok(KorobovApproximator {
        n,
        d,
        k,
        policy,
        expansion: expansion.clone(),
        channels,
        h,
        segments,
    })
}

/// Size claim used for the headline bound: 24 (2k+1)^2 d^5 N log2(N).
pub fn size_bound_budgeted(k: usize, d: usize, big_n: u64) -> f64 {
    let kk = (2 * k + 1).pow(2) as f64;
    24.0 * kk * (d as f64).powi(5) * big_n as f64 * (big_n as f64).log2()
}

/// Per-level form of the same chain: 24 (2k+1)^2 d^5 n theta_n.
pub fn size_bound_per_level(k: usize, d: usize, n: usize, theta: u64) -> f64 {
    let kk = (2 * k + 1).pow(2) as f64;
    24.0 * kk * (d as f64).powi(5) * n as f64 * theta as f64
}

#[derive(Debug, Clone)]
pub struct SizeReport {
    pub size: u64,
    pub theta: u64,
    pub bound: f64,
    pub pass: bool,
    pub per_level_bound: f64,
    pub per_level_pass: bool,
    pub breakdown: Vec<(String, u64)>,
}

/// Compares the built size against the budgeted bound with the given N and
/// against the per-level form, with a per-module breakdown that sums to the
/// total. Requires N to cover the built channels.
pub fn check_size_bound(app: &KorobovApproximator, big_n: u64) -> Result<SizeReport> {
    if (app.channels.len() as u64) > big_n {
        return Err(Error::Unsupported(
            "N must be at least the number of built channels",
        ));
    }
    let mut breakdown: Vec<(String, u64)> = app
        .segments
        .iter()
        .map(|(name, range)| (name.to_string(), app.h.net.size_of_layers(range.clone())))
        .collect();
    let readout = app.h.size() - app.h.net.size();
    breakdown.push(("readout".to_string(), readout));

    let size = app.size();
    let bound = size_bound_budgeted(app.k, app.d, big_n);
    let theta = theta_count(app.d * app.d, app.n as u32);
    let per_level_bound = size_bound_per_level(app.k, app.d, app.n, theta);
    Ok(SizeReport {
        size,
        theta,
        bound,
        pass: (size as f64) <= bound,
        per_level_bound,
        per_level_pass: (size as f64) <= per_level_bound,
        breakdown,
    })
}

/// Channel count selected for accuracy epsilon, kept in log2 space because
/// the value overflows f64 range for small epsilon.
#[derive(Debug, Clone, Copy)]
pub struct Selection {
    /// ceil of the closed-form value; f64::INFINITY when it overflows.
    pub n_value: f64,
    /// log2 of the (pre-ceiling) closed-form value.
    pub log2_n: f64,
    pub beta: f64,
    pub gamma: f64,
    pub eta: f64,
}

fn p_ratios(p: NormOrder) -> (f64, f64, f64) {
    match p {
        NormOrder::Infinity => (0.0, 0.5, 1.5),
        NormOrder::Finite(p) => (
            1.0 / p,
            p / (2.0 * p - 1.0),
            (3.0 * p - 1.0) / (2.0 * p - 1.0),
        ),
    }
}

/// N = ceil((6 beta log2 beta)^beta (1/gamma) ((3p-1)/(2p-1))^beta
/// epsilon^{-p/(2p-1)} |log2 epsilon|^beta) with
/// beta = ((3p-1)/(2p-1))(d^2-1) and gamma = (2^{(1-1/p)d^2-2})^{p/(2p-1)}.
///
/// Valid only while the induced eta = gamma epsilon^{p/(2p-1)} stays at or
/// below 1/3; outside that range the guarantee has no backing and the call
/// reports the violation instead of returning a number.
pub fn select_n(epsilon: f64, p: NormOrder, d: usize) -> Result<Selection> {
    if p.value() < 2.0 {
        return Err(Error::Unsupported("the size selection requires p in [2, inf]"));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::Unsupported("epsilon must lie strictly inside (0, 1)"));
    }
    let (inv_p, r, c) = p_ratios(p);
    let dd = (d * d) as f64;
    let beta = c * (dd - 1.0);
    if beta <= 2.0 {
        return Err(Error::Unsupported("the selection bound needs beta > 2"));
    }
    let log2_gamma = ((1.0 - inv_p) * dd - 2.0) * r;
    let gamma = 2f64.powf(log2_gamma);
    let log2_eta = log2_gamma + r * epsilon.log2();
    let eta = 2f64.powf(log2_eta);
    if eta > 1.0 / 3.0 {
        return Err(Error::EpsilonOutOfRange {
            epsilon,
            p: p.value(),
            d,
            eta,
        });
    }
    let abs_log2_eps = -epsilon.log2();
    let log2_n = beta * (6.0 * beta * beta.log2()).log2() - log2_gamma
        + beta * c.log2()
        + r * abs_log2_eps
        + beta * abs_log2_eps.log2();
    let n_value = 2f64.powf(log2_n).ceil();
    Ok(Selection {
        n_value,
        log2_n,
        beta,
        gamma,
        eta,
    })
}

/// log2 of the headline error bound 4 / 2^{(1-1/p)d^2} *
/// (log2 N)^{(3-1/p)(d^2-1)} / N^{(2-1/p)}, taking N in log2 space.
pub fn eq5_rhs_log2(log2_n: f64, p: NormOrder, d: usize) -> f64 {
    let (inv_p, _, _) = p_ratios(p);
    let dd = (d * d) as f64;
    2.0 - (1.0 - inv_p) * dd + (3.0 - inv_p) * (dd - 1.0) * log2_n.log2()
        - (2.0 - inv_p) * log2_n
}

#[derive(Debug, Clone)]
pub struct ErrorReport {
    pub error: f64,
    /// Standard error of the Monte Carlo estimate (finite p only).
    pub std_err: Option<f64>,
    pub points: usize,
}

/// Measures the deviation between the approximator and a reference function
/// of the vectorized input.
///
/// For the sup norm the probe set is structured: each channel's grid point,
/// per-axis half-cell offsets and the two diagonal half-cell offsets (where
/// hat interpolation errors peak), plus seeded uniform samples. For finite p
/// the estimate is plain Monte Carlo with a delta-method standard error.
pub fn measure_error(
    app: &KorobovApproximator,
    f_ref: &dyn Fn(&[f64]) -> f64,
    p: NormOrder,
    samples: usize,
    seed: u64,
) -> Result<ErrorReport> {
    let d = app.d;
    let mut rng = UniformStream::new(seed);
    match p {
        NormOrder::Infinity => {
            let mut worst: f64 = 0.0;
            let mut points = 0;
            let probe = |x: &[f64], app: &KorobovApproximator| -> Result<f64> {
                let t = tensor_from_point(x, d)?;
                Ok((f_ref(x) - app.evaluate(&t)?).abs())
            };
            for li in &app.channels {
                let center = li.grid_point();
                let mut trial = |x: &[f64]| -> Result<()> {
                    worst = worst.max(probe(x, app)?);
                    points += 1;
                    Ok(())
                };
                trial(&center)?;
                for j in 0..center.len() {
                    let h = 2f64.powi(-(li.levels()[j] as i32));
                    for sign in [-1.0, 1.0] {
                        let mut x = center.clone();
                        x[j] += sign * h / 2.0;
                        trial(&x)?;
                    }
                }
                for sign in [-1.0, 1.0] {
                    let x: Vec<f64> = center
                        .iter()
                        .zip(li.levels())
                        .map(|(&c, &l)| c + sign * 2f64.powi(-(l as i32)) / 2.0)
                        .collect();
                    trial(&x)?;
                }
                // Extremal-cell probes: every hat value at 1 - 2^{-n-1} puts
                // the squaring stages mid-cell, where the interpolation
                // residual peaks; uniform samples rarely land there because
                // high-dimensional products collapse toward zero.
                let off = 2f64.powi(-(app.n as i32) - 1);
                for sign in [-1.0, 1.0] {
                    let x: Vec<f64> = center
                        .iter()
                        .zip(li.levels())
                        .map(|(&c, &l)| c + sign * 2f64.powi(-(l as i32)) * off)
                        .collect();
                    trial(&x)?;
                }
            }
            for _ in 0..samples {
                let x = rng.next_point(d * d);
                worst = worst.max(probe(&x, app)?);
                points += 1;
            }
            Ok(ErrorReport {
                error: worst,
                std_err: None,
                points,
            })
        }
        NormOrder::Finite(pv) => {
            if samples == 0 {
                return Err(Error::Unsupported("finite-p error needs samples >= 1"));
            }
            let mut sum = 0.0;
            let mut sum_sq = 0.0;
            for _ in 0..samples {
                let x = rng.next_point(d * d);
                let t = tensor_from_point(&x, d)?;
                let diff = (f_ref(&x) - app.evaluate(&t)?).abs().powf(pv);
                sum += diff;
                sum_sq += diff * diff;
            }
            let mean = sum / samples as f64;
            let var = (sum_sq / samples as f64 - mean * mean).max(0.0);
            let se_mean = (var / samples as f64).sqrt();
            let error = mean.powf(1.0 / pv);
            let std_err = if mean > 0.0 {
                se_mean * error / (pv * mean)
            } else {
                0.0
            };
            Ok(ErrorReport {
                error,
                std_err: Some(std_err),
                points: samples,
            })
        }
    }
}
