//! Scalar building blocks: the piecewise-linear squaring approximant and the
//! product gadget built from it, both as closed-form oracles and as explicit
//! ReLU convolution networks acting channel-wise.
//!
//! The approximant sq_n is the linear interpolant of x^2 at the dyadic grid
//! l / 2^n, obtained by peeling scaled sawtooth iterates off the identity:
//! sq_n(x) = x - sum_{m=1..n} 4^{-m} g_m(x), where g is the unit hat
//! g(x) = 2 relu(x) - 4 relu(x - 1/2) + 2 relu(x - 1) and g_m its m-fold
//! composition. The residual satisfies 0 <= sq_n(x) - x^2 <= 4^{-(n+1)} on
//! [0, 1].
//!
//! The product gadget recovers xy from three squarings:
//! prd_n(x, y) = 2 (sq_n((x+y)/2) - sq_n(x/2) - sq_n(y/2)), with
//! |prd_n(x, y) - xy| <= 3 * 2^{-2n-1}, prd_n(0, y) = prd_n(x, 0) = 0 and
//! prd_n(1, y) = y exactly.

use crate::error::{Error, Result};
use crate::network::{ConvLayer, ConvNet};
use crate::tensor::{BiasVector, ConvKernel};

/// Unit hat 2 relu(x) - 4 relu(x - 1/2) + 2 relu(x - 1), evaluated literally
/// (no clamping; the formula extends past [0, 1] as written).
pub fn hat_g(x: f64) -> f64 {
    2.0 * x.max(0.0) - 4.0 * (x - 0.5).max(0.0) + 2.0 * (x - 1.0).max(0.0)
}

/// m-fold composition g(g(...g(x))); m >= 1.
pub fn hat_g_iterate(m: usize, x: f64) -> f64 {
    let mut v = x;
    for _ in 0..m {
        v = hat_g(v);
    }
    v
}

/// Interpolant form of sq_n: locate the dyadic cell and blend the endpoint
/// squares. Domain [0, 1], n >= 1.
pub fn sq_oracle(n: usize, x: f64) -> f64 {
    assert!(n >= 1, "sq_oracle needs n >= 1");
    assert!((0.0..=1.0).contains(&x), "sq_oracle domain is [0,1]");
    let cells = (1u64 << n) as f64;
    let scaled = x * cells;
    let cell = (scaled.floor() as u64).min((1 << n) - 1);
    let left = cell as f64 / cells;
    let right = (cell + 1) as f64 / cells;
    let t = scaled - cell as f64;
    (1.0 - t) * (left * left) + t * (right * right)
}

/// Sawtooth-sum form of sq_n, kept as an independent cross-check of the
/// interpolant: x - sum 4^{-m} g_m(x).
pub fn sq_from_sawtooth(n: usize, x: f64) -> f64 {
    assert!(n >= 1);
    let mut acc = x;
    let mut g = x;
    let mut scale = 1.0;
    for _ in 1..=n {
        g = hat_g(g);
        scale *= 0.25;
        acc -= scale * g;
    }
    acc
}

/// Product gadget oracle via three squarings.
pub fn prd_oracle(n: usize, x: f64, y: f64) -> f64 {
    2.0 * (sq_oracle(n, (x + y) / 2.0) - sq_oracle(n, x / 2.0) - sq_oracle(n, y / 2.0))
}

/// Channel-wise squaring network.
///
/// Acting on c channels the layer sequence is: duplicate to 2c lanes
/// (running value; sawtooth), then per stage m split the sawtooth lane into
/// relu(g), relu(g - 1/2), relu(g - 1) (4c lanes) and recombine into the
/// updated running value and the next sawtooth (2c lanes), and finally
/// project back to the first c lanes. Depth 2(n+1), hidden width 4c; for
/// inputs in [0, 1] outputs stay in [0, 1] and every ReLU on the running
/// lane is inactive.
#[derive(Debug, Clone)]
pub struct SqNet {
    pub n: usize,
    pub channels: usize,
    pub net: ConvNet,
}

pub fn build_sq_net(n: usize, channels: usize, d: usize, k: usize) -> Result<SqNet> {
    if n < 1 {
        return Err(Error::BadSqDepth { n });
    }
    if channels == 0 {
        return Err(Error::ShapeMismatch {
            context: "sq channels",
            expected: 1,
            got: 0,
        });
    }
    let c = channels;
    let mut net = ConvNet::empty(c, d, k);

    // Duplicate: lanes 1..c running value, lanes c+1..2c sawtooth seed.
    let mut dup = ConvKernel::new(2 * c, c, k);
    for j in 1..=c {
        dup.place(j, j, 0, 0, 1.0)?;
        dup.place(c + j, j, 0, 0, 1.0)?;
    }
    net.push_layer(ConvLayer::new(dup, BiasVector::zeros(2 * c))?)?;

    for m in 1..=n {
        // Split: (value; g) -> (value; relu(g); relu(g - 1/2); relu(g - 1)).
        let mut split = ConvKernel::new(4 * c, 2 * c, k);
        let mut split_bias = BiasVector::zeros(4 * c);
        for j in 1..=c {
            split.place(j, j, 0, 0, 1.0)?;
            split.place(c + j, c + j, 0, 0, 1.0)?;
            split.place(2 * c + j, c + j, 0, 0, 1.0)?;
            split.place(3 * c + j, c + j, 0, 0, 1.0)?;
            split_bias.place(2 * c + j, -0.5)?;
            split_bias.place(3 * c + j, -1.0)?;
        }
        net.push_layer(ConvLayer::new(split, split_bias)?)?;

        // Recombine: value -= 4^{-m} g_m, sawtooth g_m = 2a - 4b + 2c.
        let lo = -(2f64.powi(1 - 2 * m as i32));
        let hi = 2f64.powi(2 - 2 * m as i32);
        let mut merge = ConvKernel::new(2 * c, 4 * c, k);
        for j in 1..=c {
            merge.place(j, j, 0, 0, 1.0)?;
            merge.place(j, c + j, 0, 0, lo)?;
            merge.place(j, 2 * c + j, 0, 0, hi)?;
            merge.place(j, 3 * c + j, 0, 0, lo)?;
            merge.place(c + j, c + j, 0, 0, 2.0)?;
            merge.place(c + j, 2 * c + j, 0, 0, -4.0)?;
            merge.place(c + j, 3 * c + j, 0, 0, 2.0)?;
        }
        net.push_layer(ConvLayer::new(merge, BiasVector::zeros(2 * c))?)?;
    }

    // Project the running lanes back out.
    let mut proj = ConvKernel::new(c, 2 * c, k);
    for j in 1..=c {
        proj.place(j, j, 0, 0, 1.0)?;
    }
    net.push_layer(ConvLayer::new(proj, BiasVector::zeros(c))?)?;

    debug_assert_eq!(net.depth(), 2 * (n + 1));
    debug_assert_eq!(net.width(), 4 * c);
    Ok(SqNet {
        n,
        channels: c,
        net,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::UniformStream;
    use crate::tensor::DataTensor;

    #[test]
    fn hat_values() {
        assert_eq!(hat_g(0.0), 0.0);
        assert_eq!(hat_g(0.5), 1.0);
        assert_eq!(hat_g(1.0), 0.0);
        assert_eq!(hat_g(0.75), 0.5);
        assert_eq!(hat_g(0.25), 0.5);
    }

    #[test]
    fn iterated_hat_hits_sawtooth_breakpoints() {
        // g_m is the sawtooth of period 2^{1-m}: at x = j/2^m it is 1 for odd
        // j and 0 for even j.
        for m in 1..=6usize {
            for j in 0..=(1u64 << m) {
                let x = j as f64 / (1u64 << m) as f64;
                let expected = if j % 2 == 1 { 1.0 } else { 0.0 };
                assert_eq!(hat_g_iterate(m, x), expected, "m={m} j={j}");
            }
        }
    }

    #[test]
    fn sq_oracle_exact_at_breakpoints() {
        for n in 1..=6usize {
            for l in 0..=(1u64 << n) {
                let x = l as f64 / (1u64 << n) as f64;
                assert_eq!(sq_oracle(n, x), x * x, "n={n} l={l}");
            }
        }
    }

    #[test]
    fn sq_oracle_midpoint_value() {
        // sq_1(1/4) interpolates between 0 and 1/4: exactly 1/8.
        assert_eq!(sq_oracle(1, 0.25), 0.125);
    }

    #[test]
    fn sq_forms_agree() {
        let mut rng = UniformStream::new(31);
        for n in 1..=8usize {
            for _ in 0..200 {
                let x = rng.next_unit();
                let a = sq_oracle(n, x);
                let b = sq_from_sawtooth(n, x);
                assert!((a - b).abs() <= 1e-12, "n={n} x={x}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn sq_residual_band() {
        for n in 1..=8usize {
            let bound = 0.25f64.powi(n as i32 + 1);
            for j in 0..=2000u64 {
                let x = j as f64 / 2000.0;
                let r = sq_oracle(n, x) - x * x;
                assert!(r >= 0.0, "n={n} x={x} residual {r}");
                assert!(r <= bound + 1e-12, "n={n} x={x} residual {r} > {bound}");
            }
        }
    }

    #[test]
    fn prd_identities_and_bound() {
        let mut rng = UniformStream::new(32);
        for n in 1..=6usize {
            let bound = 3.0 * 2f64.powi(-(2 * n as i32) - 1);
            for _ in 0..500 {
                let x = rng.next_unit();
                let y = rng.next_unit();
                assert_eq!(prd_oracle(n, 0.0, y), 0.0);
                assert_eq!(prd_oracle(n, x, 0.0), 0.0);
                assert!((prd_oracle(n, 1.0, y) - y).abs() <= 1e-12);
                assert!((prd_oracle(n, x, 1.0) - x).abs() <= 1e-12);
                let p = prd_oracle(n, x, y);
                assert!((p - x * y).abs() <= bound + 1e-12);
                assert!((0.0..=1.0).contains(&p), "range closure failed: {p}");
                // Swapping arguments swaps the two subtracted squares, so
                // symmetry holds only up to rounding of that reordering.
                assert!((p - prd_oracle(n, y, x)).abs() <= 1e-15);
            }
        }
    }

    #[test]
    fn sq_net_structure() {
        for n in 1..=4usize {
            for c in [1usize, 3] {
                let sq = build_sq_net(n, c, 4, 1).unwrap();
                assert_eq!(sq.net.depth(), 2 * (n + 1));
                assert_eq!(sq.net.width(), 4 * c);
                assert_eq!(sq.net.input_channels(), c);
                assert_eq!(sq.net.out_channels(), c);
            }
        }
        assert!(matches!(
            build_sq_net(0, 1, 4, 1),
            Err(Error::BadSqDepth { .. })
        ));
    }

    #[test]
    fn sq_net_matches_oracle() {
        let mut rng = UniformStream::new(33);
        for n in 1..=5usize {
            let sq = build_sq_net(n, 2, 3, 1).unwrap();
            for _ in 0..100 {
                let x = rng.next_tensor(2, 3);
                let y = sq.net.forward(&x).unwrap();
                for q in 1..=2 {
                    for m in 1..=3 {
                        for nn in 1..=3 {
                            let want = sq_oracle(n, x.get(q, m, nn));
                            let got = y.get(q, m, nn);
                            assert!(
                                (want - got).abs() <= 1e-10,
                                "n={n}: {got} vs oracle {want}"
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn sq_net_fixed_points() {
        let sq = build_sq_net(3, 1, 2, 1).unwrap();
        let zeros = DataTensor::zeros(1, 2);
        assert_eq!(sq.net.forward(&zeros).unwrap(), zeros);
        let ones = DataTensor::constant(1, 2, 1.0);
        assert_eq!(sq.net.forward(&ones).unwrap(), ones);
    }

    #[test]
    fn sq_net_output_in_unit_interval() {
        let mut rng = UniformStream::new(34);
        let sq = build_sq_net(4, 1, 4, 1).unwrap();
        for _ in 0..100 {
            let x = rng.next_tensor(1, 4);
            let y = sq.net.forward(&x).unwrap();
            for v in y.values() {
                assert!((0.0..=1.0).contains(v));
            }
        }
    }
}
