//! Network computing the product of all d^2 entries of a [0, 1]-valued map.
//!
//! The reduction works one axis at a time on a single channel. Stage q of an
//! axis pairs each position with the one 2^{q-1} earlier along the axis and
//! replaces the value by an approximate product of the pair: three halved
//! lanes (average; partner; self) feed a channel-wise squaring network and a
//! final combination 2a - 2b - 2c realizes prd(x, y) = 2(sq((x+y)/2) -
//! sq(x/2) - sq(y/2)). Positions whose pair window leaves the grid absorb
//! the zero padding exactly, so after log2(d) stages per axis the running
//! product of the whole tensor sits at position (d, d) and a hard zero or an
//! all-ones input propagates bit-exactly.

use crate::error::{Error, Result};
use crate::network::{ConvLayer, ConvNet};
use crate::scalar::build_sq_net;
use crate::tensor::{BiasVector, ConvKernel, DataTensor};

/// Reduction axis; the offset is the unit step toward the paired partner.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    /// Pair with the previous column; products accumulate toward column d.
    Cols,
    /// Pair with the previous row; products accumulate toward row d.
    Rows,
}

impl Axis {
    pub fn offset(self) -> (i64, i64) {
        match self {
            Axis::Cols => (0, -1),
            Axis::Rows => (-1, 0),
        }
    }
}

/// 3 x 1 opener used by the first stage: the partner is one step away, so
/// pairing and halving happen in a single layer.
pub fn kernel_avg3(axis: Axis, k: usize) -> Result<ConvKernel> {
    let (s, t) = axis.offset();
    let mut kernel = ConvKernel::new(3, 1, k);
    kernel.place(1, 1, 0, 0, 0.5)?;
    kernel.place(1, 1, s, t, 0.5)?;
    kernel.place(2, 1, s, t, 0.5)?;
    kernel.place(3, 1, 0, 0, 0.5)?;
    Ok(kernel)
}

/// 2 x 1 opener for later stages: lane 1 holds the value, lane 2 starts
/// walking toward the partner one step per layer.
pub fn kernel_pair(axis: Axis, k: usize) -> Result<ConvKernel> {
    let (s, t) = axis.offset();
    let mut kernel = ConvKernel::new(2, 1, k);
    kernel.place(1, 1, 0, 0, 1.0)?;
    kernel.place(2, 1, s, t, 1.0)?;
    Ok(kernel)
}

/// 2 x 2 hold: lane 1 unchanged, lane 2 advances one more step.
pub fn kernel_hold(axis: Axis, k: usize) -> Result<ConvKernel> {
    let (s, t) = axis.offset();
    let mut kernel = ConvKernel::new(2, 2, k);
    kernel.place(1, 1, 0, 0, 1.0)?;
    kernel.place(2, 2, s, t, 1.0)?;
    Ok(kernel)
}

/// 3 x 2 gather: last step of the walk plus the halved (average; partner;
/// self) split feeding the squaring stage.
pub fn kernel_gather(axis: Axis, k: usize) -> Result<ConvKernel> {
    let (s, t) = axis.offset();
    let mut kernel = ConvKernel::new(3, 2, k);
    kernel.place(1, 1, 0, 0, 0.5)?;
    kernel.place(1, 2, s, t, 0.5)?;
    kernel.place(2, 2, s, t, 0.5)?;
    kernel.place(3, 1, 0, 0, 0.5)?;
    Ok(kernel)
}

/// 1 x 3 closer: 2 sq(avg) - 2 sq(partner/2) - 2 sq(self/2).
pub fn kernel_combine(k: usize) -> Result<ConvKernel> {
    let mut kernel = ConvKernel::new(1, 3, k);
    kernel.place(1, 1, 0, 0, 2.0)?;
    kernel.place(1, 2, 0, 0, -2.0)?;
    kernel.place(1, 3, 0, 0, -2.0)?;
    Ok(kernel)
}

/// Stage q of one axis: pairs positions 2^{q-1} apart and multiplies them.
/// Depth 2(n+1) + 2^{q-1} + 1 on a single in/out channel.
pub fn build_half_reduction(q: u32, axis: Axis, n: usize, d: usize, k: usize) -> Result<ConvNet> {
    if q < 1 {
        return Err(Error::Unsupported("reduction stage index must be at least 1"));
    }
    let mut net = ConvNet::empty(1, d, k);
    if q == 1 {
        net.push_layer(ConvLayer::new(kernel_avg3(axis, k)?, BiasVector::zeros(3))?)?;
    } else {
        net.push_layer(ConvLayer::new(kernel_pair(axis, k)?, BiasVector::zeros(2))?)?;
        for _ in 0..(1usize << (q - 1)) - 2 {
            net.push_layer(ConvLayer::new(kernel_hold(axis, k)?, BiasVector::zeros(2))?)?;
        }
        net.push_layer(ConvLayer::new(
            kernel_gather(axis, k)?,
            BiasVector::zeros(3),
        )?)?;
    }
    let mut net = net.compose(&build_sq_net(n, 3, d, k)?.net)?;
    net.push_layer(ConvLayer::new(kernel_combine(k)?, BiasVector::zeros(1))?)?;
    debug_assert_eq!(net.depth(), 2 * (n + 1) + (1usize << (q - 1)) + 1);
    Ok(net)
}

/// All log2(d) stages of one axis. Depth (2n + 3) log2(d) + d - 1.
pub fn build_axis_reduction(axis: Axis, n: usize, d: usize, k: usize) -> Result<ConvNet> {
    let p = d.trailing_zeros();
    let mut net = ConvNet::empty(1, d, k);
    for q in 1..=p {
        net = net.compose(&build_half_reduction(q, axis, n, d, k)?)?;
    }
    Ok(net)
}

/// Product network over both axes.
#[derive(Debug, Clone)]
pub struct ProductNet {
    pub n: usize,
    pub d: usize,
    pub net: ConvNet,
}

impl ProductNet {
    /// Approximate product of all entries, read at position (d, d).
    pub fn evaluate(&self, x: &DataTensor) -> Result<f64> {
        Ok(self.net.forward(x)?.get(1, self.d, self.d))
    }
}

/// Builds the two-axis product network for d a power of two.
///
/// Depth is exactly 2(2n + 3) log2(d) + 2(d - 1), width 12 (the squaring
/// stage on three channels), and the value at (d, d) is within
/// 3 * 2^{-2n-1} (d^2 - 1) of the true product of the d^2 entries.
pub fn build_product_net(n: usize, d: usize, k: usize) -> Result<ProductNet> {
    if n < 1 {
        return Err(Error::BadSqDepth { n });
    }
    if d == 0 || !d.is_power_of_two() {
        return Err(Error::BadSpatial {
            requirement: "a power of two",
            d,
        });
    }
    let cols = build_axis_reduction(Axis::Cols, n, d, k)?;
    let rows = build_axis_reduction(Axis::Rows, n, d, k)?;
    let net = cols.compose(&rows)?;
    let p = d.trailing_zeros() as usize;
    debug_assert_eq!(net.depth(), 2 * (2 * n + 3) * p + 2 * (d - 1));
    Ok(ProductNet { n, d, net })
}

/// Uniform error bound for the product network on [0, 1]-valued inputs.
pub fn product_bound(n: usize, d: usize) -> f64 {
    3.0 * 2f64.powi(-(2 * n as i32) - 1) * ((d * d - 1) as f64)
}

/// Exact product of every entry of a single-channel tensor.
pub fn reduction_oracle(x: &DataTensor) -> f64 {
    assert_eq!(x.channels(), 1, "reduction oracle expects one channel");
    x.values().iter().product()
}

/// Exact per-row products, the reference for the column stage: entry (m, d)
/// carries the product of row m, all other columns are zero.
pub fn column_reduction_oracle(x: &DataTensor) -> DataTensor {
    assert_eq!(x.channels(), 1, "reduction oracle expects one channel");
    let d = x.spatial();
    let mut out = DataTensor::zeros(1, d);
    for m in 1..=d {
        let mut prod = 1.0;
        for n in 1..=d {
            prod *= x.get(1, m, n);
        }
        out.set(1, m, d, prod);
    }
    out
}
