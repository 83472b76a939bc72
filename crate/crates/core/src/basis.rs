//! Networks evaluating one hierarchical basis function on a tensor input.
//!
//! The entry at (m, n) of a d x d input is coordinate j = (m-1)d + n of the
//! vectorized point. The hat stage computes, for every j, the 1D hat of
//! coordinate j via two ramp channels (2d^2 lanes) recombined as
//! relu(1 - relu(u) - relu(-u)); a selector stage then masks channel j down
//! to its home position (m, n) and a summing kernel collapses the channels
//! into a single map holding hat_j(X_{m,n}) at every position. Composing
//! with the product network yields the full multivariate basis value at
//! position (d, d).

use crate::error::{Error, Result};
use crate::grid::{basis_nd, LevelIndex};
use crate::network::{ConvLayer, ConvNet};
use crate::product::build_product_net;
use crate::shift::build_selector;
use crate::tensor::{vectorize, BiasVector, ConvKernel, DataTensor};

/// 1-based spatial position of vectorized coordinate j in 1:d^2.
pub fn position_of(j: usize, d: usize) -> (usize, usize) {
    ((j - 1) / d + 1, (j - 1) % d + 1)
}

/// Inverse of vectorization for a single-channel tensor.
pub fn tensor_from_point(x: &[f64], d: usize) -> Result<DataTensor> {
    if x.len() != d * d {
        return Err(Error::DimensionMismatch {
            context: "point length",
            expected: d * d,
            got: x.len(),
        });
    }
    let mut out = DataTensor::zeros(1, d);
    for (j, &v) in x.iter().enumerate() {
        let (m, n) = position_of(j + 1, d);
        out.set(1, m, n, v);
    }
    Ok(out)
}

/// Entry-wise reference for the hat stage: out(m, n) is the hat of
/// coordinate (m-1)d + n evaluated at the input entry.
pub fn phi_oracle(li: &LevelIndex, x: &DataTensor) -> Result<DataTensor> {
    let d = x.spatial();
    check_dims(li, d)?;
    if x.channels() != 1 {
        return Err(Error::ShapeMismatch {
            context: "hat stage input channels",
            expected: 1,
            got: x.channels(),
        });
    }
    let mut out = DataTensor::zeros(1, d);
    for j in 1..=d * d {
        let (m, n) = position_of(j, d);
        let u = 2f64.powi(li.levels()[j - 1] as i32) * x.get(1, m, n)
            - li.positions()[j - 1] as f64;
        out.set(1, m, n, (1.0 - u.abs()).max(0.0));
    }
    Ok(out)
}

fn check_dims(li: &LevelIndex, d: usize) -> Result<()> {
    if li.dim() != d * d {
        return Err(Error::DimensionMismatch {
            context: "basis index dimension",
            expected: d * d,
            got: li.dim(),
        });
    }
    Ok(())
}

/// Hat stage network: depth floor(5d/2) + 3, width 2d^2, 1 channel in/out.
pub fn build_phi_net(li: &LevelIndex, d: usize, k: usize) -> Result<ConvNet> {
    check_dims(li, d)?;
    let dd = d * d;
    let mut net = ConvNet::empty(1, d, k);

    // Ramp pair per coordinate: lanes 2j-1 and 2j hold relu(2^l x - i) and
    // relu(i - 2^l x).
    let mut ramps = ConvKernel::new(2 * dd, 1, k);
    let mut ramp_bias = BiasVector::zeros(2 * dd);
    for j in 1..=dd {
        let scale = 2f64.powi(li.levels()[j - 1] as i32);
        let pos = li.positions()[j - 1] as f64;
        ramps.place(2 * j - 1, 1, 0, 0, scale)?;
        ramp_bias.place(2 * j - 1, -pos)?;
        ramps.place(2 * j, 1, 0, 0, -scale)?;
        ramp_bias.place(2 * j, pos)?;
    }
    net.push_layer(ConvLayer::new(ramps, ramp_bias)?)?;

    // Hat assembly: channel j = relu(1 - ramp+ - ramp-).
    let mut hats = ConvKernel::new(dd, 2 * dd, k);
    let mut hat_bias = BiasVector::zeros(dd);
    for j in 1..=dd {
        hats.place(j, 2 * j - 1, 0, 0, -1.0)?;
        hats.place(j, 2 * j, 0, 0, -1.0)?;
        hat_bias.place(j, 1.0)?;
    }
    net.push_layer(ConvLayer::new(hats, hat_bias)?)?;

    // Selector stage: mask channel j to its home position; plans are padded
    // to a common depth so they concatenate.
    let pad = 5 * d / 2;
    let mut plans = Vec::with_capacity(dd);
    for j in 1..=dd {
        let (m, n) = position_of(j, d);
        plans.push(build_selector(m, n, d)?.to_net(k, Some(pad), d)?);
    }
    let plan_refs: Vec<&ConvNet> = plans.iter().collect();
    let selector_stage = ConvNet::concatenate_many(&plan_refs)?;
    let mut net = net.compose(&selector_stage)?;

    // Sum the masked channels into one map.
    let mut sum = ConvKernel::new(1, dd, k);
    for j in 1..=dd {
        sum.place(1, j, 0, 0, 1.0)?;
    }
    net.push_layer(ConvLayer::new(sum, BiasVector::zeros(1))?)?;

    debug_assert_eq!(net.depth(), 5 * d / 2 + 3);
    debug_assert_eq!(net.width(), 2 * dd);
    Ok(net)
}

/// Network approximating one multivariate basis function at output (d, d).
#[derive(Debug, Clone)]
pub struct BasisNet {
    pub li: LevelIndex,
    pub n: usize,
    pub d: usize,
    pub net: ConvNet,
}

impl BasisNet {
    /// Network value at position (d, d).
    pub fn evaluate(&self, x: &DataTensor) -> Result<f64> {
        Ok(self.net.forward(x)?.get(1, self.d, self.d))
    }

    /// Exact basis value at the vectorized input.
    pub fn target(&self, x: &DataTensor) -> Result<f64> {
        basis_nd(&self.li, &vectorize(x))
    }
}

/// Uniform error of the basis network: (3/2) 2^{-2n} (d^2 - 1).
pub fn basis_bound(n: usize, d: usize) -> f64 {
    1.5 * 2f64.powi(-2 * n as i32) * ((d * d - 1) as f64)
}

/// Hat stage deepened to 3d + 2, then the product reduction; total depth is
/// exactly 2(2n + 3) log2(d) + 5d. Requires d >= 3 (so the 12-channel
/// product stage fits inside width 2d^2) and d a power of two.
pub fn build_basis_net(li: &LevelIndex, n: usize, d: usize, k: usize) -> Result<BasisNet> {
    if d < 3 {
        return Err(Error::BadSpatial {
            requirement: "at least 3 for basis networks",
            d,
        });
    }
    check_dims(li, d)?;
    let product = build_product_net(n, d, k)?;
    let phi = build_phi_net(li, d, k)?.deepen(3 * d + 2)?;
    let net = phi.compose(&product.net)?;
    let p = d.trailing_zeros() as usize;
    debug_assert_eq!(net.depth(), 2 * (2 * n + 3) * p + 5 * d);
    Ok(BasisNet {
        li: li.clone(),
        n,
        d,
        net,
    })
}
