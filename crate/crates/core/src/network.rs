//! Layered ReLU convolution networks and the combinators used to assemble
//! them: widen, deepen, compose, concatenate.
//!
//! A network is a list of layers X -> relu(K * X + b * 1_{dxd}) over a fixed
//! spatial size d and kernel half-width k. Width is the maximum channel count
//! over layer outputs; depth is the layer count; size is the number of
//! possibly-nonzero parameters (see `tensor`). A hypothesis function adds an
//! affine readout beta + <alpha, vect(output)> on top.

use crate::error::{Error, Result};
use crate::tensor::{relu, vectorize, BiasVector, ConvKernel, DataTensor, KernelBlock};

/// One convolution layer: kernel plus per-channel bias.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvLayer {
    pub kernel: ConvKernel,
    pub bias: BiasVector,
}

impl ConvLayer {
    pub fn new(kernel: ConvKernel, bias: BiasVector) -> Result<Self> {
        if bias.len() != kernel.out_channels() {
            return Err(Error::ShapeMismatch {
                context: "ConvLayer bias length",
                expected: kernel.out_channels(),
                got: bias.len(),
            });
        }
        Ok(Self { kernel, bias })
    }

    /// Identity layer on `channels` channels: block-diagonal centered ones,
    /// structural-zero bias. Exact on nonnegative inputs.
    pub fn identity(channels: usize, k: usize) -> Self {
        let mut kernel = ConvKernel::new(channels, channels, k);
        for c in 1..=channels {
            kernel.place(c, c, 0, 0, 1.0).expect("in range");
        }
        Self {
            kernel,
            bias: BiasVector::zeros(channels),
        }
    }

    pub fn out_channels(&self) -> usize {
        self.kernel.out_channels()
    }

    pub fn in_channels(&self) -> usize {
        self.kernel.in_channels()
    }

    pub fn size(&self) -> u64 {
        self.kernel.size() + self.bias.size()
    }

    pub fn apply(&self, x: &DataTensor) -> Result<DataTensor> {
        let mut pre = self.kernel.conv2d(x)?;
        let d = pre.spatial();
        for p in 1..=self.kernel.out_channels() {
            let b = self.bias.get(p);
            if b != 0.0 {
                for m in 1..=d {
                    for n in 1..=d {
                        pre.set(p, m, n, pre.get(p, m, n) + b);
                    }
                }
            }
        }
        Ok(relu(&pre))
    }
}

/// Sequence of ReLU convolution layers with fixed input channel count,
/// spatial size and kernel half-width.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvNet {
    input_channels: usize,
    d: usize,
    k: usize,
    layers: Vec<ConvLayer>,
}

impl ConvNet {
    /// Empty network; forward is the identity on c0-channel tensors.
    pub fn empty(input_channels: usize, d: usize, k: usize) -> Self {
        Self {
            input_channels,
            d,
            k,
            layers: Vec::new(),
        }
    }

    pub fn push_layer(&mut self, layer: ConvLayer) -> Result<()> {
        if layer.kernel.half_width() != self.k {
            return Err(Error::HalfWidthMismatch {
                left: self.k,
                right: layer.kernel.half_width(),
            });
        }
        let expected = self.out_channels();
        if layer.in_channels() != expected {
            return Err(Error::ShapeMismatch {
                context: "layer input channels",
                expected,
                got: layer.in_channels(),
            });
        }
        self.layers.push(layer);
        Ok(())
    }

    pub fn input_channels(&self) -> usize {
        self.input_channels
    }

    /// Channel count of the network output (input channels when empty).
    pub fn out_channels(&self) -> usize {
        self.layers
            .last()
            .map_or(self.input_channels, ConvLayer::out_channels)
    }

    pub fn spatial(&self) -> usize {
        self.d
    }

    pub fn half_width(&self) -> usize {
        self.k
    }

    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    /// Max over layer output channel counts (0 for the empty network).
    pub fn width(&self) -> usize {
        self.layers
            .iter()
            .map(ConvLayer::out_channels)
            .max()
            .unwrap_or(0)
    }

    pub fn layers(&self) -> &[ConvLayer] {
        &self.layers
    }

    pub fn size(&self) -> u64 {
        self.layers.iter().map(ConvLayer::size).sum()
    }

    /// Sum of layer sizes over a layer index range (for reports).
    pub fn size_of_layers(&self, range: std::ops::Range<usize>) -> u64 {
        self.layers[range].iter().map(ConvLayer::size).sum()
    }

    fn check_input(&self, x: &DataTensor) -> Result<()> {
        if x.channels() != self.input_channels {
            return Err(Error::ShapeMismatch {
                context: "forward input channels",
                expected: self.input_channels,
                got: x.channels(),
            });
        }
        if x.spatial() != self.d {
            return Err(Error::ShapeMismatch {
                context: "forward spatial size",
                expected: self.d,
                got: x.spatial(),
            });
        }
        Ok(())
    }

    /// Applies all layers. An empty network returns its input unchanged.
    pub fn forward(&self, x: &DataTensor) -> Result<DataTensor> {
        self.check_input(x)?;
        let mut cur = x.clone();
        for layer in &self.layers {
            cur = layer.apply(&cur)?;
        }
        Ok(cur)
    }

    /// Forward pass that also returns every intermediate activation
    /// (index l holds the output of layer l+1). Used by range audits.
    pub fn forward_trace(&self, x: &DataTensor) -> Result<Vec<DataTensor>> {
        self.check_input(x)?;
        let mut trace = Vec::with_capacity(self.layers.len());
        let mut cur = x.clone();
        for layer in &self.layers {
            cur = layer.apply(&cur)?;
            trace.push(cur.clone());
        }
        Ok(trace)
    }

    /// Pads the first layer's output channels (and the second layer's input
    /// channels) with structural zeros so the first hidden width becomes
    /// `target`. Forward values are unchanged. Requires depth >= 2: with a
    /// single layer the padding would alter the network output itself.
    pub fn widen(&self, target: usize) -> Result<ConvNet> {
        if self.depth() < 2 {
            return Err(Error::WidenTooShallow {
                depth: self.depth(),
            });
        }
        if target < self.width() {
            return Err(Error::WidenTooNarrow {
                target,
                width: self.width(),
            });
        }
        let mut out = self.clone();
        {
            let first = &mut out.layers[0];
            let mut kernel = ConvKernel::new(target, first.in_channels(), self.k);
            for (p, q, block) in first.kernel.blocks() {
                kernel.insert_block(p, q, block.clone())?;
            }
            let mut bias = first.bias.clone();
            bias.pad_to(target);
            *first = ConvLayer { kernel, bias };
        }
        {
            let second = &mut out.layers[1];
            let mut kernel = ConvKernel::new(second.out_channels(), target, self.k);
            for (p, q, block) in second.kernel.blocks() {
                kernel.insert_block(p, q, block.clone())?;
            }
            second.kernel = kernel;
        }
        Ok(out)
    }

    /// Appends identity layers until the depth reaches `target`. Exact only
    /// when intermediate values are nonnegative, which holds for every
    /// post-ReLU activation; callers deepen after at least one layer.
    pub fn deepen(&self, target: usize) -> Result<ConvNet> {
        if target < self.depth() {
            return Err(Error::DeepenTooShallow {
                target,
                depth: self.depth(),
            });
        }
        let mut out = self.clone();
        let channels = self.out_channels();
        while out.depth() < target {
            out.layers.push(ConvLayer::identity(channels, self.k));
        }
        Ok(out)
    }

    /// Sequential composition: self first, then `next`.
    pub fn compose(&self, next: &ConvNet) -> Result<ConvNet> {
        if next.input_channels != self.out_channels() {
            return Err(Error::ShapeMismatch {
                context: "compose channel interface",
                expected: self.out_channels(),
                got: next.input_channels,
            });
        }
        if next.d != self.d {
            return Err(Error::ShapeMismatch {
                context: "compose spatial size",
                expected: self.d,
                got: next.d,
            });
        }
        if next.k != self.k {
            return Err(Error::HalfWidthMismatch {
                left: self.k,
                right: next.k,
            });
        }
        let mut out = self.clone();
        out.layers.extend(next.layers.iter().cloned());
        Ok(out)
    }

    /// Side-by-side concatenation of equally deep networks: layer l becomes
    /// block-diagonal over the parts, inputs and outputs are stacked in
    /// argument order. Off-diagonal blocks are structural zeros.
    pub fn concatenate_many(parts: &[&ConvNet]) -> Result<ConvNet> {
        let first = parts.first().ok_or(Error::Unsupported(
            "concatenation requires at least one network",
        ))?;
        for part in parts.iter().skip(1) {
            if part.depth() != first.depth() {
                return Err(Error::DepthMismatch {
                    left: first.depth(),
                    right: part.depth(),
                });
            }
            if part.d != first.d {
                return Err(Error::ShapeMismatch {
                    context: "concatenate spatial size",
                    expected: first.d,
                    got: part.d,
                });
            }
            if part.k != first.k {
                return Err(Error::HalfWidthMismatch {
                    left: first.k,
                    right: part.k,
                });
            }
        }
        let input_channels = parts.iter().map(|p| p.input_channels).sum();
        let mut net = ConvNet::empty(input_channels, first.d, first.k);
        for l in 0..first.depth() {
            let out_total = parts.iter().map(|p| p.layers[l].out_channels()).sum();
            let in_total = parts
                .iter()
                .map(|p| p.layers[l].in_channels())
                .sum::<usize>();
            let mut kernel = ConvKernel::new(out_total, in_total, first.k);
            let mut bias_values = Vec::with_capacity(out_total);
            let mut bias_free = Vec::with_capacity(out_total);
            let mut out_off = 0usize;
            let mut in_off = 0usize;
            for part in parts {
                let layer = &part.layers[l];
                for (p, q, block) in layer.kernel.blocks() {
                    kernel.insert_block(out_off + p, in_off + q, block.clone())?;
                }
                bias_values.extend_from_slice(layer.bias.values());
                bias_free.extend_from_slice(layer.bias.free_mask());
                out_off += layer.out_channels();
                in_off += layer.in_channels();
            }
            net.push_layer(ConvLayer::new(
                kernel,
                BiasVector::from_parts(bias_values, bias_free)?,
            )?)?;
        }
        Ok(net)
    }

    pub fn concatenate(&self, other: &ConvNet) -> Result<ConvNet> {
        Self::concatenate_many(&[self, other])
    }
}

/// Identity layer block reused by constructions that pad selector stages.
pub fn identity_kernel_block(k: usize) -> KernelBlock {
    let mut block = KernelBlock::empty(k);
    block.place(0, 0, 1.0).expect("center in range");
    block
}

/// Affine readout on top of a network: beta + sum_i alpha_i vect(out)_i.
#[derive(Debug, Clone, PartialEq)]
pub struct HypothesisFunction {
    pub net: ConvNet,
    alpha: Vec<f64>,
    alpha_free: Vec<bool>,
    beta: f64,
    beta_free: bool,
}

impl HypothesisFunction {
    /// Generic readout: every coefficient counts as a parameter.
    pub fn new(net: ConvNet, alpha: Vec<f64>, beta: f64) -> Result<Self> {
        let expected = net.out_channels() * net.spatial() * net.spatial();
        if alpha.len() != expected {
            return Err(Error::ShapeMismatch {
                context: "readout length",
                expected,
                got: alpha.len(),
            });
        }
        let alpha_free = vec![true; alpha.len()];
        Ok(Self {
            net,
            alpha,
            alpha_free,
            beta,
            beta_free: true,
        })
    }

    /// Readout with explicit structural masks (used by constructions that pin
    /// most coefficients to zero).
    pub fn with_masks(
        net: ConvNet,
        alpha: Vec<f64>,
        alpha_free: Vec<bool>,
        beta: f64,
        beta_free: bool,
    ) -> Result<Self> {
        let expected = net.out_channels() * net.spatial() * net.spatial();
        if alpha.len() != expected || alpha_free.len() != expected {
            return Err(Error::ShapeMismatch {
                context: "readout length",
                expected,
                got: alpha.len().min(alpha_free.len()),
            });
        }
        Ok(Self {
            net,
            alpha,
            alpha_free,
            beta,
            beta_free,
        })
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn alpha_free(&self) -> &[bool] {
        &self.alpha_free
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn beta_free(&self) -> bool {
        self.beta_free
    }

    pub fn evaluate(&self, x: &DataTensor) -> Result<f64> {
        let out = self.net.forward(x)?;
        let v = vectorize(&out);
        let mut acc = self.beta;
        for (a, vi) in self.alpha.iter().zip(v.iter()) {
            if *a != 0.0 {
                acc += a * vi;
            }
        }
        Ok(acc)
    }

    /// Possibly-nonzero parameters: network + masked alpha entries + beta.
    pub fn size(&self) -> u64 {
        self.net.size()
            + self.alpha_free.iter().filter(|f| **f).count() as u64
            + u64::from(self.beta_free)
    }
}
