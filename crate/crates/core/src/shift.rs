//! Single-entry shift kernels and the selector sequences built from them.
//!
//! A shift block S^{s,t} is the (2k+1) x (2k+1) kernel whose only nonzero
//! entry is a 1 at offset (s, t); convolving with it reads the zero-padded
//! input at (m+s, n+t), i.e. moves content by (-s, -t). A selector for target
//! position (m, n) is a sequence of unit shifts whose composition keeps
//! exactly the entry at (m, n) in place and zeroes everything else: the
//! content is first funneled into a corner, then a long diagonal pass drops
//! every other entry off the padded boundary, and the survivor is walked
//! back. The sequence length never exceeds floor(5d/2) - 1.

use crate::error::{Error, Result};
use crate::network::{ConvLayer, ConvNet};
use crate::tensor::{BiasVector, ConvKernel, DataTensor};

/// Offsets (s, t) of a unit shift; each component in {-1, 0, 1} for the
/// selector alphabet, though arbitrary offsets within the kernel are allowed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ShiftBlock {
    pub s: i64,
    pub t: i64,
}

impl ShiftBlock {
    pub const fn new(s: i64, t: i64) -> Self {
        Self { s, t }
    }

    /// 1 x 1-channel kernel holding a single 1 at (s, t).
    pub fn kernel(&self, k: usize) -> Result<ConvKernel> {
        let mut kernel = ConvKernel::new(1, 1, k);
        kernel.place(1, 1, self.s, self.t, 1.0)?;
        Ok(kernel)
    }

    /// One zero-padded shift of a single-channel tensor.
    pub fn apply(&self, x: &DataTensor) -> Result<DataTensor> {
        if x.channels() != 1 {
            return Err(Error::ShapeMismatch {
                context: "shift input channels",
                expected: 1,
                got: x.channels(),
            });
        }
        self.kernel(self.s.unsigned_abs().max(self.t.unsigned_abs()).max(1) as usize)?
            .conv2d(x)
    }
}

/// Selector for one spatial position: the shift sequence in application
/// order (index 0 applied first).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelectorPlan {
    pub m: usize,
    pub n: usize,
    pub d: usize,
    pub shifts: Vec<ShiftBlock>,
}

impl SelectorPlan {
    pub fn len(&self) -> usize {
        self.shifts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.shifts.is_empty()
    }

    /// Applies the whole sequence by repeated convolution.
    pub fn apply(&self, x: &DataTensor) -> Result<DataTensor> {
        if x.spatial() != self.d {
            return Err(Error::ShapeMismatch {
                context: "selector spatial size",
                expected: self.d,
                got: x.spatial(),
            });
        }
        let mut cur = x.clone();
        for shift in &self.shifts {
            cur = shift.apply(&cur)?;
        }
        Ok(cur)
    }

    /// Single-channel network realizing the plan, one layer per shift,
    /// padded with identity layers up to `depth` when requested.
    pub fn to_net(&self, k: usize, depth: Option<usize>, spatial: usize) -> Result<ConvNet> {
        let mut net = ConvNet::empty(1, spatial, k);
        for shift in &self.shifts {
            net.push_layer(ConvLayer::new(shift.kernel(k)?, BiasVector::zeros(1))?)?;
        }
        if let Some(target) = depth {
            net = net.deepen(target)?;
        }
        Ok(net)
    }
}

fn run(seq: &mut Vec<ShiftBlock>, s: i64, t: i64, count: usize) {
    seq.extend(std::iter::repeat_n(ShiftBlock::new(s, t), count));
}

/// Shift sequence keeping exactly position (m, n) of a d x d tensor.
///
/// Positions in the top half are handled directly (two cases by which corner
/// funnels the survivor); bottom-half positions reuse the top-half sequence
/// for the vertically mirrored target with every vertical offset negated,
/// which is the conjugation of the plan by the vertical flip.
pub fn build_selector(m: usize, n: usize, d: usize) -> Result<SelectorPlan> {
    if d == 0 {
        return Err(Error::BadSpatial {
            requirement: ">= 1",
            d,
        });
    }
    if m < 1 || m > d || n < 1 || n > d {
        return Err(Error::ChannelOutOfRange {
            index: if m < 1 || m > d { m } else { n },
            channels: d,
        });
    }
    let mid = d.div_ceil(2);
    let mut shifts = Vec::new();
    if m <= mid {
        build_top_half(&mut shifts, m, n, d, mid);
    } else {
        // Mirror: solve for (d+1-m, n) and negate vertical offsets.
        let mut mirrored = Vec::new();
        build_top_half(&mut mirrored, d + 1 - m, n, d, mid);
        shifts.extend(mirrored.into_iter().map(|b| ShiftBlock::new(-b.s, b.t)));
    }
    let plan = SelectorPlan { m, n, d, shifts };
    debug_assert!(plan.len() < 5 * d / 2);
    Ok(plan)
}

fn build_top_half(seq: &mut Vec<ShiftBlock>, m: usize, n: usize, d: usize, mid: usize) {
    debug_assert!(m <= mid);
    if n <= mid {
        // Funnel through the top-left corner, then down-right across the
        // whole grid so only the corner entry survives, then walk back.
        if m <= n {
            run(seq, 1, 1, m - 1);
            run(seq, 0, 1, n - m);
            run(seq, -1, -1, d - 1);
            run(seq, 1, 1, d - n);
            run(seq, 1, 0, n - m);
        } else {
            run(seq, 1, 1, n - 1);
            run(seq, 1, 0, m - n);
            run(seq, -1, -1, d - 1);
            run(seq, 1, 1, d - m);
            run(seq, 0, 1, m - n);
        }
    } else {
        // Funnel through the top-right corner, survivor crosses down-left.
        if m + n <= d + 1 {
            run(seq, 1, -1, m - 1);
            run(seq, 0, -1, d + 1 - m - n);
            run(seq, -1, 1, d - 1);
            run(seq, 1, -1, n - 1);
            run(seq, 1, 0, d + 1 - m - n);
        } else {
            run(seq, 1, -1, d - n);
            run(seq, 1, 0, m + n - d - 1);
            run(seq, -1, 1, d - 1);
            run(seq, 1, -1, d - m);
            run(seq, 0, -1, m + n - d - 1);
        }
    }
}

/// Reference behavior of a selector: copy one entry, zero the rest.
pub fn masking_oracle(m: usize, n: usize, x: &DataTensor) -> DataTensor {
    let mut out = DataTensor::zeros(x.channels(), x.spatial());
    for q in 1..=x.channels() {
        out.set(q, m, n, x.get(q, m, n));
    }
    out
}
