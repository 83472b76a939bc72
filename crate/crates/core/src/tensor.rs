//! Multi-channel square tensors, block-sparse convolution kernels, and the
//! zero-padded convolution they define.
//!
//! Conventions, used verbatim across the crate:
//! - a data tensor X has shape c x d x d and is addressed X[q, m, n] with
//!   1-based q in 1..=c and m, n in 1..=d;
//! - a kernel K has shape c' x c x (2k+1) x (2k+1) and is addressed
//!   K[p, q, s, t] with offsets s, t in -k..=k;
//! - convolution zero-pads: [K * X]_{p,m,n} = sum_{q,s,t} K[p,q,s,t] *
//!   X[q, m+s, n+t], out-of-range reads contributing 0;
//! - spatial size is preserved, there is no stride or dilation.
//!
//! Kernels store only channel pairs (p, q) the construction touched; absent
//! blocks are structural zeros. Each stored entry carries a "free" flag used
//! by size accounting: an entry counts as a parameter iff the construction
//! marked it (zero padding, forced-zero biases and off-diagonal blocks never
//! count).

use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// Dense c x d x d tensor with 1-based channel/spatial addressing.
#[derive(Debug, Clone, PartialEq)]
pub struct DataTensor {
    channels: usize,
    d: usize,
    values: Vec<f64>,
}

impl DataTensor {
    pub fn zeros(channels: usize, d: usize) -> Self {
        Self {
            channels,
            d,
            values: vec![0.0; channels * d * d],
        }
    }

    pub fn constant(channels: usize, d: usize, value: f64) -> Self {
        Self {
            channels,
            d,
            values: vec![value; channels * d * d],
        }
    }

    /// Builds from channel-major, then row-major data: index (q-1)*d*d + (m-1)*d + (n-1).
    pub fn from_vec(channels: usize, d: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != channels * d * d {
            return Err(Error::ShapeMismatch {
                context: "DataTensor::from_vec",
                expected: channels * d * d,
                got: values.len(),
            });
        }
        Ok(Self {
            channels,
            d,
            values,
        })
    }

    /// Single-channel tensor from rows.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let d = rows.len();
        let mut values = Vec::with_capacity(d * d);
        for row in rows {
            if row.len() != d {
                return Err(Error::ShapeMismatch {
                    context: "DataTensor::from_rows",
                    expected: d,
                    got: row.len(),
                });
            }
            values.extend_from_slice(row);
        }
        Self::from_vec(1, d, values)
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn spatial(&self) -> usize {
        self.d
    }

    #[inline]
    fn offset(&self, q: usize, m: usize, n: usize) -> usize {
        (q - 1) * self.d * self.d + (m - 1) * self.d + (n - 1)
    }

    /// 1-based read; panics outside 1..=c x 1..=d x 1..=d.
    pub fn get(&self, q: usize, m: usize, n: usize) -> f64 {
        assert!(
            q >= 1 && q <= self.channels && m >= 1 && m <= self.d && n >= 1 && n <= self.d,
            "DataTensor::get({q},{m},{n}) outside {}x{}x{}",
            self.channels,
            self.d,
            self.d
        );
        self.values[self.offset(q, m, n)]
    }

    pub fn set(&mut self, q: usize, m: usize, n: usize, value: f64) {
        let at = self.offset(q, m, n);
        self.values[at] = value;
    }

    /// Zero-padded read: in-range positions return the stored entry, anything
    /// else returns 0. The channel index is still validated.
    pub fn zero_pad_lookup(&self, q: usize, m: i64, n: i64) -> Result<f64> {
        if q < 1 || q > self.channels {
            return Err(Error::ChannelOutOfRange {
                index: q,
                channels: self.channels,
            });
        }
        Ok(self.padded_unchecked(q, m, n))
    }

    #[inline]
    fn padded_unchecked(&self, q: usize, m: i64, n: i64) -> f64 {
        if m < 1 || n < 1 || m > self.d as i64 || n > self.d as i64 {
            0.0
        } else {
            self.values[self.offset(q, m as usize, n as usize)]
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }
}

/// One (out, in) channel pair of a kernel: a dense (2k+1) x (2k+1) patch plus
/// the per-entry free mask for size accounting.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelBlock {
    k: usize,
    values: Vec<f64>,
    free: Vec<bool>,
}

impl KernelBlock {
    /// All-zero patch with no free entries; populate via `place`.
    pub fn empty(k: usize) -> Self {
        let side = 2 * k + 1;
        Self {
            k,
            values: vec![0.0; side * side],
            free: vec![false; side * side],
        }
    }

    /// Fully free patch from row-major values (rows are offsets s = -k..k,
    /// columns t = -k..k).
    pub fn dense(k: usize, values: Vec<f64>) -> Result<Self> {
        let side = 2 * k + 1;
        if values.len() != side * side {
            return Err(Error::ShapeMismatch {
                context: "KernelBlock::dense",
                expected: side * side,
                got: values.len(),
            });
        }
        Ok(Self {
            k,
            free: vec![true; side * side],
            values,
        })
    }

    #[inline]
    fn index(&self, s: i64, t: i64) -> usize {
        let side = 2 * self.k as i64 + 1;
        ((s + self.k as i64) * side + (t + self.k as i64)) as usize
    }

    /// Writes one entry and marks it free. Accumulates if the slot was
    /// already written (for combinations like (S^{0,-1} + S^{0,0}) / 2).
    pub fn place(&mut self, s: i64, t: i64, value: f64) -> Result<()> {
        let k = self.k as i64;
        if s < -k || s > k || t < -k || t > k {
            return Err(Error::OffsetOutOfRange { s, t, k: self.k });
        }
        let at = self.index(s, t);
        self.values[at] += value;
        self.free[at] = true;
        Ok(())
    }

    pub fn get(&self, s: i64, t: i64) -> f64 {
        let k = self.k as i64;
        assert!(s >= -k && s <= k && t >= -k && t <= k);
        self.values[self.index(s, t)]
    }

    pub fn is_free(&self, s: i64, t: i64) -> bool {
        let k = self.k as i64;
        assert!(s >= -k && s <= k && t >= -k && t <= k);
        self.free[self.index(s, t)]
    }

    pub fn half_width(&self) -> usize {
        self.k
    }

    pub fn free_count(&self) -> u64 {
        self.free.iter().filter(|f| **f).count() as u64
    }

    /// Row-major values, rows s = -k..k then columns t = -k..k.
    pub fn rows(&self) -> Vec<Vec<f64>> {
        let side = 2 * self.k + 1;
        (0..side)
            .map(|r| self.values[r * side..(r + 1) * side].to_vec())
            .collect()
    }

    pub fn free_rows(&self) -> Vec<Vec<bool>> {
        let side = 2 * self.k + 1;
        (0..side)
            .map(|r| self.free[r * side..(r + 1) * side].to_vec())
            .collect()
    }

    pub fn from_rows(values: Vec<Vec<f64>>, free: Vec<Vec<bool>>) -> Result<Self> {
        let side = values.len();
        if side == 0 || side.is_multiple_of(2) || free.len() != side {
            return Err(Error::ShapeMismatch {
                context: "KernelBlock::from_rows",
                expected: side.max(1),
                got: free.len(),
            });
        }
        let k = (side - 1) / 2;
        let mut flat_v = Vec::with_capacity(side * side);
        let mut flat_f = Vec::with_capacity(side * side);
        for (vr, fr) in values.iter().zip(free.iter()) {
            if vr.len() != side || fr.len() != side {
                return Err(Error::ShapeMismatch {
                    context: "KernelBlock::from_rows",
                    expected: side,
                    got: vr.len().min(fr.len()),
                });
            }
            flat_v.extend_from_slice(vr);
            flat_f.extend_from_slice(fr);
        }
        Ok(Self {
            k,
            values: flat_v,
            free: flat_f,
        })
    }
}

/// Block-sparse convolution kernel: only channel pairs the construction
/// touched are stored; the rest are structural zeros.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvKernel {
    out_channels: usize,
    in_channels: usize,
    k: usize,
    blocks: BTreeMap<(usize, usize), KernelBlock>,
}

impl ConvKernel {
    pub fn new(out_channels: usize, in_channels: usize, k: usize) -> Self {
        Self {
            out_channels,
            in_channels,
            k,
            blocks: BTreeMap::new(),
        }
    }

    /// Fully dense, fully free kernel from nested values indexed
    /// [out][in][row 0..2k][col 0..2k].
    pub fn dense(values: Vec<Vec<Vec<Vec<f64>>>>, k: usize) -> Result<Self> {
        let out_channels = values.len();
        let in_channels = values.first().map_or(0, |v| v.len());
        let mut kernel = Self::new(out_channels, in_channels, k);
        for (p0, per_in) in values.into_iter().enumerate() {
            if per_in.len() != in_channels {
                return Err(Error::ShapeMismatch {
                    context: "ConvKernel::dense",
                    expected: in_channels,
                    got: per_in.len(),
                });
            }
            for (q0, patch) in per_in.into_iter().enumerate() {
                let flat: Vec<f64> = patch.into_iter().flatten().collect();
                kernel
                    .blocks
                    .insert((p0, q0), KernelBlock::dense(k, flat)?);
            }
        }
        Ok(kernel)
    }

    pub fn out_channels(&self) -> usize {
        self.out_channels
    }

    pub fn in_channels(&self) -> usize {
        self.in_channels
    }

    pub fn half_width(&self) -> usize {
        self.k
    }

    fn check_pair(&self, p: usize, q: usize) -> Result<()> {
        if p < 1 || p > self.out_channels {
            return Err(Error::ChannelOutOfRange {
                index: p,
                channels: self.out_channels,
            });
        }
        if q < 1 || q > self.in_channels {
            return Err(Error::ChannelOutOfRange {
                index: q,
                channels: self.in_channels,
            });
        }
        Ok(())
    }

    /// Adds `value` at offset (s, t) of block (p, q), creating the block if
    /// needed; 1-based p, q.
    pub fn place(&mut self, p: usize, q: usize, s: i64, t: i64, value: f64) -> Result<()> {
        self.check_pair(p, q)?;
        let k = self.k;
        self.blocks
            .entry((p - 1, q - 1))
            .or_insert_with(|| KernelBlock::empty(k))
            .place(s, t, value)
    }

    pub fn insert_block(&mut self, p: usize, q: usize, block: KernelBlock) -> Result<()> {
        self.check_pair(p, q)?;
        if block.half_width() != self.k {
            return Err(Error::HalfWidthMismatch {
                left: self.k,
                right: block.half_width(),
            });
        }
        self.blocks.insert((p - 1, q - 1), block);
        Ok(())
    }

    /// Entry K[p, q, s, t]; absent blocks read as 0.
    pub fn get(&self, p: usize, q: usize, s: i64, t: i64) -> Result<f64> {
        self.check_pair(p, q)?;
        let k = self.k as i64;
        if s < -k || s > k || t < -k || t > k {
            return Err(Error::OffsetOutOfRange { s, t, k: self.k });
        }
        Ok(self
            .blocks
            .get(&(p - 1, q - 1))
            .map_or(0.0, |b| b.get(s, t)))
    }

    /// Stored blocks in (out, in) order with 1-based indices.
    pub fn blocks(&self) -> impl Iterator<Item = (usize, usize, &KernelBlock)> {
        self.blocks.iter().map(|(&(p, q), b)| (p + 1, q + 1, b))
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    /// Count of possibly-nonzero kernel entries.
    pub fn size(&self) -> u64 {
        self.blocks.values().map(KernelBlock::free_count).sum()
    }

    /// Zero-padded convolution. Summation order per output entry is fixed:
    /// in-channel q ascending, then offset s, then t, so results are
    /// bit-reproducible. Structural zeros contribute no terms.
    pub fn conv2d(&self, x: &DataTensor) -> Result<DataTensor> {
        if x.channels() != self.in_channels {
            return Err(Error::ShapeMismatch {
                context: "conv2d input channels",
                expected: self.in_channels,
                got: x.channels(),
            });
        }
        let d = x.spatial();
        let k = self.k as i64;
        let mut out = DataTensor::zeros(self.out_channels, d);
        for p0 in 0..self.out_channels {
            let row: Vec<(usize, &KernelBlock)> = self
                .blocks
                .range((p0, 0)..=(p0, usize::MAX))
                .map(|(&(_, q0), b)| (q0 + 1, b))
                .collect();
            if row.is_empty() {
                continue;
            }
            for m in 1..=d as i64 {
                for n in 1..=d as i64 {
                    let mut acc = 0.0;
                    for &(q, block) in &row {
                        for s in -k..=k {
                            for t in -k..=k {
                                let w = block.get(s, t);
                                if w != 0.0 {
                                    acc += w * x.padded_unchecked(q, m + s, n + t);
                                }
                            }
                        }
                    }
                    out.set(p0 + 1, m as usize, n as usize, acc);
                }
            }
        }
        Ok(out)
    }
}

/// Per-output-channel bias with a free mask.
#[derive(Debug, Clone, PartialEq)]
pub struct BiasVector {
    values: Vec<f64>,
    free: Vec<bool>,
}

impl BiasVector {
    /// Structural zero bias (counts 0 parameters).
    pub fn zeros(channels: usize) -> Self {
        Self {
            values: vec![0.0; channels],
            free: vec![false; channels],
        }
    }

    /// Fully free bias.
    pub fn dense(values: Vec<f64>) -> Self {
        let free = vec![true; values.len()];
        Self { values, free }
    }

    pub fn from_parts(values: Vec<f64>, free: Vec<bool>) -> Result<Self> {
        if values.len() != free.len() {
            return Err(Error::ShapeMismatch {
                context: "BiasVector::from_parts",
                expected: values.len(),
                got: free.len(),
            });
        }
        Ok(Self { values, free })
    }

    /// Writes channel p (1-based) and marks it free.
    pub fn place(&mut self, p: usize, value: f64) -> Result<()> {
        if p < 1 || p > self.values.len() {
            return Err(Error::ChannelOutOfRange {
                index: p,
                channels: self.values.len(),
            });
        }
        self.values[p - 1] = value;
        self.free[p - 1] = true;
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, p: usize) -> f64 {
        self.values[p - 1]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn free_mask(&self) -> &[bool] {
        &self.free
    }

    pub fn size(&self) -> u64 {
        self.free.iter().filter(|f| **f).count() as u64
    }

    /// Pads with structural zeros up to `channels`.
    pub fn pad_to(&mut self, channels: usize) {
        while self.values.len() < channels {
            self.values.push(0.0);
            self.free.push(false);
        }
    }
}

/// Elementwise max(0, x).
pub fn relu(x: &DataTensor) -> DataTensor {
    let values = x.values().iter().map(|v| v.max(0.0)).collect();
    DataTensor::from_vec(x.channels(), x.spatial(), values).expect("same shape")
}

/// Flattens to the readout order: position (q-1)d^2 + (m-1)d + n (1-based).
pub fn vectorize(x: &DataTensor) -> Vec<f64> {
    x.values().to_vec()
}
