//! Text artifact for built networks: schema-versioned JSON with explicit
//! nested arrays, diffable and portable across implementations.
//!
//! Kernels are stored per present (out, in) block as a dense
//! (2k+1) x (2k+1) array indexed [row][col] = [s + k][t + k]; the offset
//! convention is repeated in the metadata so a reader never has to guess.
//! Free masks ride along with both kernels and biases so parameter counts
//! survive the round trip.

use std::collections::BTreeMap;

use anyhow::{bail, Context};
use korobov_cnn::{BiasVector, ConvKernel, ConvLayer, ConvNet, HypothesisFunction, KernelBlock};
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;
pub const OFFSET_CONVENTION: &str =
    "kernel rows/cols index offsets s,t = -k..k as 0..2k (row = s + k, col = t + k)";

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NetworkFile {
    pub schema_version: u32,
    pub metadata: Metadata,
    pub layers: Vec<LayerFile>,
    pub readout: Option<ReadoutFile>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Metadata {
    pub construction: String,
    pub d: usize,
    pub k: usize,
    pub input_channels: usize,
    /// Out-channels per layer, in order.
    pub channel_sizes: Vec<usize>,
    pub offset_convention: String,
    /// Construction parameters as strings, sorted by key.
    pub params: BTreeMap<String, String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LayerFile {
    pub blocks: Vec<BlockFile>,
    pub bias: BiasFile,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BlockFile {
    pub out: usize,
    #[serde(rename = "in")]
    pub input: usize,
    pub rows: Vec<Vec<f64>>,
    pub free: Vec<Vec<bool>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BiasFile {
    pub values: Vec<f64>,
    pub free: Vec<bool>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReadoutFile {
    pub alpha: Vec<f64>,
    pub alpha_free: Vec<bool>,
    pub beta: f64,
    pub beta_free: bool,
}

impl NetworkFile {
    pub fn from_net(
        construction: &str,
        net: &ConvNet,
        params: BTreeMap<String, String>,
        readout: Option<ReadoutFile>,
    ) -> Self {
        let layers = net
            .layers()
            .iter()
            .map(|layer| LayerFile {
                blocks: layer
                    .kernel
                    .blocks()
                    .map(|(out, input, block)| BlockFile {
                        out,
                        input,
                        rows: block.rows(),
                        free: block.free_rows(),
                    })
                    .collect(),
                bias: BiasFile {
                    values: layer.bias.values().to_vec(),
                    free: layer.bias.free_mask().to_vec(),
                },
            })
            .collect();
        NetworkFile {
            schema_version: SCHEMA_VERSION,
            metadata: Metadata {
                construction: construction.to_string(),
                d: net.spatial(),
                k: net.half_width(),
                input_channels: net.input_channels(),
                channel_sizes: net.layers().iter().map(ConvLayer::out_channels).collect(),
                offset_convention: OFFSET_CONVENTION.to_string(),
                params,
            },
            layers,
            readout,
        }
    }

    pub fn from_hypothesis(
        construction: &str,
        h: &HypothesisFunction,
        params: BTreeMap<String, String>,
    ) -> Self {
        let readout = ReadoutFile {
            alpha: h.alpha().to_vec(),
            alpha_free: h.alpha_free().to_vec(),
            beta: h.beta(),
            beta_free: h.beta_free(),
        };
        Self::from_net(construction, &h.net, params, Some(readout))
    }

    /// Rebuilds the in-memory network, revalidating every structural
    /// invariant (shapes, channel chaining, offset ranges).
    pub fn to_net(&self) -> anyhow::Result<ConvNet> {
        if self.schema_version != SCHEMA_VERSION {
            bail!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                self.schema_version
            );
        }
        if self.metadata.channel_sizes.len() != self.layers.len() {
            bail!(
                "metadata lists {} channel sizes for {} layers",
                self.metadata.channel_sizes.len(),
                self.layers.len()
            );
        }
        let k = self.metadata.k;
        let mut net = ConvNet::empty(self.metadata.input_channels, self.metadata.d, k);
        let mut in_channels = self.metadata.input_channels;
        for (idx, layer) in self.layers.iter().enumerate() {
            let out_channels = self.metadata.channel_sizes[idx];
            let mut kernel = ConvKernel::new(out_channels, in_channels, k);
            for b in &layer.blocks {
                let block = KernelBlock::from_rows(b.rows.clone(), b.free.clone())
                    .with_context(|| format!("layer {idx} block ({}, {})", b.out, b.input))?;
                kernel
                    .insert_block(b.out, b.input, block)
                    .with_context(|| format!("layer {idx} block ({}, {})", b.out, b.input))?;
            }
            let bias = BiasVector::from_parts(layer.bias.values.clone(), layer.bias.free.clone())
                .with_context(|| format!("layer {idx} bias"))?;
            let layer = ConvLayer::new(kernel, bias).with_context(|| format!("layer {idx}"))?;
            net.push_layer(layer).with_context(|| format!("layer {idx}"))?;
            in_channels = out_channels;
        }
        Ok(net)
    }

    pub fn to_hypothesis(&self) -> anyhow::Result<HypothesisFunction> {
        let net = self.to_net()?;
        let r = self
            .readout
            .as_ref()
            .context("file carries no readout section")?;
        Ok(HypothesisFunction::with_masks(
            net,
            r.alpha.clone(),
            r.alpha_free.clone(),
            r.beta,
            r.beta_free,
        )?)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("network files are plain data");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> anyhow::Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Flat table of every parameter, one row per kernel entry, bias entry,
    /// and readout coefficient.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("kind,layer,out,in,row,col,value,free\n");
        use std::fmt::Write;
        for (idx, layer) in self.layers.iter().enumerate() {
            for b in &layer.blocks {
                for (r, row) in b.rows.iter().enumerate() {
                    for (c, v) in row.iter().enumerate() {
                        writeln!(
                            out,
                            "weight,{idx},{},{},{r},{c},{v},{}",
                            b.out, b.input, b.free[r][c]
                        )
                        .expect("string write");
                    }
                }
            }
            for (p, v) in layer.bias.values.iter().enumerate() {
                writeln!(out, "bias,{idx},{},,,,{v},{}", p + 1, layer.bias.free[p])
                    .expect("string write");
            }
        }
        if let Some(r) = &self.readout {
            for (i, v) in r.alpha.iter().enumerate() {
                writeln!(out, "alpha,,{},,,,{v},{}", i + 1, r.alpha_free[i]).expect("string write");
            }
            writeln!(out, "beta,,,,,,{},{}", r.beta, r.beta_free).expect("string write");
        }
        out
    }
}

pub fn params_map(pairs: &[(&str, String)]) -> BTreeMap<String, String> {
    pairs
        .iter()
        .map(|(key, value)| (key.to_string(), value.clone()))
        .collect()
}
