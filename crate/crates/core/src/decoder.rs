//! Layered joint sum-product decoding over the two-sided Tanner graph.
//!
//! Per iteration (channel-first schedule):
//!
//! 1. every channel layer: variable update then check update, each layer
//!    reading the freshest messages written by the layers before it;
//! 2. channel-to-source cross messages `Icc_sc`;
//! 3. every source layer: variable update, then the check update which also
//!    emits the source-to-channel cross message `Isc_cc` of each check;
//! 4. a-posteriori LLRs and hard decisions (`LLR >= 0` decides 0).
//!
//! Source variables are punctured: their only intrinsic information is the
//! prior `ln((1-p)/p)`. The channel variable paired with a source check adds
//! that check's `Isc_cc` to its intrinsic LLR.

use serde::{Deserialize, Serialize};

use crate::arith::{Arithmetic, FixedArith, FloatArith, MAX_CHECK_DEGREE};
use crate::code::QcCode;
use crate::error::{Error, Result};
use crate::fixed::TanhLut;
use crate::gf2::BitVector;
use crate::graph::JointGraph;

pub const DEFAULT_SOURCE_PRIOR: f64 = 0.04;
pub const DEFAULT_MAX_ITERS: usize = 50;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Schedule {
    #[default]
    ChannelFirst,
    SourceFirst,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    #[default]
    Float,
    Q6,
}

impl Engine {
    pub fn name(&self) -> &'static str {
        match self {
            Engine::Float => "float",
            Engine::Q6 => "q6",
        }
    }
}

impl std::fmt::Display for Engine {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Engine {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "float" | "float64" | "fp" => Ok(Engine::Float),
            "q6" | "fixed6" => Ok(Engine::Q6),
            other => Err(Error::InvalidInput(format!("unknown engine {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecodeConfig {
    pub max_iters: usize,
    pub schedule: Schedule,
    pub early_stop: bool,
    pub engine: Engine,
    /// Probability of a 1 in the source.
    pub source_prior: f64,
    /// Skip the source layers and keep `Isc_cc` at zero, leaving a plain
    /// layered decoder for the channel code.
    pub channel_only: bool,
}

impl Default for DecodeConfig {
    fn default() -> Self {
        Self {
            max_iters: DEFAULT_MAX_ITERS,
            schedule: Schedule::ChannelFirst,
            early_stop: true,
            engine: Engine::Float,
            source_prior: DEFAULT_SOURCE_PRIOR,
            channel_only: false,
        }
    }
}

impl DecodeConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iters == 0 {
            return Err(Error::InvalidInput("max_iters must be at least 1".into()));
        }
        prior_llr(self.source_prior)?;
        Ok(())
    }
}

/// Source prior LLR `ln((1-p)/p)`, defined for `0 < p < 0.5`.
pub fn prior_llr(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 0.5) {
        return Err(Error::InvalidInput(format!(
            "source prior must lie in (0, 0.5), got {p}"
        )));
    }
    Ok(((1.0 - p) / p).ln())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecodeResult {
    pub s_hat: BitVector,
    pub c_hat: BitVector,
    pub iterations_used: usize,
    pub parity_ok: bool,
    pub source_consistent: bool,
}

impl DecodeResult {
    pub fn converged(&self) -> bool {
        self.parity_ok && self.source_consistent
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Source,
    Channel,
}

/// Snapshot handed to a trace observer after each layer's check update.
#[derive(Debug)]
pub struct LayerEvent<'a, M> {
    pub iteration: usize,
    pub side: Side,
    pub layer: usize,
    /// C2V messages of the layer's edges, in edge order.
    pub alpha: &'a [M],
    /// `Isc_cc` of the layer's checks (source layers only).
    pub cross: Option<&'a [M]>,
}

/// Working state of one decoding attempt.
#[derive(Clone, Debug)]
pub struct SoftFrame<A: Arithmetic> {
    /// Channel LLRs, one per transmitted bit.
    pub lcc: Vec<A::Msg>,
    /// Source prior LLRs, one per (punctured) source bit.
    pub lsc: Vec<A::Msg>,
    pub alpha_sc: Vec<A::Msg>,
    pub beta_sc: Vec<A::Msg>,
    pub alpha_cc: Vec<A::Msg>,
    pub beta_cc: Vec<A::Msg>,
    /// Running `sum_j alpha_jk` per variable.
    alpha_sum_sc: Vec<A::Acc>,
    alpha_sum_cc: Vec<A::Acc>,
    /// Channel-to-source messages, one per source check.
    pub icc_sc: Vec<A::Msg>,
    /// Source-to-channel messages, one per source check.
    pub isc_cc: Vec<A::Msg>,
}

impl<A: Arithmetic> SoftFrame<A> {
    /// Initial state: intrinsic LLRs in place, every C2V and cross message
    /// zero, and every V2C message equal to its variable's intrinsic LLR.
    pub fn init(graph: &JointGraph, arith: &A, y_llr: &[f64], p: f64) -> Result<Self> {
        if y_llr.len() != graph.channel.n_vars() {
            return Err(Error::DimensionMismatch {
                op: "channel LLRs",
                expected: graph.channel.n_vars(),
                found: y_llr.len(),
            });
        }
        if y_llr.iter().any(|v| v.is_nan()) {
            return Err(Error::InvalidInput("channel LLRs contain NaN".into()));
        }
        let prior = arith.from_llr(prior_llr(p)?);
        let lcc: Vec<A::Msg> = y_llr.iter().map(|&x| arith.from_llr(x)).collect();
        let lsc = vec![prior; graph.source.n_vars()];
        let beta_sc = vec![prior; graph.source.n_edges()];
        let beta_cc = (0..graph.channel.n_edges())
            .map(|e| lcc[graph.channel.var(e)])
            .collect();
        let zero = A::Msg::default();
        Ok(Self {
            lcc,
            lsc,
            alpha_sc: vec![zero; graph.source.n_edges()],
            beta_sc,
            alpha_cc: vec![zero; graph.channel.n_edges()],
            beta_cc,
            alpha_sum_sc: vec![arith.zero_acc(); graph.source.n_vars()],
            alpha_sum_cc: vec![arith.zero_acc(); graph.channel.n_vars()],
            icc_sc: vec![zero; graph.n_paired()],
            isc_cc: vec![zero; graph.n_paired()],
        })
    }

    /// Source V2C: `beta_jk = Lsc_k + sum_{j' != j} alpha_j'k` for the layer's edges.
    pub fn source_vnp(&mut self, graph: &JointGraph, arith: &A, layer: usize) {
        let side = &graph.source;
        for e in side.layer_edges(layer) {
            let k = side.var(e);
            let acc = arith.sub(arith.add(self.alpha_sum_sc[k], self.lsc[k]), self.alpha_sc[e]);
            self.beta_sc[e] = arith.narrow(acc);
        }
    }

    /// Source C2V with the `Icc_sc` factor, and the total-product `Isc_cc`.
    pub fn source_cnp(&mut self, graph: &JointGraph, arith: &A, layer: usize) {
        let side = &graph.source;
        let mut out = [A::Msg::default(); MAX_CHECK_DEGREE];
        for check in side.layers()[layer].clone() {
            let edges = side.edges(check);
            let d = edges.len();
            let beta = &self.beta_sc[edges.clone()];
            self.isc_cc[check] =
                arith.check_extrinsic_total(Some(self.icc_sc[check]), beta, &mut out[..d]);
            for (i, e) in edges.enumerate() {
                let k = side.var(e);
                let acc = arith.sub(self.alpha_sum_sc[k], self.alpha_sc[e]);
                self.alpha_sum_sc[k] = arith.add(acc, out[i]);
                self.alpha_sc[e] = out[i];
            }
        }
    }

    /// Channel V2C; variables paired with a source check add its `Isc_cc`.
    pub fn channel_vnp(&mut self, graph: &JointGraph, arith: &A, layer: usize) {
        let side = &graph.channel;
        for e in side.layer_edges(layer) {
            let k = side.var(e);
            let mut acc = arith.add(self.alpha_sum_cc[k], self.lcc[k]);
            if let Some(i) = graph.partner_of_channel_var(k) {
                acc = arith.add(acc, self.isc_cc[i]);
            }
            self.beta_cc[e] = arith.narrow(arith.sub(acc, self.alpha_cc[e]));
        }
    }

    pub fn channel_cnp(&mut self, graph: &JointGraph, arith: &A, layer: usize) {
        let side = &graph.channel;
        let mut out = [A::Msg::default(); MAX_CHECK_DEGREE];
        for check in side.layers()[layer].clone() {
            let edges = side.edges(check);
            let d = edges.len();
            arith.check_extrinsic(None, &self.beta_cc[edges.clone()], &mut out[..d]);
            for (i, e) in edges.enumerate() {
                let k = side.var(e);
                let acc = arith.sub(self.alpha_sum_cc[k], self.alpha_cc[e]);
                self.alpha_sum_cc[k] = arith.add(acc, out[i]);
                self.alpha_cc[e] = out[i];
            }
        }
    }

    /// `Icc_sc_k = Lcc_k + sum_j alpha_jk` over every channel check of the
    /// paired variable `k`.
    pub fn channel_to_source_msg(&mut self, graph: &JointGraph, arith: &A) {
        let off = graph.link_offset();
        for (i, m) in self.icc_sc.iter_mut().enumerate() {
            let k = off + i;
            *m = arith.narrow(arith.add(self.alpha_sum_cc[k], self.lcc[k]));
        }
    }

    /// A-posteriori LLRs `(lsc, lcc)`.
    pub fn posteriors(&self, graph: &JointGraph, arith: &A) -> (Vec<A::Msg>, Vec<A::Msg>) {
        let lsc = self
            .lsc
            .iter()
            .zip(&self.alpha_sum_sc)
            .map(|(&l, &s)| arith.narrow(arith.add(s, l)))
            .collect();
        let lcc = self
            .lcc
            .iter()
            .zip(&self.alpha_sum_cc)
            .enumerate()
            .map(|(k, (&l, &s))| {
                let mut acc = arith.add(s, l);
                if let Some(i) = graph.partner_of_channel_var(k) {
                    acc = arith.add(acc, self.isc_cc[i]);
                }
                arith.narrow(acc)
            })
            .collect();
        (lsc, lcc)
    }

    pub fn alpha_sum_sc(&self) -> &[A::Acc] {
        &self.alpha_sum_sc
    }

    pub fn alpha_sum_cc(&self) -> &[A::Acc] {
        &self.alpha_sum_cc
    }

    /// Overwrites one source C2V message, keeping the per-variable sums consistent.
    pub fn set_alpha_sc(&mut self, graph: &JointGraph, arith: &A, edge: usize, value: A::Msg) {
        let k = graph.source.var(edge);
        self.alpha_sum_sc[k] = arith.add(arith.sub(self.alpha_sum_sc[k], self.alpha_sc[edge]), value);
        self.alpha_sc[edge] = value;
    }

    /// Overwrites one channel C2V message, keeping the per-variable sums consistent.
    pub fn set_alpha_cc(&mut self, graph: &JointGraph, arith: &A, edge: usize, value: A::Msg) {
        let k = graph.channel.var(edge);
        self.alpha_sum_cc[k] = arith.add(arith.sub(self.alpha_sum_cc[k], self.alpha_cc[edge]), value);
        self.alpha_cc[edge] = value;
    }
}

fn hard_bits<A: Arithmetic>(arith: &A, llrs: &[A::Msg]) -> BitVector {
    let mut v = BitVector::zeros(llrs.len());
    for (i, &m) in llrs.iter().enumerate() {
        if arith.is_one(m) {
            v.set(i, true);
        }
    }
    v
}

/// Runs the layered joint decoder with a given arithmetic, reporting every
/// layer update to `observe`.
pub fn decode_with<A, F>(
    graph: &JointGraph,
    arith: &A,
    y_llr: &[f64],
    config: &DecodeConfig,
    mut observe: F,
) -> Result<DecodeResult>
where
    A: Arithmetic,
    F: FnMut(&LayerEvent<'_, A::Msg>),
{
    config.validate()?;
    if graph.source.max_degree() > MAX_CHECK_DEGREE || graph.channel.max_degree() > MAX_CHECK_DEGREE {
        return Err(Error::InvalidInput(format!(
            "check degree above {MAX_CHECK_DEGREE} is not supported"
        )));
    }
    let mut frame = SoftFrame::init(graph, arith, y_llr, config.source_prior)?;

    let channel_pass = |frame: &mut SoftFrame<A>, it: usize, observe: &mut F| {
        for layer in 0..graph.channel.layers().len() {
            frame.channel_vnp(graph, arith, layer);
            frame.channel_cnp(graph, arith, layer);
            observe(&LayerEvent {
                iteration: it,
                side: Side::Channel,
                layer,
                alpha: &frame.alpha_cc[graph.channel.layer_edges(layer)],
                cross: None,
            });
        }
        if !config.channel_only {
            frame.channel_to_source_msg(graph, arith);
        }
    };
    let source_pass = |frame: &mut SoftFrame<A>, it: usize, observe: &mut F| {
        if config.channel_only {
            return;
        }
        for layer in 0..graph.source.layers().len() {
            frame.source_vnp(graph, arith, layer);
            frame.source_cnp(graph, arith, layer);
            observe(&LayerEvent {
                iteration: it,
                side: Side::Source,
                layer,
                alpha: &frame.alpha_sc[graph.source.layer_edges(layer)],
                cross: Some(&frame.isc_cc[graph.source.layers()[layer].clone()]),
            });
        }
    };

    let mut result = None;
    for it in 1..=config.max_iters {
        match config.schedule {
            Schedule::ChannelFirst => {
                channel_pass(&mut frame, it, &mut observe);
                source_pass(&mut frame, it, &mut observe);
            }
            Schedule::SourceFirst => {
                source_pass(&mut frame, it, &mut observe);
                channel_pass(&mut frame, it, &mut observe);
            }
        }
        let (lsc, lcc) = frame.posteriors(graph, arith);
        let s_hat = hard_bits(arith, &lsc);
        let c_hat = hard_bits(arith, &lcc);
        let parity_ok = graph.parity_ok(&c_hat);
        let source_consistent = graph.source_consistent(&s_hat, &c_hat);
        let done = config.early_stop
            && parity_ok
            && (source_consistent || config.channel_only);
        result = Some(DecodeResult {
            s_hat,
            c_hat,
            iterations_used: it,
            parity_ok,
            source_consistent,
        });
        if done {
            break;
        }
    }
    Ok(result.expect("max_iters >= 1"))
}

/// A decoder bound to one graph, reusable across frames and threads.
#[derive(Clone, Debug)]
pub struct JointDecoder {
    graph: JointGraph,
    config: DecodeConfig,
}

impl JointDecoder {
    pub fn new(graph: JointGraph, config: DecodeConfig) -> Result<Self> {
        config.validate()?;
        Ok(Self { graph, config })
    }

    pub fn for_code(code: &QcCode, config: DecodeConfig) -> Result<Self> {
        Self::new(JointGraph::from_code(code)?, config)
    }

    pub fn graph(&self) -> &JointGraph {
        &self.graph
    }

    pub fn config(&self) -> &DecodeConfig {
        &self.config
    }

    pub fn with_config(&self, config: DecodeConfig) -> Result<Self> {
        Self::new(self.graph.clone(), config)
    }

    pub fn decode(&self, y_llr: &[f64]) -> Result<DecodeResult> {
        decode_graph(&self.graph, y_llr, &self.config)
    }
}

/// Decodes one frame on a prebuilt graph with the engine named in `config`.
pub fn decode_graph(graph: &JointGraph, y_llr: &[f64], config: &DecodeConfig) -> Result<DecodeResult> {
    match config.engine {
        Engine::Float => decode_with(graph, &FloatArith, y_llr, config, |_| {}),
        Engine::Q6 => decode_with(graph, &FixedArith::q6(), y_llr, config, |_| {}),
    }
}

/// Decodes one frame with the engine named in `config`.
pub fn decode(y_llr: &[f64], code: &QcCode, config: &DecodeConfig) -> Result<DecodeResult> {
    JointDecoder::for_code(code, *config)?.decode(y_llr)
}

/// The 6-bit engine regardless of `config.engine`.
pub fn decode_q6(y_llr: &[f64], code: &QcCode, config: &DecodeConfig) -> Result<DecodeResult> {
    let graph = JointGraph::from_code(code)?;
    decode_with(&graph, &FixedArith::new(TanhLut::q6()), y_llr, config, |_| {})
}
