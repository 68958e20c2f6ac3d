//! Monte-Carlo experiments: BER sweeps, the feature-image demo and the
//! noiseless roundtrip self-test.
//!
//! Every frame draws its source bits and its noise from ChaCha8 streams keyed
//! by the master seed and the frame index, so outcomes do not depend on how
//! frames are scheduled across workers. The same source and unit-variance
//! noise are reused at every Eb/N0 point and for every engine.

use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{modulate, sigma_for};
use crate::code::{QcCode, DEFAULT_Z};
use crate::decoder::{decode_graph, DecodeConfig, DecodeResult, Engine, DEFAULT_MAX_ITERS, DEFAULT_SOURCE_PRIOR};
use crate::encoder::EncoderContext;
use crate::error::{Error, Result};
use crate::gf2::BitVector;
use crate::graph::JointGraph;
use crate::interleaver::{Interleaver, InterleaverKind, InterleaverSpec};
use crate::pbm::{Bitmap, FEATURE_HEIGHT, FEATURE_WIDTH};

pub const CSV_HEADER: &str = "ebn0_db,engine,frames,bit_errors,ber,frame_errors,avg_iters";

/// LLR magnitude standing in for a noiseless channel.
pub const NOISELESS_LLR: f64 = 1e6;

const SOURCE_STREAM: u64 = 0;
const NOISE_STREAM: u64 = 1;

/// Generator for one frame's source bits or noise.
pub fn frame_rng(master_seed: u64, frame: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(frame.wrapping_mul(2).wrapping_add(stream));
    rng
}

pub fn random_source(n: usize, p: f64, rng: &mut impl Rng) -> BitVector {
    let mut v = BitVector::zeros(n);
    for i in 0..n {
        if rng.random_bool(p) {
            v.set(i, true);
        }
    }
    v
}

fn default_ebn0_grid() -> Vec<f64> {
    vec![-2.0, -1.5, -1.0, -0.5, 0.0]
}

fn default_engines() -> Vec<Engine> {
    vec![Engine::Float, Engine::Q6]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    /// Code file; the default construction is used when absent.
    pub code: Option<PathBuf>,
    pub z: usize,
    pub code_seed: u64,
    pub ebn0_db: Vec<f64>,
    pub source_prior: f64,
    pub frames: usize,
    pub max_iters: usize,
    pub engines: Vec<Engine>,
    pub seed: u64,
    pub interleaver: InterleaverKind,
    pub interleaver_seed: u64,
    /// Worker threads; 0 uses every available core.
    pub workers: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            code: None,
            z: DEFAULT_Z,
            code_seed: 1,
            ebn0_db: default_ebn0_grid(),
            source_prior: DEFAULT_SOURCE_PRIOR,
            frames: 100_000,
            max_iters: DEFAULT_MAX_ITERS,
            engines: default_engines(),
            seed: 1,
            interleaver: InterleaverKind::None,
            interleaver_seed: 0,
            workers: 0,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.frames == 0 {
            return Err(Error::InvalidInput("frames must be at least 1".into()));
        }
        if self.ebn0_db.is_empty() || self.ebn0_db.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput("Eb/N0 list must be non-empty and finite".into()));
        }
        if self.engines.is_empty() {
            return Err(Error::InvalidInput("at least one engine is required".into()));
        }
        self.decode_config(Engine::Float).validate()
    }

    pub fn decode_config(&self, engine: Engine) -> DecodeConfig {
        DecodeConfig {
            max_iters: self.max_iters,
            engine,
            source_prior: self.source_prior,
            ..DecodeConfig::default()
        }
    }

    pub fn interleaver_spec(&self, n: usize) -> InterleaverSpec {
        InterleaverSpec {
            kind: self.interleaver,
            n,
            seed: self.interleaver_seed,
            protected_region: None,
        }
    }

    pub fn load_code(&self) -> Result<QcCode> {
        match &self.code {
            Some(path) => crate::codefile::load(path),
            None => QcCode::construct(self.code_seed, self.z),
        }
    }
}

/// Everything needed to push frames through the chain for one code.
#[derive(Clone, Debug)]
pub struct Pipeline {
    code: QcCode,
    encoder: EncoderContext,
    graph: JointGraph,
    interleaver: Interleaver,
    rate: f64,
}

impl Pipeline {
    pub fn new(code: QcCode, interleaver: &InterleaverSpec) -> Result<Self> {
        if interleaver.n != code.source_len() {
            return Err(Error::DimensionMismatch {
                op: "interleaver length",
                expected: code.source_len(),
                found: interleaver.n,
            });
        }
        let encoder = EncoderContext::new(&code)?;
        let graph = JointGraph::from_code(&code)?;
        let rate = code.source_len() as f64 / code.codeword_len() as f64;
        Ok(Self {
            interleaver: interleaver.interleaver()?,
            code,
            encoder,
            graph,
            rate,
        })
    }

    pub fn code(&self) -> &QcCode {
        &self.code
    }

    pub fn encoder(&self) -> &EncoderContext {
        &self.encoder
    }

    pub fn graph(&self) -> &JointGraph {
        &self.graph
    }

    /// Source bits per channel symbol.
    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn source_len(&self) -> usize {
        self.code.source_len()
    }

    /// Interleave and encode.
    pub fn transmit(&self, s: &BitVector) -> Result<BitVector> {
        self.encoder.encode(&self.interleaver.interleave(s)?)
    }

    /// Decode and deinterleave; returns the source estimate in source order.
    pub fn receive(&self, llr: &[f64], config: &DecodeConfig) -> Result<(BitVector, DecodeResult)> {
        let r = decode_graph(&self.graph, llr, config)?;
        Ok((self.interleaver.deinterleave(&r.s_hat)?, r))
    }

    /// Channel LLRs for `x + sigma * noise`.
    pub fn llrs(x: &[f64], noise: &[f64], sigma: f64) -> Vec<f64> {
        let scale = 2.0 / (sigma * sigma);
        x.iter().zip(noise).map(|(&a, &n)| scale * (a + sigma * n)).collect()
    }

    pub fn noiseless_llrs(x: &[f64]) -> Vec<f64> {
        x.iter().map(|&a| a * NOISELESS_LLR).collect()
    }
}

pub fn unit_noise(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..n).map(|_| StandardNormal.sample(rng)).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BerRecord {
    pub ebn0_db: f64,
    pub engine: Engine,
    pub frames: u64,
    pub bit_errors: u64,
    pub ber: f64,
    pub frame_errors: u64,
    pub avg_iters: f64,
}

impl BerRecord {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{:.6e},{},{:.4}",
            self.ebn0_db,
            self.engine.name(),
            self.frames,
            self.bit_errors,
            self.ber,
            self.frame_errors,
            self.avg_iters
        )
    }
}

pub fn to_csv(records: &[BerRecord]) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for r in records {
        s.push_str(&r.csv_row());
        s.push('\n');
    }
    s
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
struct Tally {
    bit_errors: u64,
    frame_errors: u64,
    iterations: u64,
}

impl Tally {
    fn add(mut self, o: Tally) -> Tally {
        self.bit_errors += o.bit_errors;
        self.frame_errors += o.frame_errors;
        self.iterations += o.iterations;
        self
    }
}

fn thread_pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidInput(format!("cannot start worker pool: {e}")))
}

/// Runs a BER sweep, one record per (Eb/N0, engine) in grid-major order.
pub fn run_sweep(cfg: &SweepConfig, pipeline: &Pipeline) -> Result<Vec<BerRecord>> {
    cfg.validate()?;
    let n = pipeline.source_len();
    let sigmas: Vec<f64> = cfg.ebn0_db.iter().map(|&e| sigma_for(e, pipeline.rate())).collect();
    let configs: Vec<DecodeConfig> = cfg.engines.iter().map(|&e| cfg.decode_config(e)).collect();
    let cells = sigmas.len() * configs.len();

    let frame = |f: usize| -> Result<Vec<Tally>> {
        let s = random_source(n, cfg.source_prior, &mut frame_rng(cfg.seed, f as u64, SOURCE_STREAM));
        let x = modulate(&pipeline.transmit(&s)?);
        let noise = unit_noise(x.len(), &mut frame_rng(cfg.seed, f as u64, NOISE_STREAM));
        let mut out = Vec::with_capacity(cells);
        for &sigma in &sigmas {
            let llr = Pipeline::llrs(&x, &noise, sigma);
            for dc in &configs {
                let (s_hat, r) = pipeline.receive(&llr, dc)?;
                let errors = s_hat.hamming_distance(&s) as u64;
                out.push(Tally {
                    bit_errors: errors,
                    frame_errors: u64::from(errors > 0),
                    iterations: r.iterations_used as u64,
                });
            }
        }
        Ok(out)
    };

    let tallies = thread_pool(cfg.workers)?.install(|| {
        (0..cfg.frames)
            .into_par_iter()
            .map(frame)
            .try_reduce(
                || vec![Tally::default(); cells],
                |a, b| Ok(a.into_iter().zip(b).map(|(x, y)| x.add(y)).collect()),
            )
    })?;

    let frames = cfg.frames as u64;
    let mut records = Vec::with_capacity(cells);
    for (i, &ebn0) in cfg.ebn0_db.iter().enumerate() {
        for (j, &engine) in cfg.engines.iter().enumerate() {
            let t = tallies[i * configs.len() + j];
            records.push(BerRecord {
                ebn0_db: ebn0,
                engine,
                frames,
                bit_errors: t.bit_errors,
                ber: t.bit_errors as f64 / (frames * n as u64) as f64,
                frame_errors: t.frame_errors,
                avg_iters: t.iterations as f64 / frames as f64,
            });
        }
    }
    Ok(records)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ImageReport {
    pub ebn0_db: f64,
    pub engine: Engine,
    pub pixel_errors: usize,
    pub iterations: usize,
    pub parity_ok: bool,
    pub source_consistent: bool,
    pub received: Bitmap,
}

impl ImageReport {
    pub fn summary(&self) -> String {
        format!(
            "ebn0_db={} engine={} pixel_errors={} iterations={} parity_ok={} source_consistent={}",
            self.ebn0_db,
            self.engine.name(),
            self.pixel_errors,
            self.iterations,
            self.parity_ok,
            self.source_consistent
        )
    }
}

/// Whether an image is acceptable for the demo; densities above the design
/// point only deserve a warning.
pub fn check_feature_image(image: &Bitmap, source_len: usize) -> Result<Option<String>> {
    image.require_size(FEATURE_WIDTH, FEATURE_HEIGHT)?;
    if image.bits().len() != source_len {
        return Err(Error::DimensionMismatch {
            op: "image vs source length",
            expected: source_len,
            found: image.bits().len(),
        });
    }
    let d = image.density();
    Ok((d > DEFAULT_SOURCE_PRIOR).then(|| {
        format!("black-pixel density {d:.4} exceeds the 0.04 design point; decoding may fail")
    }))
}

/// Sends an image through the full chain once. `trial` selects the noise
/// stream; `ebn0_db = None` means a noiseless channel.
pub fn transmit_image(
    pipeline: &Pipeline,
    image: &Bitmap,
    ebn0_db: Option<f64>,
    config: &DecodeConfig,
    seed: u64,
    trial: u64,
) -> Result<ImageReport> {
    let s = image.bits();
    let x = modulate(&pipeline.transmit(s)?);
    let llr = match ebn0_db {
        Some(e) => {
            let noise = unit_noise(x.len(), &mut frame_rng(seed, trial, NOISE_STREAM));
            Pipeline::llrs(&x, &noise, sigma_for(e, pipeline.rate()))
        }
        None => Pipeline::noiseless_llrs(&x),
    };
    let (s_hat, r) = pipeline.receive(&llr, config)?;
    Ok(ImageReport {
        ebn0_db: ebn0_db.unwrap_or(f64::INFINITY),
        engine: config.engine,
        pixel_errors: s_hat.hamming_distance(s),
        iterations: r.iterations_used,
        parity_ok: r.parity_ok,
        source_consistent: r.source_consistent,
        received: Bitmap::new(image.width(), image.height(), s_hat)?,
    })
}

/// Number of error-free trials out of `trials` independent noise draws.
pub fn image_success_count(
    pipeline: &Pipeline,
    image: &Bitmap,
    ebn0_db: f64,
    config: &DecodeConfig,
    seed: u64,
    trials: usize,
    workers: usize,
) -> Result<usize> {
    thread_pool(workers)?.install(|| {
        (0..trials as u64)
            .into_par_iter()
            .map(|t| transmit_image(pipeline, image, Some(ebn0_db), config, seed, t).map(|r| usize::from(r.pixel_errors == 0)))
            .try_reduce(|| 0, |a, b| Ok(a + b))
    })
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RoundtripReport {
    pub frames: usize,
    pub parity_failures: usize,
    pub consistency_failures: usize,
    /// Frames not recovered bit-exactly, per engine.
    pub recovery_failures: Vec<(Engine, usize)>,
}

impl RoundtripReport {
    pub fn passed(&self) -> bool {
        self.parity_failures == 0
            && self.consistency_failures == 0
            && self.recovery_failures.iter().all(|&(_, n)| n == 0)
    }

    pub fn summary(&self) -> String {
        let rec: Vec<String> = self
            .recovery_failures
            .iter()
            .map(|(e, n)| format!("{}={n}", e.name()))
            .collect();
        format!(
            "frames={} parity_failures={} consistency_failures={} recovery_failures[{}] => {}",
            self.frames,
            self.parity_failures,
            self.consistency_failures,
            rec.join(" "),
            if self.passed() { "PASS" } else { "FAIL" }
        )
    }
}

/// Full-chain self-test on random Bernoulli(p) sources over a noiseless
/// channel: parity, source consistency and exact recovery with each engine.
pub fn roundtrip(
    pipeline: &Pipeline,
    frames: usize,
    p: f64,
    seed: u64,
    engines: &[Engine],
    max_iters: usize,
    workers: usize,
) -> Result<RoundtripReport> {
    let n = pipeline.source_len();
    let configs: Vec<DecodeConfig> = engines
        .iter()
        .map(|&engine| DecodeConfig {
            engine,
            max_iters,
            source_prior: p,
            ..DecodeConfig::default()
        })
        .collect();
    let frame = |f: usize| -> Result<(usize, usize, Vec<usize>)> {
        let s = random_source(n, p, &mut frame_rng(seed, f as u64, SOURCE_STREAM));
        let interleaved = pipeline.interleaver.interleave(&s)?;
        let c = pipeline.encoder.encode(&interleaved)?;
        let parity = usize::from(!pipeline.encoder.parity_ok(&c));
        let consistent = usize::from(!pipeline.encoder.source_consistent(&interleaved, &c));
        let llr = Pipeline::noiseless_llrs(&modulate(&c));
        let mut rec = Vec::with_capacity(configs.len());
        for dc in &configs {
            let (s_hat, _) = pipeline.receive(&llr, dc)?;
            rec.push(usize::from(s_hat != s));
        }
        Ok((parity, consistent, rec))
    };
    let (parity, consistency, rec) = thread_pool(workers)?.install(|| {
        (0..frames).into_par_iter().map(frame).try_reduce(
            || (0, 0, vec![0; configs.len()]),
            |a, b| Ok((a.0 + b.0, a.1 + b.1, a.2.iter().zip(&b.2).map(|(x, y)| x + y).collect())),
        )
    })?;
    Ok(RoundtripReport {
        frames,
        parity_failures: parity,
        consistency_failures: consistency,
        recovery_failures: engines.iter().copied().zip(rec).collect(),
    })
}

/// Gnuplot script plotting BER against Eb/N0 per engine from a sweep CSV.
pub fn gnuplot_script(csv_path: &str, engines: &[Engine]) -> String {
    let mut s = String::new();
    s.push_str("set datafile separator ','\n");
    s.push_str("set logscale y\n");
    s.push_str("set format y '10^{%L}'\n");
    s.push_str("set xlabel 'Eb/N0 (dB)'\n");
    s.push_str("set ylabel 'BER'\n");
    s.push_str("set grid\n");
    let plots: Vec<String> = engines
        .iter()
        .map(|e| {
            format!(
                "'{csv_path}' using 1:(strcol(2) eq '{0}' && $5 > 0 ? $5 : 1/0) skip 1 with linespoints title '{0}'",
                e.name()
            )
        })
        .collect();
    s.push_str("plot ");
    s.push_str(&plots.join(", \\\n     "));
    s.push('\n');
    s
}
