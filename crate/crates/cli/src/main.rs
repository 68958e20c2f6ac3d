use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use qcjscc::channel::{add_noise_with, modulate, sigma_for, DEFAULT_RATE};
use qcjscc::code::{check_girth, CHANNEL_REGION, SOURCE_REGION};
use qcjscc::decoder::{DecodeConfig, Engine};
use qcjscc::fixed::TanhLut;
use qcjscc::interleaver::InterleaverKind;
use qcjscc::pbm::{Bitmap, PbmFormat};
use qcjscc::sweep::{
    check_feature_image, frame_rng, gnuplot_script, image_success_count, roundtrip, run_sweep,
    to_csv, transmit_image, Pipeline, SweepConfig,
};
use qcjscc::{codefile, textio, QcCode};

const EXIT_USAGE: u8 = 1;
const EXIT_DATA: u8 = 2;
const EXIT_SELF_TEST: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "qcjscc", version, about = "QC-LDPC joint source-channel codec and experiment harness")]
struct Cli {
    /// TOML experiment config; command-line flags override its fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a code and write it as a code file.
    Construct {
        #[arg(long)]
        z: Option<usize>,
        /// Construction seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Interleave and encode a source bit file (or a PBM image) into a codeword.
    Encode {
        #[command(flatten)]
        code: CodeArgs,
        #[arg(long, conflicts_with = "image", required_unless_present = "image")]
        input: Option<PathBuf>,
        #[arg(long)]
        image: Option<PathBuf>,
        #[command(flatten)]
        il: InterleaverArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// BPSK-modulate a codeword, add AWGN and write channel LLRs.
    Channel {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        ebn0: f64,
        /// Source bits per channel symbol used to scale the noise.
        #[arg(long, default_value_t = DEFAULT_RATE)]
        rate: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decode channel LLRs into source bits.
    Decode {
        #[command(flatten)]
        code: CodeArgs,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        engine: Option<Engine>,
        #[arg(long)]
        max_iters: Option<usize>,
        /// Probability of a 1 in the source.
        #[arg(long)]
        prior: Option<f64>,
        #[command(flatten)]
        il: InterleaverArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monte-Carlo BER sweep; writes CSV.
    BerSweep {
        #[command(flatten)]
        code: CodeArgs,
        #[command(flatten)]
        run: RunArgs,
        #[command(flatten)]
        il: InterleaverArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Send a 160x40 feature image through the chain at each Eb/N0.
    ImageDemo {
        #[command(flatten)]
        code: CodeArgs,
        #[arg(long)]
        image: PathBuf,
        #[command(flatten)]
        run: RunArgs,
        #[command(flatten)]
        il: InterleaverArgs,
        /// Use a noiseless channel instead of the Eb/N0 list.
        #[arg(long)]
        noiseless: bool,
        /// Also count error-free trials out of this many noise draws per point.
        #[arg(long, default_value_t = 0)]
        trials: usize,
        /// Output directory for received images and the report.
        #[arg(long)]
        out: PathBuf,
    },
    /// Noiseless full-chain self-test; exits 3 on any failure.
    Roundtrip {
        #[command(flatten)]
        code: CodeArgs,
        #[command(flatten)]
        run: RunArgs,
        #[command(flatten)]
        il: InterleaverArgs,
    },
    /// Print the 6-bit check-node lookup table as hex.
    LutDump {
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Emit a gnuplot script for a BER CSV.
    PlotScript {
        #[arg(long)]
        csv: PathBuf,
        #[arg(long, value_delimiter = ',', default_values_t = [Engine::Float, Engine::Q6])]
        engine: Vec<Engine>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct CodeArgs {
    /// Code file; without it the default code is constructed.
    #[arg(long)]
    code: Option<PathBuf>,
    #[arg(long)]
    z: Option<usize>,
    #[arg(long)]
    code_seed: Option<u64>,
}

#[derive(Args, Debug)]
struct InterleaverArgs {
    #[arg(long)]
    interleaver: Option<InterleaverKind>,
    #[arg(long)]
    interleaver_seed: Option<u64>,
}

#[derive(Args, Debug)]
struct RunArgs {
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    ebn0_list: Option<Vec<f64>>,
    #[arg(long)]
    frames: Option<usize>,
    #[arg(long)]
    max_iters: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    engine: Option<Vec<Engine>>,
    /// Master seed for source bits and noise.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    workers: Option<usize>,
}

/// Invalid flag combinations detected after parsing.
#[derive(Debug)]
struct UsageError(String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

fn load_config(path: Option<&Path>) -> Result<SweepConfig> {
    let Some(path) = path else {
        return Ok(SweepConfig::default());
    };
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

impl CodeArgs {
    fn apply(&self, cfg: &mut SweepConfig) {
        if let Some(p) = &self.code {
            cfg.code = Some(p.clone());
        }
        if let Some(z) = self.z {
            cfg.z = z;
        }
        if let Some(s) = self.code_seed {
            cfg.code_seed = s;
        }
    }
}

impl InterleaverArgs {
    fn apply(&self, cfg: &mut SweepConfig) {
        if let Some(k) = self.interleaver {
            cfg.interleaver = k;
        }
        if let Some(s) = self.interleaver_seed {
            cfg.interleaver_seed = s;
        }
    }
}

impl RunArgs {
    fn apply(&self, cfg: &mut SweepConfig) {
        if let Some(v) = &self.ebn0_list {
            cfg.ebn0_db = v.clone();
        }
        if let Some(f) = self.frames {
            cfg.frames = f;
        }
        if let Some(m) = self.max_iters {
            cfg.max_iters = m;
        }
        if let Some(e) = &self.engine {
            cfg.engines = e.clone();
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(w) = self.workers {
            cfg.workers = w;
        }
    }
}

fn pipeline(cfg: &SweepConfig) -> Result<Pipeline> {
    let code = cfg.load_code().context("loading code")?;
    let spec = cfg.interleaver_spec(code.source_len());
    Ok(Pipeline::new(code, &spec)?)
}

fn write_output(out: Option<&Path>, contents: &[u8]) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, contents).with_context(|| format!("writing {}", p.display())),
        None => {
            use std::io::Write;
            std::io::stdout().write_all(contents)?;
            Ok(())
        }
    }
}

fn describe(code: &QcCode) -> String {
    let yes = |b: bool| if b { "yes" } else { "no" };
    let hs_free = code.shifts().is_six_cycle_free(&SOURCE_REGION);
    let hc_free = code.shifts().is_six_cycle_free(&CHANNEL_REGION);
    format!(
        "z={} Hs={}x{} Hc={}x{} girth>=6: {} girth>=8 in Hs: {} girth>=8 in Hc: {} H1 invertible: yes",
        code.z(),
        code.compressed_len(),
        code.source_len(),
        code.channel_checks(),
        code.codeword_len(),
        yes(check_girth(code)),
        yes(hs_free),
        yes(hc_free),
    )
}

fn run(cli: Cli) -> Result<u8> {
    let mut cfg = load_config(cli.config.as_deref())?;
    match cli.command {
        Command::Construct { z, seed, out } => {
            let code = QcCode::construct(seed.unwrap_or(cfg.code_seed), z.unwrap_or(cfg.z))?;
            codefile::save(&code, &out)?;
            println!("{}", describe(&code));
        }
        Command::Encode { code, input, image, il, out } => {
            code.apply(&mut cfg);
            il.apply(&mut cfg);
            let p = pipeline(&cfg)?;
            let s = match (input, image) {
                (Some(path), _) => textio::read_bits(&path).with_context(|| format!("reading {}", path.display()))?,
                (None, Some(path)) => {
                    let img = Bitmap::load(&path).with_context(|| format!("reading {}", path.display()))?;
                    if let Some(w) = check_feature_image(&img, p.source_len())? {
                        eprintln!("warning: {w}");
                    }
                    img.into_bits()
                }
                (None, None) => return Err(usage("either --input or --image is required")),
            };
            let c = p.transmit(&s)?;
            write_output(out.as_deref(), textio::format_bits(&c).as_bytes())?;
        }
        Command::Channel { input, ebn0, rate, seed, out } => {
            if !ebn0.is_finite() || !rate.is_finite() || rate <= 0.0 {
                return Err(usage("--ebn0 must be finite and --rate positive"));
            }
            let c = textio::read_bits(&input).with_context(|| format!("reading {}", input.display()))?;
            let sigma = sigma_for(ebn0, rate);
            let y = add_noise_with(&modulate(&c), sigma, &mut frame_rng(seed, 0, 1));
            let scale = 2.0 / (sigma * sigma);
            let llr: Vec<f64> = y.iter().map(|v| v * scale).collect();
            write_output(out.as_deref(), textio::format_llrs(&llr).as_bytes())?;
        }
        Command::Decode { code, input, engine, max_iters, prior, il, out } => {
            code.apply(&mut cfg);
            il.apply(&mut cfg);
            if let Some(m) = max_iters {
                cfg.max_iters = m;
            }
            if let Some(p) = prior {
                cfg.source_prior = p;
            }
            let engine = engine.unwrap_or(Engine::Float);
            let dc: DecodeConfig = cfg.decode_config(engine);
            dc.validate()?;
            let p = pipeline(&cfg)?;
            let llr = textio::read_llrs(&input).with_context(|| format!("reading {}", input.display()))?;
            let (s_hat, r) = p.receive(&llr, &dc)?;
            eprintln!(
                "engine={} iterations={} parity_ok={} source_consistent={}",
                engine.name(),
                r.iterations_used,
                r.parity_ok,
                r.source_consistent
            );
            write_output(out.as_deref(), textio::format_bits(&s_hat).as_bytes())?;
        }
        Command::BerSweep { code, run, il, out } => {
            code.apply(&mut cfg);
            run.apply(&mut cfg);
            il.apply(&mut cfg);
            cfg.validate()?;
            let p = pipeline(&cfg)?;
            let records = run_sweep(&cfg, &p)?;
            write_output(out.as_deref(), to_csv(&records).as_bytes())?;
        }
        Command::ImageDemo { code, image, run, il, noiseless, trials, out } => {
            code.apply(&mut cfg);
            run.apply(&mut cfg);
            il.apply(&mut cfg);
            cfg.validate()?;
            let p = pipeline(&cfg)?;
            let img = Bitmap::load(&image).with_context(|| format!("reading {}", image.display()))?;
            if let Some(w) = check_feature_image(&img, p.source_len())? {
                eprintln!("warning: {w}");
            }
            std::fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
            let points: Vec<Option<f64>> = if noiseless {
                vec![None]
            } else {
                cfg.ebn0_db.iter().copied().map(Some).collect()
            };
            let mut report = format!("image={} density={:.4}\n", image.display(), img.density());
            for &engine in &cfg.engines {
                let dc = cfg.decode_config(engine);
                for &point in &points {
                    let r = transmit_image(&p, &img, point, &dc, cfg.seed, 0)?;
                    let tag = point.map_or("noiseless".to_string(), |e| format!("{e}dB"));
                    let file = out.join(format!("received_{}_{tag}.pbm", engine.name()));
                    r.received.save(&file, PbmFormat::Ascii)?;
                    let mut line = r.summary();
                    if let (Some(e), true) = (point, trials > 0) {
                        let ok = image_success_count(&p, &img, e, &dc, cfg.seed, trials, cfg.workers)?;
                        line.push_str(&format!(" error_free_trials={ok}/{trials}"));
                    }
                    println!("{line}");
                    report.push_str(&line);
                    report.push('\n');
                }
            }
            std::fs::write(out.join("report.txt"), report)?;
        }
        Command::Roundtrip { code, run, il } => {
            code.apply(&mut cfg);
            run.apply(&mut cfg);
            il.apply(&mut cfg);
            if run.frames.is_none() && cli.config.is_none() {
                cfg.frames = 1000;
            }
            cfg.validate()?;
            let p = pipeline(&cfg)?;
            let rep = roundtrip(&p, cfg.frames, cfg.source_prior, cfg.seed, &cfg.engines, cfg.max_iters, cfg.workers)?;
            println!("{}", rep.summary());
            if !rep.passed() {
                return Ok(EXIT_SELF_TEST);
            }
        }
        Command::LutDump { out } => {
            write_output(out.as_deref(), TanhLut::q6().to_hex().as_bytes())?;
        }
        Command::PlotScript { csv, engine, out } => {
            let script = gnuplot_script(&csv.to_string_lossy(), &engine);
            write_output(out.as_deref(), script.as_bytes())?;
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<UsageError>().is_some() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::from(EXIT_DATA)
            }
        }
    }
}
