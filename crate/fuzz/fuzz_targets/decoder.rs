#![no_main]

use std::sync::OnceLock;

use libfuzzer_sys::fuzz_target;
use qcjscc::decoder::{decode_graph, DecodeConfig, Engine};
use qcjscc::graph::JointGraph;
use qcjscc::QcCode;

fn graph() -> &'static JointGraph {
    static G: OnceLock<JointGraph> = OnceLock::new();
    G.get_or_init(|| JointGraph::from_code(&QcCode::construct(1, 4).unwrap()).unwrap())
}

// First byte picks the engine and iteration budget; the rest are LLRs, either
// one signed byte per bit (quarter steps) or raw little-endian f64 words.
fuzz_target!(|data: &[u8]| {
    let Some((&mode, rest)) = data.split_first() else { return };
    let g = graph();
    let n = g.channel.n_vars();
    let llr: Vec<f64> = if mode & 0x80 == 0 {
        (0..n).map(|i| rest.get(i).map_or(0.0, |&b| b as i8 as f64 / 4.0)).collect()
    } else {
        (0..n)
            .map(|i| {
                let mut w = [0u8; 8];
                for (k, slot) in w.iter_mut().enumerate() {
                    *slot = rest.get(i * 8 + k).copied().unwrap_or(0);
                }
                f64::from_le_bytes(w)
            })
            .collect()
    };
    let config = DecodeConfig {
        engine: if mode & 1 == 0 { Engine::Float } else { Engine::Q6 },
        max_iters: 1 + (mode as usize >> 1 & 0x0f),
        ..DecodeConfig::default()
    };
    match decode_graph(g, &llr, &config) {
        Ok(r) => {
            assert!(r.iterations_used >= 1 && r.iterations_used <= config.max_iters);
            assert_eq!(r.s_hat.len(), g.source.n_vars());
            assert_eq!(r.parity_ok, g.parity_ok(&r.c_hat));
            assert_eq!(r.source_consistent, g.source_consistent(&r.s_hat, &r.c_hat));
        }
        Err(_) => assert!(llr.iter().any(|x| x.is_nan())),
    }
});
