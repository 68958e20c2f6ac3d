//! Independent reference implementations used as test oracles.
//!
//! Nothing here calls into the decoder or the arithmetic engines of the crate;
//! the oracles work directly on row lists and plain `f64`/`i32` values.

#![allow(dead_code)]

use std::collections::HashSet;
use std::path::PathBuf;

use qcjscc::decoder::{LayerEvent, Side};
use qcjscc::fixed::QValue;
use qcjscc::Gf2Matrix;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

/// Matrix from strings of `0`/`1` characters.
pub fn matrix(rows: &[&str]) -> Gf2Matrix {
    let rows: Vec<Vec<u8>> = rows.iter().map(|r| r.bytes().map(|b| b - b'0').collect()).collect();
    Gf2Matrix::from_rows(&rows).unwrap()
}

pub fn rows_of(h: &Gf2Matrix) -> Vec<Vec<usize>> {
    (0..h.rows()).map(|r| (0..h.cols()).filter(|&c| h.get(r, c)).collect()).collect()
}

pub fn syndrome_zero(rows: &[Vec<usize>], bits: &[bool]) -> bool {
    rows.iter().all(|row| row.iter().filter(|&&v| bits[v]).count() % 2 == 0)
}

/// 64-bit FNV-1a.
#[derive(Clone, Copy, Debug)]
pub struct Fnv(pub u64);

impl Default for Fnv {
    fn default() -> Self {
        Fnv(0xcbf2_9ce4_8422_2325)
    }
}

impl Fnv {
    pub fn bytes(&mut self, data: &[u8]) {
        for &b in data {
            self.0 ^= b as u64;
            self.0 = self.0.wrapping_mul(0x0100_0000_01b3);
        }
    }

    pub fn u32(&mut self, v: u32) {
        self.bytes(&v.to_le_bytes());
    }

    pub fn bits(mut self, bits: impl IntoIterator<Item = bool>) -> u64 {
        for b in bits {
            self.bytes(&[b as u8]);
        }
        self.0
    }
}

/// Trace record: iteration, side, layer, the layer's C2V codes and, for
/// source layers, the outgoing cross messages.
pub fn hash_event(h: &mut Fnv, iteration: usize, source: bool, layer: usize, alpha: &[i8], cross: Option<&[i8]>) {
    h.u32(iteration as u32);
    h.bytes(&[source as u8]);
    h.u32(layer as u32);
    h.bytes(&alpha.iter().map(|&a| a as u8).collect::<Vec<_>>());
    if let Some(c) = cross {
        h.bytes(&c.iter().map(|&a| a as u8).collect::<Vec<_>>());
    }
}

pub fn hash_engine_event(h: &mut Fnv, ev: &LayerEvent<'_, QValue>) {
    let alpha: Vec<i8> = ev.alpha.iter().map(|q| q.0).collect();
    let cross: Option<Vec<i8>> = ev.cross.map(|c| c.iter().map(|q| q.0).collect());
    hash_event(h, ev.iteration, ev.side == Side::Source, ev.layer, &alpha, cross.as_deref());
}

// ---------------------------------------------------------------------------
// Flooding sum-product on a single parity-check matrix.

pub struct FloodResult {
    pub bits: Vec<bool>,
    pub iterations: usize,
    pub converged: bool,
}

pub fn flooding_decode(rows: &[Vec<usize>], n: usize, llr: &[f64], max_iters: usize) -> FloodResult {
    const CLIP: f64 = 19.07;
    let mut v2c: Vec<Vec<f64>> = rows.iter().map(|r| r.iter().map(|&v| llr[v]).collect()).collect();
    let mut c2v: Vec<Vec<f64>> = rows.iter().map(|r| vec![0.0; r.len()]).collect();
    let mut bits: Vec<bool> = llr.iter().map(|&l| l < 0.0).collect();
    for it in 1..=max_iters {
        for (ci, row) in rows.iter().enumerate() {
            let t: Vec<f64> = v2c[ci].iter().map(|&m| (m.clamp(-2.0 * CLIP, 2.0 * CLIP) / 2.0).tanh()).collect();
            for k in 0..row.len() {
                let p: f64 = t.iter().enumerate().filter(|&(j, _)| j != k).map(|(_, &x)| x).product();
                c2v[ci][k] = (2.0 * p.atanh()).clamp(-2.0 * CLIP, 2.0 * CLIP);
            }
        }
        let mut total = llr.to_vec();
        for (ci, row) in rows.iter().enumerate() {
            for (k, &v) in row.iter().enumerate() {
                total[v] += c2v[ci][k];
            }
        }
        bits = total.iter().map(|&l| l < 0.0).collect();
        if syndrome_zero(rows, &bits) {
            return FloodResult { bits, iterations: it, converged: true };
        }
        for (ci, row) in rows.iter().enumerate() {
            for (k, &v) in row.iter().enumerate() {
                v2c[ci][k] = total[v] - c2v[ci][k];
            }
        }
    }
    debug_assert_eq!(bits.len(), n);
    FloodResult { bits, iterations: max_iters, converged: false }
}

// ---------------------------------------------------------------------------
// Exhaustive bitwise MAP for a tiny joint code.

/// Every source word with its codeword `[parity | Hs s]`, found by search
/// over all parity patterns.
pub fn enumerate_codebook(hs: &[Vec<usize>], hc: &[Vec<usize>], n_source: usize, n_code: usize) -> Vec<(Vec<bool>, Vec<bool>)> {
    let m = hs.len();
    let n_parity = n_code - m;
    assert!(n_source <= 16 && n_parity <= 16);
    let mut book = Vec::with_capacity(1 << n_source);
    for sw in 0u32..(1 << n_source) {
        let s: Vec<bool> = (0..n_source).map(|i| sw >> i & 1 == 1).collect();
        let b: Vec<bool> = hs.iter().map(|r| r.iter().filter(|&&v| s[v]).count() % 2 == 1).collect();
        let mut found = None;
        for pw in 0u32..(1 << n_parity) {
            let c: Vec<bool> = (0..n_parity).map(|i| pw >> i & 1 == 1).chain(b.iter().copied()).collect();
            if syndrome_zero(hc, &c) {
                assert!(found.is_none(), "parity part is not uniquely determined");
                found = Some(c);
            }
        }
        book.push((s, found.expect("no codeword for this source word")));
    }
    book
}

/// Bitwise MAP source decisions for channel LLRs `llr` and Bernoulli(`p`)
/// source bits.
pub fn bitwise_map(book: &[(Vec<bool>, Vec<bool>)], p: f64, llr: &[f64]) -> Vec<bool> {
    let n = book[0].0.len();
    let logp = |s: &[bool], c: &[bool]| -> f64 {
        let prior: f64 = s.iter().map(|&b| if b { p.ln() } else { (1.0 - p).ln() }).sum();
        let like: f64 = c.iter().zip(llr).map(|(&b, &l)| if b { -l / 2.0 } else { l / 2.0 }).sum();
        prior + like
    };
    let scores: Vec<f64> = book.iter().map(|(s, c)| logp(s, c)).collect();
    let peak = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut one = vec![0.0; n];
    let mut zero = vec![0.0; n];
    for ((s, _), &sc) in book.iter().zip(&scores) {
        let w = (sc - peak).exp();
        for i in 0..n {
            if s[i] {
                one[i] += w;
            } else {
                zero[i] += w;
            }
        }
    }
    (0..n).map(|i| one[i] > zero[i]).collect()
}

// ---------------------------------------------------------------------------
// Scalar 6-bit layered joint decoder.

const QMIN: i32 = -32;
const QMAX: i32 = 31;

fn sat(x: i32) -> i32 {
    x.clamp(QMIN, QMAX)
}

pub fn q6_quantize(x: f64) -> i32 {
    let r = (x * 4.0).round();
    // round half to even
    let r = if (x * 4.0 - (x * 4.0).trunc()).abs() == 0.5 { 2.0 * (x * 4.0 / 2.0).round() } else { r };
    sat(r as i32)
}

pub struct Q6Table(Vec<i32>);

impl Q6Table {
    pub fn new() -> Self {
        let mut t = vec![0; 64 * 64];
        for a in QMIN..=QMAX {
            for b in QMIN..=QMAX {
                let v = 2.0 * ((a as f64 / 8.0).tanh() * (b as f64 / 8.0).tanh()).atanh();
                t[((a + 32) * 64 + (b + 32)) as usize] = q6_quantize(v);
            }
        }
        Q6Table(t)
    }

    pub fn get(&self, a: i32, b: i32) -> i32 {
        self.0[((a + 32) * 64 + (b + 32)) as usize]
    }

    /// Left fold; the empty fold is the largest code.
    pub fn fold(&self, vals: &[i32]) -> i32 {
        match vals.split_first() {
            None => QMAX,
            Some((&first, rest)) => rest.iter().fold(first, |acc, &v| self.get(acc, v)),
        }
    }
}

pub struct RefOutcome {
    pub s_hat: Vec<bool>,
    pub c_hat: Vec<bool>,
    pub iterations: usize,
    pub parity_ok: bool,
    pub source_consistent: bool,
    pub trace: u64,
}

/// Channel-first layered decoding with `layer` consecutive checks per layer.
/// Rows must list variables in ascending order.
pub fn q6_reference_decode(
    hs: &[Vec<usize>],
    hc: &[Vec<usize>],
    n_source: usize,
    n_code: usize,
    layer: usize,
    llr: &[f64],
    p: f64,
    max_iters: usize,
) -> RefOutcome {
    let lut = Q6Table::new();
    let off = n_code - hs.len();
    let lcc: Vec<i32> = llr.iter().map(|&x| q6_quantize(x)).collect();
    let lsc = q6_quantize(((1.0 - p) / p).ln());
    let mut a_cc: Vec<Vec<i32>> = hc.iter().map(|r| vec![0; r.len()]).collect();
    let mut a_sc: Vec<Vec<i32>> = hs.iter().map(|r| vec![0; r.len()]).collect();
    let mut var_cc: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n_code];
    for (c, r) in hc.iter().enumerate() {
        for (k, &v) in r.iter().enumerate() {
            var_cc[v].push((c, k));
        }
    }
    let mut var_sc: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n_source];
    for (c, r) in hs.iter().enumerate() {
        for (k, &v) in r.iter().enumerate() {
            var_sc[v].push((c, k));
        }
    }
    let mut icc = vec![0i32; hs.len()];
    let mut isc = vec![0i32; hs.len()];
    let sum_cc = |a: &Vec<Vec<i32>>, v: usize| -> i32 { var_cc[v].iter().map(|&(c, k)| a[c][k]).sum() };
    let sum_sc = |a: &Vec<Vec<i32>>, v: usize| -> i32 { var_sc[v].iter().map(|&(c, k)| a[c][k]).sum() };

    let mut h = Fnv::default();
    let mut out = None;
    for it in 1..=max_iters {
        for l in 0..hc.len() / layer {
            let checks = l * layer..(l + 1) * layer;
            let mut beta: Vec<Vec<i32>> = Vec::new();
            for c in checks.clone() {
                beta.push(
                    hc[c]
                        .iter()
                        .enumerate()
                        .map(|(k, &v)| {
                            let cross = if v >= off { isc[v - off] } else { 0 };
                            sat(lcc[v] + sum_cc(&a_cc, v) + cross - a_cc[c][k])
                        })
                        .collect(),
                );
            }
            let mut alpha = Vec::new();
            for (c, b) in checks.zip(&beta) {
                for k in 0..b.len() {
                    let others: Vec<i32> = (0..b.len()).filter(|&j| j != k).map(|j| b[j]).collect();
                    a_cc[c][k] = lut.fold(&others);
                    alpha.push(a_cc[c][k] as i8);
                }
            }
            hash_event(&mut h, it, false, l, &alpha, None);
        }
        for (j, m) in icc.iter_mut().enumerate() {
            *m = sat(lcc[off + j] + sum_cc(&a_cc, off + j));
        }
        for l in 0..hs.len() / layer {
            let checks = l * layer..(l + 1) * layer;
            let mut beta: Vec<Vec<i32>> = Vec::new();
            for c in checks.clone() {
                beta.push(hs[c].iter().enumerate().map(|(k, &v)| sat(lsc + sum_sc(&a_sc, v) - a_sc[c][k])).collect());
            }
            let mut alpha = Vec::new();
            let mut cross = Vec::new();
            for (c, b) in checks.zip(&beta) {
                for k in 0..b.len() {
                    let mut ins = vec![icc[c]];
                    ins.extend((0..b.len()).filter(|&j| j != k).map(|j| b[j]));
                    a_sc[c][k] = lut.fold(&ins);
                    alpha.push(a_sc[c][k] as i8);
                }
                isc[c] = lut.fold(b);
                cross.push(isc[c] as i8);
            }
            hash_event(&mut h, it, true, l, &alpha, Some(&cross));
        }
        let s_hat: Vec<bool> = (0..n_source).map(|v| sat(lsc + sum_sc(&a_sc, v)) < 0).collect();
        let c_hat: Vec<bool> = (0..n_code)
            .map(|v| {
                let cross = if v >= off { isc[v - off] } else { 0 };
                sat(lcc[v] + sum_cc(&a_cc, v) + cross) < 0
            })
            .collect();
        let parity_ok = syndrome_zero(hc, &c_hat);
        let source_consistent = hs
            .iter()
            .enumerate()
            .all(|(j, r)| (r.iter().filter(|&&v| s_hat[v]).count() % 2 == 1) == c_hat[off + j]);
        let done = parity_ok && source_consistent;
        out = Some(RefOutcome { s_hat, c_hat, iterations: it, parity_ok, source_consistent, trace: h.0 });
        if done {
            break;
        }
    }
    out.expect("max_iters >= 1")
}

// ---------------------------------------------------------------------------
// Cycle search.

/// True when two checks share two or more variables.
pub fn has_four_cycle(rows: &[Vec<usize>], n: usize) -> bool {
    let mut checks_of: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (c, r) in rows.iter().enumerate() {
        for &v in r {
            checks_of[v].push(c);
        }
    }
    let mut seen = HashSet::new();
    for cs in &checks_of {
        for i in 0..cs.len() {
            for j in i + 1..cs.len() {
                if !seen.insert((cs[i].min(cs[j]), cs[i].max(cs[j]))) {
                    return true;
                }
            }
        }
    }
    false
}

/// The same question answered by scanning every pair of rows.
pub fn has_four_cycle_pairwise(h: &Gf2Matrix) -> bool {
    for a in 0..h.rows() {
        for b in a + 1..h.rows() {
            if (0..h.cols()).filter(|&c| h.get(a, c) && h.get(b, c)).count() >= 2 {
                return true;
            }
        }
    }
    false
}
