//! Two-sided Tanner graph of the joint decoder.
//!
//! Each side stores its checks in CSR form with edges in ascending variable
//! order; edge ids are positions in that array. Layers are contiguous check
//! ranges (one block row of the lifted matrix each).

use std::ops::Range;

use crate::code::QcCode;
use crate::error::{Error, Result};
use crate::gf2::{BitVector, Gf2Matrix};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TannerSide {
    n_vars: usize,
    check_ptr: Vec<usize>,
    edge_var: Vec<u32>,
    layers: Vec<Range<usize>>,
}

impl TannerSide {
    /// `rows[i]` lists the variables of check `i`; `layer_size` checks form a layer.
    pub fn new(n_vars: usize, rows: &[Vec<usize>], layer_size: usize) -> Result<Self> {
        if layer_size == 0 || !rows.len().is_multiple_of(layer_size) {
            return Err(Error::InvalidInput(format!(
                "{} checks do not split into layers of {layer_size}",
                rows.len()
            )));
        }
        let mut check_ptr = Vec::with_capacity(rows.len() + 1);
        let mut edge_var = Vec::new();
        check_ptr.push(0);
        for row in rows {
            let mut row = row.clone();
            row.sort_unstable();
            row.dedup();
            if let Some(&v) = row.last() {
                if v >= n_vars {
                    return Err(Error::InvalidInput(format!(
                        "variable {v} out of range {n_vars}"
                    )));
                }
            }
            edge_var.extend(row.iter().map(|&v| v as u32));
            check_ptr.push(edge_var.len());
        }
        let layers = (0..rows.len() / layer_size)
            .map(|l| l * layer_size..(l + 1) * layer_size)
            .collect();
        Ok(Self {
            n_vars,
            check_ptr,
            edge_var,
            layers,
        })
    }

    pub fn from_matrix(h: &Gf2Matrix, layer_size: usize) -> Result<Self> {
        let rows: Vec<Vec<usize>> = (0..h.rows()).map(|r| h.row_support(r)).collect();
        Self::new(h.cols(), &rows, layer_size)
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn n_checks(&self) -> usize {
        self.check_ptr.len() - 1
    }

    pub fn n_edges(&self) -> usize {
        self.edge_var.len()
    }

    pub fn layers(&self) -> &[Range<usize>] {
        &self.layers
    }

    #[inline]
    pub fn edges(&self, check: usize) -> Range<usize> {
        self.check_ptr[check]..self.check_ptr[check + 1]
    }

    #[inline]
    pub fn var(&self, edge: usize) -> usize {
        self.edge_var[edge] as usize
    }

    /// Edge range covered by a layer.
    pub fn layer_edges(&self, layer: usize) -> Range<usize> {
        let checks = &self.layers[layer];
        self.check_ptr[checks.start]..self.check_ptr[checks.end]
    }

    pub fn degree(&self, check: usize) -> usize {
        self.edges(check).len()
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n_checks()).map(|c| self.degree(c)).max().unwrap_or(0)
    }

    /// XOR of `bits` over the variables of `check`.
    pub fn check_parity(&self, check: usize, bits: &BitVector) -> bool {
        self.edges(check)
            .fold(false, |acc, e| acc ^ bits.get(self.var(e)))
    }
}

/// Source and channel sides joined by the identity link: source check `i`
/// pairs with channel variable `link_offset + i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JointGraph {
    pub source: TannerSide,
    pub channel: TannerSide,
    link_offset: usize,
}

impl JointGraph {
    pub fn new(source: TannerSide, channel: TannerSide) -> Result<Self> {
        let paired = source.n_checks();
        if paired > channel.n_vars() {
            return Err(Error::InvalidInput(format!(
                "{paired} source checks cannot pair with {} channel variables",
                channel.n_vars()
            )));
        }
        let link_offset = channel.n_vars() - paired;
        Ok(Self {
            source,
            channel,
            link_offset,
        })
    }

    pub fn from_code(code: &QcCode) -> Result<Self> {
        let z = code.z();
        let source = TannerSide::new(code.source_len(), &code.source_rows(), z)?;
        let channel = TannerSide::new(code.codeword_len(), &code.channel_rows(), z)?;
        Self::new(source, channel)
    }

    /// Graph of arbitrary `Hs`, `Hc`, with one check per layer.
    pub fn from_matrices(hs: &Gf2Matrix, hc: &Gf2Matrix) -> Result<Self> {
        Self::new(TannerSide::from_matrix(hs, 1)?, TannerSide::from_matrix(hc, 1)?)
    }

    pub fn link_offset(&self) -> usize {
        self.link_offset
    }

    pub fn n_paired(&self) -> usize {
        self.source.n_checks()
    }

    /// Source check paired with channel variable `v`, if any.
    #[inline]
    pub fn partner_of_channel_var(&self, v: usize) -> Option<usize> {
        v.checked_sub(self.link_offset)
    }

    pub fn parity_ok(&self, c_hat: &BitVector) -> bool {
        (0..self.channel.n_checks()).all(|c| !self.channel.check_parity(c, c_hat))
    }

    pub fn source_consistent(&self, s_hat: &BitVector, c_hat: &BitVector) -> bool {
        (0..self.source.n_checks())
            .all(|c| self.source.check_parity(c, s_hat) == c_hat.get(self.link_offset + c))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graph_from_code_matches_dense_matrices() {
        let code = QcCode::construct(1, 4).unwrap();
        let g = JointGraph::from_code(&code).unwrap();
        let hs = code.source_matrix();
        let hc = code.channel_matrix();
        assert_eq!(g.source, TannerSide::from_matrix(&hs, 4).unwrap());
        assert_eq!(g.channel, TannerSide::from_matrix(&hc, 4).unwrap());
        assert_eq!(g.link_offset(), 120);
        assert_eq!(g.source.layers().len(), 20);
        assert_eq!(g.channel.layers().len(), 30);
        assert_eq!(g.source.n_edges(), hs.count_ones());
    }

    #[test]
    fn layer_sizes_must_divide() {
        assert!(TannerSide::new(4, &[vec![0, 1], vec![1, 2], vec![2, 3]], 2).is_err());
        assert!(TannerSide::new(2, &[vec![0, 5]], 1).is_err());
    }
}
