//! Construction of the lifted joint source-channel parity structure.
//!
//! The base graph is a 50x90 binary matrix laid out as
//!
//! ```text
//!            cols 0..40      cols 40..70     cols 70..90
//! rows  0..20  Hs (20x40)     0 (20x30)       I (20x20)
//! rows 20..50  0 (30x40)      Hc parity       Hc systematic
//! ```
//!
//! Lifting replaces every 1 by a `z x z` circulant permutation and every 0 by
//! the zero block. The identity link lifts to shift-0 blocks, so source check
//! `i` is paired one-to-one with channel variable `30z + i`.

use std::collections::HashSet;
use std::ops::Range;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::gf2::{CirculantBlock, Gf2Matrix};

pub const BASE_ROWS: usize = 50;
pub const BASE_COLS: usize = 90;
pub const SOURCE_ROWS: usize = 20;
pub const SOURCE_COLS: usize = 40;
pub const CHANNEL_ROWS: usize = 30;
pub const CHANNEL_COLS: usize = 50;
pub const PARITY_COLS: usize = 30;
/// First base column of the identity link (and of the systematic channel part).
pub const LINK_COL: usize = SOURCE_COLS + PARITY_COLS;
pub const DEFAULT_Z: usize = 160;

const SOURCE_COL_DEGREE: usize = 3;
const SYSTEMATIC_COL_DEGREE: usize = 3;
const MAX_H1_RETRIES: u64 = 16;
const MAX_TABLE_RESTARTS: usize = 200;
const MAX_ROW_DRAWS: usize = 2000;
const GIRTH8_RESTARTS: usize = 4;

/// Lengths of optimal Golomb rulers indexed by the number of marks.
const OPTIMAL_GOLOMB_LENGTH: [usize; 21] = [
    0, 0, 1, 3, 6, 11, 17, 25, 34, 44, 55, 72, 85, 106, 127, 151, 177, 199, 216, 246, 283,
];

/// Smallest lifting factor that can host a Golomb ruler with `marks` marks.
pub fn min_z_for_ruler(marks: usize) -> Option<usize> {
    OPTIMAL_GOLOMB_LENGTH.get(marks).map(|len| len + 1)
}

/// A block region `rows x cols` of a base graph or shift table.
pub type Region = (Range<usize>, Range<usize>);

/// Source part `Hs` of the base graph.
pub const SOURCE_REGION: Region = (0..SOURCE_ROWS, 0..SOURCE_COLS);
/// Channel part `Hc` of the base graph.
pub const CHANNEL_REGION: Region = (SOURCE_ROWS..BASE_ROWS, SOURCE_COLS..BASE_COLS);

/// A binary protograph.
#[derive(Clone, PartialEq, Eq)]
pub struct BaseGraph {
    rows: usize,
    cols: usize,
    bits: Vec<u8>,
}

impl BaseGraph {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            bits: vec![0; rows * cols],
        }
    }

    pub fn from_rows<R: AsRef<[u8]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut g = Self::zeros(rows.len(), cols);
        for (r, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != cols {
                return Err(Error::InvalidCode(format!(
                    "base row {r} has {} entries, expected {cols}",
                    row.len()
                )));
            }
            for (c, &b) in row.iter().enumerate() {
                g.set(r, c, b != 0);
            }
        }
        Ok(g)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        self.bits[r * self.cols + c] != 0
    }

    pub fn set(&mut self, r: usize, c: usize, bit: bool) {
        self.bits[r * self.cols + c] = u8::from(bit);
    }

    pub fn row_support(&self, r: usize) -> Vec<usize> {
        (0..self.cols).filter(|&c| self.get(r, c)).collect()
    }

    pub fn col_support(&self, c: usize) -> Vec<usize> {
        (0..self.rows).filter(|&r| self.get(r, c)).collect()
    }

    pub fn row_weight(&self, r: usize) -> usize {
        (0..self.cols).filter(|&c| self.get(r, c)).count()
    }

    pub fn col_weight(&self, c: usize) -> usize {
        (0..self.rows).filter(|&r| self.get(r, c)).count()
    }

    pub fn edge_count(&self) -> usize {
        self.bits.iter().filter(|&&b| b != 0).count()
    }

    /// Whether entry `(r, c)` belongs to the identity link and is pinned to shift 0.
    pub fn is_link_entry(&self, r: usize, c: usize) -> bool {
        self.rows == BASE_ROWS && self.cols == BASE_COLS && r < SOURCE_ROWS && c == LINK_COL + r
    }

    /// Checks the block structure required of a joint source-channel base graph.
    pub fn validate_jscc(&self) -> Result<()> {
        if self.rows != BASE_ROWS || self.cols != BASE_COLS {
            return Err(Error::InvalidCode(format!(
                "base graph must be {BASE_ROWS}x{BASE_COLS}, got {}x{}",
                self.rows, self.cols
            )));
        }
        for r in 0..SOURCE_ROWS {
            for c in SOURCE_COLS..BASE_COLS {
                if self.get(r, c) != (c == LINK_COL + r) {
                    return Err(Error::InvalidCode(format!(
                        "link region must be [0 | I]: base entry ({r},{c}) is wrong"
                    )));
                }
            }
        }
        for r in SOURCE_ROWS..BASE_ROWS {
            for c in 0..SOURCE_COLS {
                if self.get(r, c) {
                    return Err(Error::InvalidCode(format!(
                        "base entry ({r},{c}) must be zero (channel rows do not touch source columns)"
                    )));
                }
            }
        }
        for r in 0..SOURCE_ROWS {
            if (0..SOURCE_COLS).all(|c| !self.get(r, c)) {
                return Err(Error::InvalidCode(format!("source row {r} is empty")));
            }
        }
        for c in 0..SOURCE_COLS {
            if self.col_weight(c) == 0 {
                return Err(Error::InvalidCode(format!("source column {c} is empty")));
            }
        }
        for r in SOURCE_ROWS..BASE_ROWS {
            if self.row_weight(r) == 0 {
                return Err(Error::InvalidCode(format!("channel row {r} is empty")));
            }
        }
        for c in SOURCE_COLS..BASE_COLS {
            if (SOURCE_ROWS..BASE_ROWS).all(|r| !self.get(r, c)) {
                return Err(Error::InvalidCode(format!("channel column {c} is empty")));
            }
        }
        Ok(())
    }
}

impl std::fmt::Debug for BaseGraph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "BaseGraph {}x{}", self.rows, self.cols)?;
        for r in 0..self.rows {
            for c in 0..self.cols {
                f.write_str(if self.get(r, c) { "1" } else { "0" })?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Number of columns already shared between base rows `a` and `b`.
fn row_overlap(g: &BaseGraph, a: usize, b: usize, cols: std::ops::Range<usize>) -> usize {
    cols.filter(|&c| g.get(a, c) && g.get(b, c)).count()
}

/// Places `degree` edges in column `col`, choosing rows from `rows` one at a
/// time. A candidate row is scored by how many 4-cycles it would close with the
/// rows already chosen for this column; ties go to the lightest row, then to
/// the RNG. Rows at `cap` are only used when nothing else is left.
fn peg_place(
    g: &mut BaseGraph,
    col: usize,
    degree: usize,
    rows: std::ops::Range<usize>,
    cap: usize,
    rng: &mut ChaCha8Rng,
) {
    let cols = 0..g.cols();
    for _ in 0..degree {
        let chosen: Vec<usize> = rows.clone().filter(|&r| g.get(r, col)).collect();
        let mut best: Vec<usize> = Vec::new();
        let mut best_key = (usize::MAX, usize::MAX, usize::MAX);
        for r in rows.clone() {
            if g.get(r, col) {
                continue;
            }
            let weight = g.row_weight(r);
            let over_cap = usize::from(weight >= cap);
            let cycles: usize = chosen
                .iter()
                .map(|&o| row_overlap(g, r, o, cols.clone()))
                .sum();
            let key = (over_cap, cycles, weight);
            if key < best_key {
                best_key = key;
                best.clear();
            }
            if key == best_key {
                best.push(r);
            }
        }
        let r = *best.choose(rng).expect("column has free rows");
        g.set(r, col, true);
    }
}

/// The default 50x90 base graph, built by progressive edge growth and fully
/// determined by `seed`.
///
/// * source part: every column has degree 3 (rows balanced at weight 6);
/// * identity link `[0 | I]`;
/// * channel parity part: a staircase over the first 29 parity columns, with
///   the last parity column of degree 3, so the 30x30 parity block is
///   invertible over GF(2);
/// * channel systematic part: every column has degree 3.
pub fn default_base_graph(seed: u64) -> BaseGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = BaseGraph::zeros(BASE_ROWS, BASE_COLS);

    let source_cap = (SOURCE_COLS * SOURCE_COL_DEGREE).div_ceil(SOURCE_ROWS);
    for c in 0..SOURCE_COLS {
        peg_place(&mut g, c, SOURCE_COL_DEGREE, 0..SOURCE_ROWS, source_cap, &mut rng);
    }
    for r in 0..SOURCE_ROWS {
        g.set(r, LINK_COL + r, true);
    }

    for p in 0..PARITY_COLS - 1 {
        g.set(SOURCE_ROWS + p, SOURCE_COLS + p, true);
        g.set(SOURCE_ROWS + p + 1, SOURCE_COLS + p, true);
    }
    let last_parity = SOURCE_COLS + PARITY_COLS - 1;
    g.set(BASE_ROWS - 1, last_parity, true);
    let channel_edges = 2 * (PARITY_COLS - 1) + 3 + (BASE_COLS - LINK_COL) * SYSTEMATIC_COL_DEGREE;
    let channel_cap = channel_edges.div_ceil(CHANNEL_ROWS);
    // Two more edges on the last parity column, away from the last row.
    peg_place(
        &mut g,
        last_parity,
        2,
        SOURCE_ROWS..BASE_ROWS - 1,
        channel_cap,
        &mut rng,
    );
    for c in LINK_COL..BASE_COLS {
        peg_place(
            &mut g,
            c,
            SYSTEMATIC_COL_DEGREE,
            SOURCE_ROWS..BASE_ROWS,
            channel_cap,
            &mut rng,
        );
    }
    debug_assert!(g.validate_jscc().is_ok());
    g
}

/// Circulant shift descriptors for every base entry.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ShiftTable {
    z: usize,
    rows: usize,
    cols: usize,
    shifts: Vec<Option<usize>>,
}

impl ShiftTable {
    pub fn new(z: usize, rows: usize, cols: usize) -> Self {
        Self {
            z,
            rows,
            cols,
            shifts: vec![None; rows * cols],
        }
    }

    pub fn from_rows(z: usize, rows: &[Vec<Option<usize>>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut t = Self::new(z, rows.len(), cols);
        for (r, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return Err(Error::InvalidCode(format!("shift row {r} has wrong length")));
            }
            for (c, &s) in row.iter().enumerate() {
                if let Some(s) = s {
                    if s >= z {
                        return Err(Error::InvalidCode(format!(
                            "shift {s} at ({r},{c}) is not below z={z}"
                        )));
                    }
                }
                t.set(r, c, s);
            }
        }
        Ok(t)
    }

    pub fn z(&self) -> usize {
        self.z
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Option<usize> {
        self.shifts[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, s: Option<usize>) {
        self.shifts[r * self.cols + c] = s;
    }

    pub fn block(&self, r: usize, c: usize) -> CirculantBlock {
        CirculantBlock {
            z: self.z,
            shift: self.get(r, c),
        }
    }

    fn rows_conflict(&self, a: usize, b: usize) -> bool {
        let shared: Vec<usize> = (0..self.cols)
            .filter(|&c| self.get(a, c).is_some() && self.get(b, c).is_some())
            .collect();
        let z = self.z;
        for (i, &k1) in shared.iter().enumerate() {
            for &k2 in &shared[i + 1..] {
                let sum = self.get(a, k1).unwrap() + z - self.get(a, k2).unwrap()
                    + self.get(b, k2).unwrap()
                    + z
                    - self.get(b, k1).unwrap();
                if sum.is_multiple_of(z) {
                    return true;
                }
            }
        }
        false
    }

    /// Whether row `r` closes a 6-cycle with two earlier rows, counting only
    /// blocks inside `region`. A base cycle through rows `a, b, r` and columns
    /// `k1` (shared by `a, b`), `k2` (`b, r`), `k3` (`r, a`) lifts to 6-cycles
    /// iff `s[a,k1] - s[b,k1] + s[b,k2] - s[r,k2] + s[r,k3] - s[a,k3] = 0 mod z`.
    fn closes_six_cycle(&self, r: usize, region: &Region) -> bool {
        let (rows, cols) = region;
        if !rows.contains(&r) {
            return false;
        }
        let z = self.z as i64;
        let s = |a: usize, k: usize| self.get(a, k).expect("shared column") as i64;
        let shared = |a: usize, b: usize| -> Vec<usize> {
            cols.clone()
                .filter(|&k| self.get(a, k).is_some() && self.get(b, k).is_some())
                .collect()
        };
        let earlier: Vec<usize> = rows.clone().filter(|&a| a < r).collect();
        for (i, &a) in earlier.iter().enumerate() {
            let ra = shared(r, a);
            if ra.is_empty() {
                continue;
            }
            for &b in &earlier[i + 1..] {
                let rb = shared(r, b);
                if rb.is_empty() {
                    continue;
                }
                for k1 in shared(a, b) {
                    for &k2 in &rb {
                        for &k3 in &ra {
                            if k1 == k2 || k2 == k3 || k1 == k3 {
                                continue;
                            }
                            let sum = s(a, k1) - s(b, k1) + s(b, k2) - s(r, k2) + s(r, k3)
                                - s(a, k3);
                            if sum.rem_euclid(z) == 0 {
                                return true;
                            }
                        }
                    }
                }
            }
        }
        false
    }

    /// True iff the lifted graph of `region` has no 6-cycle (assuming it has
    /// no 4-cycle).
    pub fn is_six_cycle_free(&self, region: &Region) -> bool {
        region.0.clone().all(|r| !self.closes_six_cycle(r, region))
    }

    /// True iff the lifted Tanner graph has no cycle of length 4, using the
    /// circulant condition `s[j1,k1] - s[j1,k2] + s[j2,k2] - s[j2,k1] != 0 mod z`
    /// over every pair of rows and columns.
    pub fn is_four_cycle_free(&self) -> bool {
        (0..self.rows).all(|a| (a + 1..self.rows).all(|b| !self.rows_conflict(a, b)))
    }

    /// Dense expansion of the block range `rows x cols`.
    pub fn expand_region(
        &self,
        rows: std::ops::Range<usize>,
        cols: std::ops::Range<usize>,
    ) -> Gf2Matrix {
        let z = self.z;
        let mut m = Gf2Matrix::zeros(rows.len() * z, cols.len() * z);
        for (bi, r) in rows.clone().enumerate() {
            for (bj, c) in cols.clone().enumerate() {
                let block = self.block(r, c);
                for i in 0..z {
                    if let Some(j) = block.column_of_row(i) {
                        m.set(bi * z + i, bj * z + j, true);
                    }
                }
            }
        }
        m
    }

    /// Sparse row supports of the lifted region, each ascending.
    pub fn lifted_rows(
        &self,
        rows: std::ops::Range<usize>,
        cols: std::ops::Range<usize>,
    ) -> Vec<Vec<usize>> {
        let z = self.z;
        let mut out = Vec::with_capacity(rows.len() * z);
        for r in rows {
            for i in 0..z {
                let mut support = Vec::new();
                for (bj, c) in cols.clone().enumerate() {
                    if let Some(j) = self.block(r, c).column_of_row(i) {
                        support.push(bj * z + j);
                    }
                }
                out.push(support);
            }
        }
        out
    }
}

/// Whether `marks` form a Golomb ruler: all pairwise differences distinct.
pub fn is_golomb_ruler(marks: &[usize]) -> bool {
    let mut seen = HashSet::new();
    for (i, &a) in marks.iter().enumerate() {
        for &b in &marks[i + 1..] {
            if a == b || !seen.insert(a.abs_diff(b)) {
                return false;
            }
        }
    }
    true
}

/// Draws a random Golomb ruler with `count` marks in `[0, z)` that contains 0
/// when `with_zero` is set. Randomized depth-first search with a node budget.
fn random_golomb_ruler(
    count: usize,
    z: usize,
    with_zero: bool,
    rng: &mut ChaCha8Rng,
) -> Option<Vec<usize>> {
    fn extend(
        marks: &mut Vec<usize>,
        diffs: &mut HashSet<usize>,
        count: usize,
        z: usize,
        budget: &mut usize,
        rng: &mut ChaCha8Rng,
    ) -> bool {
        if marks.len() == count {
            return true;
        }
        let mut candidates: Vec<usize> = (0..z).filter(|c| !marks.contains(c)).collect();
        candidates.shuffle(rng);
        for c in candidates {
            if *budget == 0 {
                return false;
            }
            *budget -= 1;
            let new: Vec<usize> = marks.iter().map(|&m| m.abs_diff(c)).collect();
            let distinct = new.iter().collect::<HashSet<_>>().len() == new.len();
            if !distinct || new.iter().any(|d| diffs.contains(d)) {
                continue;
            }
            marks.push(c);
            diffs.extend(new.iter().copied());
            if extend(marks, diffs, count, z, budget, rng) {
                return true;
            }
            marks.pop();
            for d in &new {
                diffs.remove(d);
            }
        }
        false
    }

    let mut marks = Vec::with_capacity(count);
    if with_zero && count > 0 {
        marks.push(0);
    }
    let mut diffs = HashSet::new();
    let mut budget = 20_000;
    extend(&mut marks, &mut diffs, count, z, &mut budget, rng).then_some(marks)
}

/// Assigns circulant shifts to the nonzero entries of `base` so that each row
/// carries a Golomb ruler and the lifted graph is free of 4-cycles. Entries for
/// which `pinned(r, c)` holds are fixed to shift 0.
///
/// Rows are drawn in order; a row whose draw closes a 4-cycle with an earlier
/// row, or a 6-cycle inside one of `six_cycle_free`, is redrawn, and after too
/// many redraws the whole table restarts.
pub fn golomb_lift(
    base: &BaseGraph,
    z: usize,
    pinned: impl Fn(usize, usize) -> bool,
    six_cycle_free: &[Region],
    restarts: usize,
    rng: &mut ChaCha8Rng,
) -> Result<ShiftTable> {
    for r in 0..base.rows() {
        let w = base.row_weight(r);
        let ok = min_z_for_ruler(w).is_some_and(|mz| mz <= z);
        if !ok {
            return Err(Error::ConstructionInfeasible(format!(
                "z={z} cannot host a Golomb ruler with {w} marks (base row {r})"
            )));
        }
        if base.row_support(r).iter().filter(|&&c| pinned(r, c)).count() > 1 {
            return Err(Error::ConstructionInfeasible(format!(
                "base row {r} pins more than one entry to shift 0"
            )));
        }
    }

    'restart: for _ in 0..restarts {
        let mut table = ShiftTable::new(z, base.rows(), base.cols());
        for r in 0..base.rows() {
            let support = base.row_support(r);
            let pinned_col = support.iter().copied().find(|&c| pinned(r, c));
            let mut placed = false;
            for _ in 0..MAX_ROW_DRAWS {
                let Some(mut marks) =
                    random_golomb_ruler(support.len(), z, pinned_col.is_some(), rng)
                else {
                    continue 'restart;
                };
                let zero = pinned_col.map(|_| marks.remove(0));
                marks.shuffle(rng);
                let mut rest = marks.into_iter();
                for &c in &support {
                    let s = if Some(c) == pinned_col {
                        zero
                    } else {
                        rest.next()
                    };
                    table.set(r, c, s);
                }
                if (0..r).all(|prev| !table.rows_conflict(prev, r))
                    && six_cycle_free.iter().all(|reg| !table.closes_six_cycle(r, reg))
                {
                    placed = true;
                    break;
                }
            }
            if !placed {
                continue 'restart;
            }
        }
        return Ok(table);
    }
    Err(Error::ConstructionInfeasible(format!(
        "no Golomb shift table with the required girth found at z={z}"
    )))
}

/// A lifted joint source-channel code.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct QcCode {
    base: BaseGraph,
    shifts: ShiftTable,
}

impl QcCode {
    /// Assembles a code from parts, checking every structural invariant.
    pub fn new(base: BaseGraph, shifts: ShiftTable) -> Result<Self> {
        base.validate_jscc()?;
        if shifts.rows() != base.rows() || shifts.cols() != base.cols() {
            return Err(Error::InvalidCode("shift table shape differs from base".into()));
        }
        if shifts.z() == 0 {
            return Err(Error::InvalidCode("lifting factor must be positive".into()));
        }
        for r in 0..base.rows() {
            for c in 0..base.cols() {
                let s = shifts.get(r, c);
                if base.get(r, c) != s.is_some() {
                    return Err(Error::InvalidCode(format!(
                        "shift at ({r},{c}) disagrees with the base pattern"
                    )));
                }
                if s.is_some_and(|s| s >= shifts.z()) {
                    return Err(Error::InvalidCode(format!(
                        "shift at ({r},{c}) is not below z={}",
                        shifts.z()
                    )));
                }
                if base.is_link_entry(r, c) && s != Some(0) {
                    return Err(Error::InvalidCode(format!(
                        "link block ({r},{c}) must have shift 0"
                    )));
                }
            }
        }
        Ok(Self { base, shifts })
    }

    /// Default construction: the seeded base graph lifted by `z`.
    ///
    /// When `z` is too small to host the Golomb rulers the base graph needs,
    /// shifts fall back to uniform draws (see [`assign_shifts_relaxed`]); the
    /// resulting code may contain 4-cycles.
    pub fn construct(seed: u64, z: usize) -> Result<Self> {
        let base = default_base_graph(seed);
        if golomb_feasible(&base, z) {
            assign_shifts(&base, z, seed)
        } else {
            assign_shifts_relaxed(&base, z, seed)
        }
    }

    pub fn base(&self) -> &BaseGraph {
        &self.base
    }

    pub fn shifts(&self) -> &ShiftTable {
        &self.shifts
    }

    pub fn z(&self) -> usize {
        self.shifts.z()
    }

    pub fn source_len(&self) -> usize {
        SOURCE_COLS * self.z()
    }

    pub fn compressed_len(&self) -> usize {
        SOURCE_ROWS * self.z()
    }

    pub fn codeword_len(&self) -> usize {
        CHANNEL_COLS * self.z()
    }

    pub fn parity_len(&self) -> usize {
        PARITY_COLS * self.z()
    }

    pub fn channel_checks(&self) -> usize {
        CHANNEL_ROWS * self.z()
    }

    /// `Hs`, the lifted source block: rows `[0,20)` by columns `[0,40)`.
    pub fn source_matrix(&self) -> Gf2Matrix {
        self.shifts.expand_region(0..SOURCE_ROWS, 0..SOURCE_COLS)
    }

    /// `Hc`, the lifted channel block: rows `[20,50)` by columns `[40,90)`.
    pub fn channel_matrix(&self) -> Gf2Matrix {
        self.shifts
            .expand_region(SOURCE_ROWS..BASE_ROWS, SOURCE_COLS..BASE_COLS)
    }

    pub fn source_rows(&self) -> Vec<Vec<usize>> {
        self.shifts.lifted_rows(0..SOURCE_ROWS, 0..SOURCE_COLS)
    }

    pub fn channel_rows(&self) -> Vec<Vec<usize>> {
        self.shifts
            .lifted_rows(SOURCE_ROWS..BASE_ROWS, SOURCE_COLS..BASE_COLS)
    }

    /// The parity block `H1` of `Hc` (its first `30z` columns).
    pub fn parity_block(&self) -> Gf2Matrix {
        self.shifts.expand_region(
            SOURCE_ROWS..BASE_ROWS,
            SOURCE_COLS..SOURCE_COLS + PARITY_COLS,
        )
    }
}

/// Lifted source and channel matrices `(Hs, Hc)`.
pub fn expand(code: &QcCode) -> (Gf2Matrix, Gf2Matrix) {
    (code.source_matrix(), code.channel_matrix())
}

pub fn check_girth(code: &QcCode) -> bool {
    code.shifts().is_four_cycle_free()
}

/// Whether every row of `base` fits a Golomb ruler below `z`.
pub fn golomb_feasible(base: &BaseGraph, z: usize) -> bool {
    (0..base.rows()).all(|r| min_z_for_ruler(base.row_weight(r)).is_some_and(|mz| mz <= z))
}

fn h1_invertible(code: &QcCode) -> bool {
    code.parity_block().invert().is_ok()
}

/// Golomb-ruler shift assignment for a joint source-channel base graph.
///
/// Link blocks are pinned to shift 0. The parity block must be invertible for
/// the encoder; if a draw leaves it singular the shifts are redrawn with the
/// next seed, up to a fixed number of attempts.
pub fn assign_shifts(base: &BaseGraph, z: usize, seed: u64) -> Result<QcCode> {
    if z < 4 {
        return Err(Error::ConstructionInfeasible(format!(
            "lifting factor z={z} is below the minimum of 4"
        )));
    }
    base.validate_jscc()?;
    for attempt in 0..MAX_H1_RETRIES {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(attempt));
        let pinned = |r, c| base.is_link_entry(r, c);
        // girth 8 inside Hs and Hc when z allows it, girth 6 otherwise
        let table = golomb_lift(
            base,
            z,
            pinned,
            &[SOURCE_REGION, CHANNEL_REGION],
            GIRTH8_RESTARTS,
            &mut rng,
        )
        .or_else(|_| golomb_lift(base, z, pinned, &[], MAX_TABLE_RESTARTS, &mut rng))?;
        let code = QcCode::new(base.clone(), table)?;
        if h1_invertible(&code) {
            return Ok(code);
        }
    }
    Err(Error::ConstructionInfeasible(format!(
        "parity block stayed singular after {MAX_H1_RETRIES} shift draws"
    )))
}

/// Uniform random shifts (link blocks pinned to 0) with the same invertibility
/// retries as [`assign_shifts`], for lifting factors too small for Golomb rulers.
pub fn assign_shifts_relaxed(base: &BaseGraph, z: usize, seed: u64) -> Result<QcCode> {
    if z < 4 {
        return Err(Error::ConstructionInfeasible(format!(
            "lifting factor z={z} is below the minimum of 4"
        )));
    }
    base.validate_jscc()?;
    for attempt in 0..MAX_H1_RETRIES {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(attempt));
        let mut table = ShiftTable::new(z, base.rows(), base.cols());
        for r in 0..base.rows() {
            for c in base.row_support(r) {
                let s = if base.is_link_entry(r, c) {
                    0
                } else {
                    rng.random_range(0..z)
                };
                table.set(r, c, Some(s));
            }
        }
        let code = QcCode::new(base.clone(), table)?;
        if h1_invertible(&code) {
            return Ok(code);
        }
    }
    Err(Error::ConstructionInfeasible(format!(
        "parity block stayed singular after {MAX_H1_RETRIES} shift draws"
    )))
}
