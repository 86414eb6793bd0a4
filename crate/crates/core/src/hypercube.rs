//! Subcube decompositions of the index grid `Z_{d1} x ... x Z_{dN}`.
//!
//! The grid is peeled into concentric layers plus a central block. Layer `k`
//! splits into paired subcube families `C_K` and `D_K`, one pair for each
//! even-size subset `K` of the parties. Within a subcube, party factors are
//! either boundary points of the layer or one of two overlapping ranges,
//! and consecutive factors obey a cyclic transition rule: a party outside
//! `K` keeps the side of its predecessor as a point, a party inside `K`
//! switches sides with a range. Because `|K|` is even the rule closes into
//! a cycle, and because the party count is odd the blocks tile the grid.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Validated list of local dimensions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct PartyDims(Vec<u32>);

impl PartyDims {
    pub fn new(dims: Vec<u32>) -> Result<Self> {
        let n = dims.len();
        if n < 3 {
            return Err(Error::TooFewParties(n));
        }
        if n.is_multiple_of(2) {
            return Err(Error::EvenPartyCount(n));
        }
        for (i, &d) in dims.iter().enumerate() {
            if d < 3 {
                return Err(Error::DimTooSmall {
                    party: i + 1,
                    dim: d,
                });
            }
        }
        if dims.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::DimsNotSorted);
        }
        Ok(PartyDims(dims))
    }

    pub fn n_parties(&self) -> usize {
        self.0.len()
    }

    pub fn dims(&self) -> &[u32] {
        &self.0
    }

    pub fn dim(&self, party: usize) -> u32 {
        self.0[party - 1]
    }

    /// Number of layers: floor((d1 - 1) / 2).
    pub fn layer_count(&self) -> u32 {
        (self.0[0] - 1) / 2
    }

    /// Central interval of a party: `[c, d - c - 1]` with `c` the layer count.
    pub fn central_interval(&self, party: usize) -> (u32, u32) {
        let c = self.layer_count();
        (c, self.dim(party) - c - 1)
    }

    pub fn grid_size(&self) -> u64 {
        self.0.iter().map(|&d| d as u64).product()
    }

    pub fn all_equal(&self) -> bool {
        self.0.windows(2).all(|w| w[0] == w[1])
    }

    pub fn is_all3(&self) -> bool {
        self.0.iter().all(|&d| d == 3)
    }

    /// Iterates over every grid point in row-major order.
    pub fn grid_points(&self) -> impl Iterator<Item = Vec<u32>> + '_ {
        let dims = &self.0;
        let total = self.grid_size();
        (0..total).map(move |mut idx| {
            let mut coords = vec![0u32; dims.len()];
            for j in (0..dims.len()).rev() {
                coords[j] = (idx % dims[j] as u64) as u32;
                idx /= dims[j] as u64;
            }
            coords
        })
    }
}

impl TryFrom<Vec<u32>> for PartyDims {
    type Error = Error;
    fn try_from(v: Vec<u32>) -> Result<Self> {
        PartyDims::new(v)
    }
}

impl From<PartyDims> for Vec<u32> {
    fn from(d: PartyDims) -> Vec<u32> {
        d.0
    }
}

/// Which of the two paired subcube families a block belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    C,
    D,
}

/// Shape of a single party factor inside a subcube.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FactorTag {
    /// The low boundary point `{k-1}` of layer `k`.
    #[serde(rename = "lo")]
    LoPoint,
    /// The high boundary point `{d-k}` of layer `k`.
    #[serde(rename = "hi")]
    HiPoint,
    /// The low-anchored range `{k-1, ..., d-k-1}`.
    #[serde(rename = "eta")]
    EtaRange,
    /// The high-anchored range `{k, ..., d-k}`.
    #[serde(rename = "xi")]
    XiRange,
    /// The central interval `{c, ..., d-c-1}`.
    #[serde(rename = "center")]
    CenterRange,
}

impl FactorTag {
    pub fn is_range(self) -> bool {
        matches!(
            self,
            FactorTag::EtaRange | FactorTag::XiRange | FactorTag::CenterRange
        )
    }
}

/// Side of the layer boundary a factor is anchored to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Side {
    Lo,
    Hi,
}

impl FactorTag {
    fn side(self) -> Option<Side> {
        match self {
            FactorTag::LoPoint | FactorTag::EtaRange => Some(Side::Lo),
            FactorTag::HiPoint | FactorTag::XiRange => Some(Side::Hi),
            FactorTag::CenterRange => None,
        }
    }
}

/// One party factor with its resolved index interval.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Factor {
    pub party: usize,
    pub tag: FactorTag,
    pub lo: u32,
    pub hi: u32,
}

#[allow(clippy::len_without_is_empty)]
impl Factor {
    pub fn len(&self) -> u32 {
        self.hi - self.lo + 1
    }

    pub fn contains(&self, x: u32) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn interval(&self) -> (u32, u32) {
        (self.lo, self.hi)
    }

    pub fn disjoint(&self, other: &Factor) -> bool {
        self.hi < other.lo || other.hi < self.lo
    }
}

/// Canonical identity of a block inside a decomposition.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BlockKey {
    pub layer: u32,
    pub kset: Vec<u8>,
    pub family: Option<Family>,
}

impl BlockKey {
    pub fn central() -> Self {
        BlockKey {
            layer: 0,
            kset: Vec::new(),
            family: None,
        }
    }

    pub fn is_central(&self) -> bool {
        self.layer == 0
    }

    pub fn short_label(&self) -> String {
        if self.is_central() {
            return "B0".to_string();
        }
        let fam = match self.family {
            Some(Family::C) => "C",
            Some(Family::D) => "D",
            None => "?",
        };
        let kset: Vec<String> = self.kset.iter().map(|p| p.to_string()).collect();
        let body = format!("{}{{{}}}", fam, kset.join(","));
        if self.layer > 1 {
            format!("k{}:{}", self.layer, body)
        } else {
            body
        }
    }
}

/// A product of one index interval per party; the atom of a decomposition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Subcube {
    pub layer: u32,
    pub kset: Vec<u8>,
    pub family: Option<Family>,
    pub factors: Vec<Factor>,
}

#[allow(clippy::len_without_is_empty)]
impl Subcube {
    pub fn key(&self) -> BlockKey {
        BlockKey {
            layer: self.layer,
            kset: self.kset.clone(),
            family: self.family,
        }
    }

    pub fn is_central(&self) -> bool {
        self.layer == 0
    }

    pub fn short_label(&self) -> String {
        self.key().short_label()
    }

    pub fn n_parties(&self) -> usize {
        self.factors.len()
    }

    pub fn contains(&self, point: &[u32]) -> bool {
        self.factors.len() == point.len()
            && self.factors.iter().zip(point).all(|(f, &x)| f.contains(x))
    }

    pub fn len(&self) -> u64 {
        self.factors.iter().map(|f| f.len() as u64).product()
    }

    pub fn intervals(&self) -> Vec<(u32, u32)> {
        self.factors.iter().map(Factor::interval).collect()
    }

    /// The layer-`k` corner of this block: low anchor for lo-side factors,
    /// high anchor for hi-side ones. Only defined for layer blocks.
    pub fn corner(&self) -> Option<Vec<u32>> {
        if self.is_central() {
            return None;
        }
        Some(
            self.factors
                .iter()
                .map(|f| match f.tag.side() {
                    Some(Side::Lo) => f.lo,
                    Some(Side::Hi) => f.hi,
                    None => unreachable!("layer block has no central factor"),
                })
                .collect(),
        )
    }

    /// Whether consecutive factors obey the transition rule, read cyclically.
    pub fn satisfies_cycle(&self, dims: &PartyDims) -> bool {
        if self.is_central() {
            return self.factors.iter().enumerate().all(|(i, f)| {
                f.tag == FactorTag::CenterRange && f.interval() == dims.central_interval(i + 1)
            });
        }
        let n = self.n_parties();
        let k = self.layer;
        for i in 0..n {
            let prev = &self.factors[i];
            let next = &self.factors[(i + 1) % n];
            let next_party = (i + 1) % n + 1;
            let in_kset = self.kset.contains(&(next_party as u8));
            match expected_factor(dims, k, next_party, prev.tag.side(), in_kset) {
                Some(e) => {
                    if (next.tag, next.lo, next.hi) != e {
                        return false;
                    }
                }
                None => return false,
            }
        }
        true
    }
}

fn expected_factor(
    dims: &PartyDims,
    k: u32,
    party: usize,
    prev_side: Option<Side>,
    in_kset: bool,
) -> Option<(FactorTag, u32, u32)> {
    let d = dims.dim(party);
    let side = prev_side?;
    Some(match (in_kset, side) {
        (false, Side::Lo) => (FactorTag::LoPoint, k - 1, k - 1),
        (false, Side::Hi) => (FactorTag::HiPoint, d - k, d - k),
        (true, Side::Lo) => (FactorTag::XiRange, k, d - k),
        (true, Side::Hi) => (FactorTag::EtaRange, k - 1, d - k - 1),
    })
}

/// A grid point, one coordinate per party.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridPoint {
    pub coords: Vec<u32>,
}

impl GridPoint {
    pub fn new(coords: Vec<u32>) -> Self {
        GridPoint { coords }
    }
}

/// All even-cardinality subsets of `{1..n}`, ordered by size then
/// lexicographically. There are `2^(n-1)` of them.
pub fn index_family(n: usize) -> Result<Vec<Vec<u8>>> {
    if n < 3 {
        return Err(Error::TooFewParties(n));
    }
    if n.is_multiple_of(2) {
        return Err(Error::EvenPartyCount(n));
    }
    let mut subsets: Vec<Vec<u8>> = (0u32..(1 << n))
        .filter(|m| m.count_ones() % 2 == 0)
        .map(|m| (1..=n as u8).filter(|p| m >> (p - 1) & 1 == 1).collect())
        .collect();
    subsets.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    Ok(subsets)
}

fn validate_kset(n: usize, kset: &[u8]) -> Result<()> {
    if !kset.len().is_multiple_of(2) {
        return Err(Error::invalid(format!("kset size {} is odd", kset.len())));
    }
    if kset.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid(
            "kset must be strictly increasing".to_string(),
        ));
    }
    if kset.iter().any(|&p| p == 0 || p as usize > n) {
        return Err(Error::invalid("kset party out of range".to_string()));
    }
    Ok(())
}

/// Builds the layer-`k` subcube for one `(kset, family)` pair.
///
/// The first party is seeded on the low side for family `C` and the high
/// side for family `D`; every later factor follows from its predecessor.
pub fn build_subcube(dims: &PartyDims, k: u32, kset: &[u8], family: Family) -> Result<Subcube> {
    if k < 1 || k > dims.layer_count() {
        return Err(Error::invalid(format!(
            "layer {k} out of range 1..={}",
            dims.layer_count()
        )));
    }
    validate_kset(dims.n_parties(), kset)?;
    let n = dims.n_parties();
    // Party 1 is seeded directly: family C sits on the low side, family D
    // on the high side, as a point outside the kset and a range inside it.
    let d1 = dims.dim(1);
    let (tag, lo, hi) = match (family, kset.contains(&1)) {
        (Family::C, false) => (FactorTag::LoPoint, k - 1, k - 1),
        (Family::C, true) => (FactorTag::EtaRange, k - 1, d1 - k - 1),
        (Family::D, false) => (FactorTag::HiPoint, d1 - k, d1 - k),
        (Family::D, true) => (FactorTag::XiRange, k, d1 - k),
    };
    let mut factors = vec![Factor {
        party: 1,
        tag,
        lo,
        hi,
    }];
    let mut prev_side = tag.side().expect("layer factor has a side");
    for party in 2..=n {
        let in_kset = kset.contains(&(party as u8));
        let (tag, lo, hi) =
            expected_factor(dims, k, party, Some(prev_side), in_kset).expect("side is known");
        prev_side = tag.side().expect("layer factor has a side");
        factors.push(Factor { party, tag, lo, hi });
    }
    let sc = Subcube {
        layer: k,
        kset: kset.to_vec(),
        family: Some(family),
        factors,
    };
    debug_assert!(sc.satisfies_cycle(dims));
    Ok(sc)
}

fn central_block(dims: &PartyDims) -> Subcube {
    let factors = (1..=dims.n_parties())
        .map(|party| {
            let (lo, hi) = dims.central_interval(party);
            Factor {
                party,
                tag: FactorTag::CenterRange,
                lo,
                hi,
            }
        })
        .collect();
    Subcube {
        layer: 0,
        kset: Vec::new(),
        family: None,
        factors,
    }
}

/// A validated-shape partition candidate: central block plus layer blocks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition {
    dims: PartyDims,
    blocks: Vec<Subcube>,
}

impl Decomposition {
    /// Wraps externally supplied blocks after shape validation only; the
    /// partition properties themselves are checked by [`verify_partition`].
    pub fn from_blocks(dims: PartyDims, blocks: Vec<Subcube>) -> Result<Self> {
        let n = dims.n_parties();
        for b in &blocks {
            if b.factors.len() != n {
                return Err(Error::malformed("block has wrong party count"));
            }
            for (i, f) in b.factors.iter().enumerate() {
                if f.party != i + 1 {
                    return Err(Error::malformed("block factors out of party order"));
                }
                if f.lo > f.hi || f.hi >= dims.dim(f.party) {
                    return Err(Error::malformed("factor interval out of bounds"));
                }
            }
            if !b.is_central() {
                validate_kset(n, &b.kset).map_err(|e| Error::malformed(e.to_string()))?;
                if b.family.is_none() {
                    return Err(Error::malformed("layer block without family"));
                }
                if b.layer > dims.layer_count() {
                    return Err(Error::malformed("layer out of range"));
                }
            }
        }
        Ok(Decomposition { dims, blocks })
    }

    pub fn dims(&self) -> &PartyDims {
        &self.dims
    }

    pub fn blocks(&self) -> &[Subcube] {
        &self.blocks
    }

    pub fn central(&self) -> Option<&Subcube> {
        self.blocks.iter().find(|b| b.is_central())
    }

    pub fn block_by_key(&self, key: &BlockKey) -> Option<&Subcube> {
        self.blocks.iter().find(|b| &b.key() == key)
    }

    pub fn expected_block_count(&self) -> usize {
        (self.dims.layer_count() as usize) << self.dims.n_parties() | 1
    }
}

/// Builds the full decomposition: the central block first, then for each
/// layer every `(kset, family)` subcube in canonical order.
pub fn build_decomposition(dims: &PartyDims) -> Decomposition {
    let mut blocks = vec![central_block(dims)];
    let ksets = index_family(dims.n_parties()).expect("dims are validated");
    for k in 1..=dims.layer_count() {
        for kset in &ksets {
            for family in [Family::C, Family::D] {
                blocks.push(build_subcube(dims, k, kset, family).expect("valid parameters"));
            }
        }
    }
    Decomposition {
        dims: dims.clone(),
        blocks,
    }
}

/// Result of the exhaustive partition check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PartitionReport {
    pub disjoint: bool,
    pub covering: bool,
    pub count_ok: bool,
    pub pairwise_party_disjoint: bool,
    /// For all-3 dims, whether the closed-form block cardinality sum equals
    /// the grid size; `None` for other dims.
    pub counting_identity: Option<bool>,
}

impl PartitionReport {
    pub fn all_ok(&self) -> bool {
        self.disjoint
            && self.covering
            && self.count_ok
            && self.pairwise_party_disjoint
            && self.counting_identity.unwrap_or(true)
    }
}

/// Exhaustively checks that the blocks partition the grid.
pub fn verify_partition(dec: &Decomposition) -> PartitionReport {
    let mut disjoint = true;
    let mut covering = true;
    for p in dec.dims.grid_points() {
        let hits = dec.blocks.iter().filter(|b| b.contains(&p)).count();
        if hits == 0 {
            covering = false;
        }
        if hits > 1 {
            disjoint = false;
        }
    }
    let count_ok = dec.blocks.len() == dec.expected_block_count();
    let mut pairwise = true;
    'outer: for (i, a) in dec.blocks.iter().enumerate() {
        for b in &dec.blocks[i + 1..] {
            if !a
                .factors
                .iter()
                .zip(&b.factors)
                .any(|(fa, fb)| fa.disjoint(fb))
            {
                pairwise = false;
                break 'outer;
            }
        }
    }
    let counting_identity = dec.dims.is_all3().then(|| {
        counting_identity_holds(dec.dims.n_parties() as u32)
            && dec.blocks.iter().map(Subcube::len).sum::<u64>() == dec.dims.grid_size()
    });
    PartitionReport {
        disjoint,
        covering,
        count_ok,
        pairwise_party_disjoint: pairwise,
        counting_identity,
    }
}

fn binomial(n: u32, k: u32) -> u128 {
    if k > n {
        return 0;
    }
    let mut acc: u128 = 1;
    for i in 0..k as u128 {
        acc = acc * (n as u128 - i) / (i + 1);
    }
    acc
}

/// The closed-form count behind the all-3 decomposition: one central point
/// plus two blocks of size `4^i` for each even subset size `2i` sums to
/// `3^n` exactly when `n` is odd.
pub fn counting_identity_holds(n: u32) -> bool {
    let mut total: u128 = 1;
    for i in 0..=(n - 1) / 2 {
        total += 2 * binomial(n, 2 * i) * 4u128.pow(i);
    }
    total == 3u128.pow(n)
}

/// True iff rotating every block's interval list by one party maps the
/// block set onto itself. Requires equal local dimensions.
pub fn verify_cyclic_invariance(dec: &Decomposition) -> Result<bool> {
    if !dec.dims.all_equal() {
        return Err(Error::invalid(
            "cyclic invariance needs equal local dimensions".to_string(),
        ));
    }
    let original: BTreeSet<Vec<(u32, u32)>> = dec.blocks.iter().map(Subcube::intervals).collect();
    let rotated: BTreeSet<Vec<(u32, u32)>> = dec
        .blocks
        .iter()
        .map(|b| {
            let mut iv = b.intervals();
            iv.rotate_left(1);
            iv
        })
        .collect();
    Ok(original == rotated)
}

/// Locates the containing block by following the transition rule around the
/// party cycle, starting from a coordinate on the layer boundary.
pub fn locate_walk<'a>(dec: &'a Decomposition, p: &GridPoint) -> Result<&'a Subcube> {
    let dims = &dec.dims;
    let n = dims.n_parties();
    if p.coords.len() != n
        || p.coords
            .iter()
            .enumerate()
            .any(|(j, &x)| x >= dims.dim(j + 1))
    {
        return Err(Error::invalid("grid point out of bounds".to_string()));
    }
    let margin = p
        .coords
        .iter()
        .enumerate()
        .map(|(j, &x)| x.min(dims.dim(j + 1) - 1 - x))
        .min()
        .expect("nonempty dims");
    if margin >= dims.layer_count() {
        return dec
            .central()
            .ok_or_else(|| Error::invalid("decomposition has no central block".to_string()));
    }
    let k = margin + 1;
    let start = (0..n)
        .find(|&j| p.coords[j] == k - 1 || p.coords[j] == dims.dim(j + 1) - k)
        .expect("some coordinate sits on the layer boundary");
    let mut side = if p.coords[start] == k - 1 {
        Side::Lo
    } else {
        Side::Hi
    };
    let mut tags = vec![None; n];
    let mut kset: Vec<u8> = Vec::new();
    for step in 1..=n {
        let j = (start + step) % n;
        let party = j + 1;
        let d = dims.dim(party);
        let x = p.coords[j];
        let (tag, next_side, in_k) = match side {
            Side::Lo => {
                if x == k - 1 {
                    (FactorTag::LoPoint, Side::Lo, false)
                } else {
                    (FactorTag::XiRange, Side::Hi, true)
                }
            }
            Side::Hi => {
                if x == d - k {
                    (FactorTag::HiPoint, Side::Hi, false)
                } else {
                    (FactorTag::EtaRange, Side::Lo, true)
                }
            }
        };
        tags[j] = Some(tag);
        if in_k {
            kset.push(party as u8);
        }
        side = next_side;
    }
    kset.sort_unstable();
    let family = match tags[0].expect("walk assigns every party").side() {
        Some(Side::Lo) => Family::C,
        Some(Side::Hi) => Family::D,
        None => unreachable!(),
    };
    let key = BlockKey {
        layer: k,
        kset,
        family: Some(family),
    };
    let block = dec
        .block_by_key(&key)
        .ok_or_else(|| Error::invalid(format!("no block {}", key.short_label())))?;
    debug_assert!(block.contains(&p.coords));
    Ok(block)
}

/// Locates the containing block by scanning every block.
pub fn locate_scan<'a>(dec: &'a Decomposition, p: &GridPoint) -> Result<&'a Subcube> {
    if p.coords.len() != dec.dims.n_parties()
        || p.coords
            .iter()
            .enumerate()
            .any(|(j, &x)| x >= dec.dims.dim(j + 1))
    {
        return Err(Error::invalid("grid point out of bounds".to_string()));
    }
    dec.blocks
        .iter()
        .find(|b| b.contains(&p.coords))
        .ok_or_else(|| Error::invalid("point not covered by any block".to_string()))
}

/// Returns the unique block containing `p`: by the constructive walk for
/// all-3 dims, by linear scan otherwise.
pub fn locate<'a>(dec: &'a Decomposition, p: &GridPoint) -> Result<&'a Subcube> {
    if dec.dims.is_all3() {
        locate_walk(dec, p)
    } else {
        locate_scan(dec, p)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LayerCornerCensus {
    pub layer: u32,
    pub blocks: usize,
    pub each_block_has_one_corner: bool,
    pub corners_exhausted: bool,
}

/// Corner distribution report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CornerReport {
    pub layers: Vec<LayerCornerCensus>,
    pub all_ok: bool,
    /// True when the corner property is checked as a conjecture (general
    /// dims) rather than as part of the all-3 construction's invariants.
    pub conjectural: bool,
}

/// Counts, per layer, how many layer corners `prod_j {k-1, d_j - k}` each
/// block contains. Every layer block should contain exactly one, and the
/// corners of a layer should be exhausted by its blocks.
pub fn corner_census(dec: &Decomposition) -> CornerReport {
    let dims = &dec.dims;
    let n = dims.n_parties();
    let mut layers = Vec::new();
    let mut all_ok = true;
    for k in 1..=dims.layer_count() {
        let blocks: Vec<&Subcube> = dec.blocks.iter().filter(|b| b.layer == k).collect();
        let corners: Vec<Vec<u32>> = (0..1u32 << n)
            .map(|mask| {
                (0..n)
                    .map(|j| {
                        if mask >> j & 1 == 0 {
                            k - 1
                        } else {
                            dims.dim(j + 1) - k
                        }
                    })
                    .collect()
            })
            .collect();
        let each_one = blocks
            .iter()
            .all(|b| corners.iter().filter(|c| b.contains(c)).count() == 1);
        let covered = corners.iter().all(|c| blocks.iter().any(|b| b.contains(c)));
        all_ok &= each_one && covered;
        layers.push(LayerCornerCensus {
            layer: k,
            blocks: blocks.len(),
            each_block_has_one_corner: each_one,
            corners_exhausted: covered,
        });
    }
    CornerReport {
        layers,
        all_ok,
        conjectural: !dims.is_all3(),
    }
}
