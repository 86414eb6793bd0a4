//! Strong-nonlocality certification by constraint propagation.
//!
//! For each cut that groups all parties but one into a joint measuring
//! party, an orthogonality-preserving measurement element `E` is a matrix
//! over the cut's coordinate grid. The engine never materializes `E`; it
//! tracks two monotone facts derived from the input set's structure:
//!
//! - `zero`: coordinate pairs whose matrix entry must vanish. Two blocks
//!   whose intervals on the excluded party intersect admit state pairs with
//!   nonzero excluded-party overlap, and the orthogonality of the measured
//!   set then forces the whole cross-block submatrix to zero (the blocks'
//!   joint-party families are orthogonal and span their disjoint supports).
//! - `resolved`: coordinates known to carry one shared diagonal constant
//!   with a fully zero off-diagonal row. A coordinate whose whole row is
//!   zero anchors a constant; a block whose support has all outgoing
//!   entries zero and touches a resolved coordinate is forced diagonal with
//!   that same constant on its entire support, because its family is a
//!   product-Fourier basis of the support.
//!
//! Resolved coordinates are grouped in equal-constant components; a cut is
//! certified exactly when every coordinate is resolved into one single
//! component, which is the statement that `E` is proportional to the
//! identity. `Undecided` is not a refutation: the condition being checked
//! is sufficient, not necessary.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hypercube::BlockKey;
use crate::states::{cyc_inner, LocalVector, Role, StateLabel, StateSet};
use crate::util::{Bits, UnionFind};
use crate::verify::check_pairwise_orthogonal;

/// One joint party: everyone except `excluded_party`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Cut {
    pub excluded_party: usize,
}

/// Coordinate grid of a cut: the product of the remaining parties' ranges.
#[derive(Debug, Clone)]
pub struct CutGrid {
    parties: Vec<usize>,
    dims: Vec<u32>,
    size: usize,
}

impl CutGrid {
    pub fn parties(&self) -> &[usize] {
        &self.parties
    }

    pub fn size(&self) -> usize {
        self.size
    }

    fn index_of(&self, coords: &[u32]) -> usize {
        let mut idx = 0usize;
        for (j, &c) in coords.iter().enumerate() {
            idx = idx * self.dims[j] as usize + c as usize;
        }
        idx
    }

    fn coords_of(&self, mut idx: usize) -> Vec<u32> {
        let mut out = vec![0u32; self.dims.len()];
        for j in (0..self.dims.len()).rev() {
            out[j] = (idx % self.dims[j] as usize) as u32;
            idx /= self.dims[j] as usize;
        }
        out
    }

    fn box_indices(&self, intervals: &[(u32, u32)]) -> Vec<usize> {
        let mut out = vec![0usize];
        for (j, &(lo, hi)) in intervals.iter().enumerate() {
            let mut next = Vec::with_capacity(out.len() * (hi - lo + 1) as usize);
            for base in out {
                for c in lo..=hi {
                    next.push(base * self.dims[j] as usize + c as usize);
                }
            }
            out = next;
        }
        out.sort_unstable();
        out
    }
}

/// A block of the input set as seen from one cut.
#[derive(Debug, Clone)]
pub struct ProjectedBlock {
    pub key: BlockKey,
    /// Index interval on the excluded party.
    pub excluded_interval: (u32, u32),
    /// Index intervals on the remaining parties, in party order.
    pub support: Vec<(u32, u32)>,
    support_idx: Vec<usize>,
    support_mask: Bits,
    /// Joint-party Fourier index sizes, one per remaining party.
    alpha_lens: Vec<u32>,
    /// Excluded-party local vectors, one per excluded Fourier index.
    excluded_vectors: Vec<Option<LocalVector>>,
    /// For each joint Fourier index, the available excluded indices.
    avail: Vec<Vec<u32>>,
    labels: BTreeMap<(usize, u32), StateLabel>,
}

impl ProjectedBlock {
    fn spanning(&self) -> bool {
        self.avail.iter().all(|a| !a.is_empty())
    }

    fn alpha_index(&self, fourier: &[u32]) -> usize {
        let mut idx = 0usize;
        for (j, &n) in fourier.iter().enumerate() {
            idx = idx * self.alpha_lens[j] as usize + n as usize;
        }
        idx
    }

    /// Joint indices grouped by their set of available excluded indices.
    fn classes(&self) -> BTreeMap<Vec<u32>, Vec<usize>> {
        let mut out: BTreeMap<Vec<u32>, Vec<usize>> = BTreeMap::new();
        for (alpha, ns) in self.avail.iter().enumerate() {
            out.entry(ns.clone()).or_default().push(alpha);
        }
        out
    }

    /// Whether every pair of distinct joint indices shares an excluded
    /// index, which discharges the intra-block zero conditions.
    fn intra_pairs_ok(&self) -> bool {
        let classes = self.classes();
        let keys: Vec<&Vec<u32>> = classes.keys().collect();
        for (i, a) in keys.iter().enumerate() {
            for b in &keys[i + 1..] {
                if !a.iter().any(|n| b.contains(n)) {
                    return false;
                }
            }
        }
        true
    }

    pub fn support_size(&self) -> usize {
        self.support_idx.len()
    }
}

/// Applied rule instances, in order. A trace replays deterministically to
/// the same deduction state and every step re-checks its hypotheses.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "rule", rename_all = "kebab-case")]
pub enum TraceEvent {
    /// Cross-block zeros between two blocks with intersecting excluded
    /// intervals, justified by the listed witness state pairs, each with a
    /// nonzero excluded-party overlap.
    SeedZeros {
        block_a: BlockKey,
        block_b: BlockKey,
        witnesses: Vec<(StateLabel, StateLabel)>,
    },
    /// A coordinate whose entire off-diagonal row vanished joined the
    /// resolved set as a fresh constant.
    ZeroRowSeed { coord: Vec<u32> },
    /// A block's support was forced diagonal-constant from the anchor.
    ResolveBlock { block: BlockKey, anchor: Vec<u32> },
}

/// Per-cut certification workspace.
#[derive(Debug, Clone)]
pub struct DeductionState {
    zero: Vec<Bits>,
    resolved: Bits,
    comp: UnionFind,
    fired: Vec<bool>,
    pub trace: Vec<TraceEvent>,
}

impl DeductionState {
    fn new(grid: &CutGrid, n_blocks: usize) -> Self {
        DeductionState {
            zero: vec![Bits::new(grid.size()); grid.size()],
            resolved: Bits::new(grid.size()),
            comp: UnionFind::new(grid.size()),
            fired: vec![false; n_blocks],
            trace: Vec::new(),
        }
    }

    pub fn resolved_count(&self) -> usize {
        self.resolved.count_ones()
    }

    pub fn is_resolved(&self, idx: usize) -> bool {
        self.resolved.get(idx)
    }

    pub fn zero_row_count(&self, idx: usize) -> usize {
        self.zero[idx].count_ones()
    }

    fn components(&mut self) -> usize {
        let resolved: Vec<usize> = self.resolved.ones().collect();
        let mut roots: Vec<usize> = resolved.into_iter().map(|i| self.comp.find(i)).collect();
        roots.sort_unstable();
        roots.dedup();
        roots.len()
    }

    fn mark_cross_zeros(&mut self, a: &ProjectedBlock, b: &ProjectedBlock) {
        // Orthogonality of the input set forces blocks with intersecting
        // excluded intervals to have disjoint joint-party supports.
        debug_assert!(!a.support_mask.intersects(&b.support_mask));
        for &u in &a.support_idx {
            self.zero[u].or_assign(&b.support_mask);
            self.zero[u].clear(u);
        }
        for &v in &b.support_idx {
            self.zero[v].or_assign(&a.support_mask);
            self.zero[v].clear(v);
        }
    }

    fn resolve_block(&mut self, block_pos: usize, block: &ProjectedBlock, anchor: usize) {
        for &s in &block.support_idx {
            self.zero[s].or_assign(&block.support_mask);
            self.zero[s].clear(s);
            self.resolved.set(s);
            self.comp.union(anchor, s);
        }
        self.fired[block_pos] = true;
    }

    /// Equality of the derived facts, ignoring the trace.
    pub fn same_facts(&self, other: &DeductionState) -> bool {
        self.zero == other.zero && self.resolved == other.resolved
    }
}

/// Projects a labeled state set onto one cut: per block, its support box on
/// the cut grid, its interval on the excluded party, and which Fourier
/// indices are present.
pub fn project_blocks(set: &StateSet, cut: &Cut) -> Result<(CutGrid, Vec<ProjectedBlock>)> {
    let n = set.dims().len();
    let i = cut.excluded_party;
    if i < 1 || i > n {
        return Err(Error::invalid(format!("no party {i} to exclude")));
    }
    let parties: Vec<usize> = (1..=n).filter(|&p| p != i).collect();
    let dims: Vec<u32> = parties.iter().map(|&p| set.dims()[p - 1]).collect();
    let size = dims.iter().map(|&d| d as usize).product();
    let grid = CutGrid {
        parties,
        dims,
        size,
    };

    let mut grouped: BTreeMap<BlockKey, Vec<&crate::states::ProductState>> = BTreeMap::new();
    for s in set.states() {
        match &s.label {
            StateLabel::Block { key, .. } => grouped.entry(key.clone()).or_default().push(s),
            StateLabel::Stopper => continue,
            StateLabel::External { .. } => {
                return Err(Error::invalid(
                    "set contains states not derived from a decomposition".to_string(),
                ))
            }
        }
    }

    let mut blocks = Vec::with_capacity(grouped.len());
    for (key, states) in grouped {
        let first = states[0];
        let mut support = Vec::with_capacity(n - 1);
        for &p in grid.parties() {
            let (lo, hi) = first
                .factor(p)
                .support()
                .ok_or_else(|| Error::invalid("zero local factor".to_string()))?;
            support.push((lo as u32, hi as u32));
        }
        let (elo, ehi) = first
            .factor(i)
            .support()
            .ok_or_else(|| Error::invalid("zero local factor".to_string()))?;
        let excluded_interval = (elo as u32, ehi as u32);
        let m = (ehi - elo + 1) as u32;
        let alpha_lens: Vec<u32> = support.iter().map(|&(lo, hi)| hi - lo + 1).collect();
        let alpha_count: usize = alpha_lens.iter().map(|&l| l as usize).product();

        let mut pb = ProjectedBlock {
            key: key.clone(),
            excluded_interval,
            support_idx: grid.box_indices(&support),
            support_mask: Bits::new(grid.size()),
            support,
            alpha_lens,
            excluded_vectors: vec![None; m as usize],
            avail: vec![Vec::new(); alpha_count],
            labels: BTreeMap::new(),
        };
        for &idx in &pb.support_idx {
            pb.support_mask.set(idx);
        }
        for s in states {
            let fourier = s
                .label
                .fourier()
                .expect("grouped states carry block labels");
            if fourier.len() != n {
                return Err(Error::malformed("fourier index has wrong length"));
            }
            let ns = fourier[i - 1];
            let alpha_vec: Vec<u32> = grid.parties().iter().map(|&p| fourier[p - 1]).collect();
            if ns >= m || alpha_vec.iter().zip(&pb.alpha_lens).any(|(&a, &l)| a >= l) {
                return Err(Error::malformed("fourier index out of range for its block"));
            }
            // The deduction rules are only valid when each block family is
            // the canonical product-Fourier basis of its support.
            for party in 1..=n {
                let interval = if party == i {
                    excluded_interval
                } else {
                    let pos = grid
                        .parties()
                        .iter()
                        .position(|&p| p == party)
                        .expect("present");
                    pb.support[pos]
                };
                let factor = s.factor(party);
                let phase = fourier[party - 1];
                let width = interval.1 - interval.0 + 1;
                for (x, amp) in factor.amps.iter().enumerate() {
                    let expected = if (x as u32) < interval.0 || (x as u32) > interval.1 {
                        crate::cyclotomic::CycNum::zero(1)
                    } else {
                        crate::cyclotomic::CycNum::root(
                            width,
                            (x as i64 - interval.0 as i64) * phase as i64,
                        )
                    };
                    if amp != &expected {
                        return Err(Error::invalid(
                            "block states are not the canonical Fourier families".to_string(),
                        ));
                    }
                }
            }
            let alpha = pb.alpha_index(&alpha_vec);
            if pb.labels.insert((alpha, ns), s.label.clone()).is_some() {
                return Err(Error::malformed("duplicate state in block"));
            }
            pb.avail[alpha].push(ns);
            let slot = &mut pb.excluded_vectors[ns as usize];
            match slot {
                None => *slot = Some(s.factor(i).clone()),
                Some(v) if v == s.factor(i) => {}
                Some(_) => {
                    return Err(Error::malformed(
                        "inconsistent excluded-party factors within a block",
                    ))
                }
            }
        }
        for a in &mut pb.avail {
            a.sort_unstable();
        }
        blocks.push(pb);
    }
    Ok((grid, blocks))
}

fn intervals_intersect(a: (u32, u32), b: (u32, u32)) -> bool {
    a.0 <= b.1 && b.0 <= a.1
}

/// Finds one witness state pair per availability-class pair, or `None` if
/// some class pair admits no state pair with nonzero excluded overlap.
fn seed_witnesses(a: &ProjectedBlock, b: &ProjectedBlock) -> Option<Vec<(StateLabel, StateLabel)>> {
    let classes_a = a.classes();
    let classes_b = b.classes();
    let mut witnesses = Vec::new();
    for (ns_a, alphas_a) in &classes_a {
        for (ns_b, alphas_b) in &classes_b {
            let mut found = None;
            'search: for &na in ns_a {
                for &nb in ns_b {
                    let u = a.excluded_vectors[na as usize]
                        .as_ref()
                        .expect("available index");
                    let v = b.excluded_vectors[nb as usize]
                        .as_ref()
                        .expect("available index");
                    let g = cyc_inner(u, v).expect("same party and dimension");
                    if !g.is_zero() {
                        found = Some((na, nb));
                        break 'search;
                    }
                }
            }
            let (na, nb) = found?;
            witnesses.push((
                a.labels[&(alphas_a[0], na)].clone(),
                b.labels[&(alphas_b[0], nb)].clone(),
            ));
        }
    }
    witnesses.sort();
    witnesses.dedup();
    Some(witnesses)
}

/// Seeds the zero relation from every applicable block pair. Assumes the
/// underlying set is pairwise orthogonal, so that blocks with intersecting
/// excluded intervals have disjoint supports on the remaining parties.
pub fn seed_zero_blocks(grid: &CutGrid, blocks: &[ProjectedBlock]) -> DeductionState {
    let mut ds = DeductionState::new(grid, blocks.len());
    for i in 0..blocks.len() {
        for j in i + 1..blocks.len() {
            let (a, b) = (&blocks[i], &blocks[j]);
            if !intervals_intersect(a.excluded_interval, b.excluded_interval) {
                continue;
            }
            if !a.spanning() || !b.spanning() {
                continue;
            }
            let Some(witnesses) = seed_witnesses(a, b) else {
                continue;
            };
            ds.mark_cross_zeros(a, b);
            ds.trace.push(TraceEvent::SeedZeros {
                block_a: a.key.clone(),
                block_b: b.key.clone(),
                witnesses,
            });
        }
    }
    ds
}

fn block_hypotheses(ds: &DeductionState, grid: &CutGrid, block: &ProjectedBlock) -> [bool; 4] {
    let spanning = block.spanning();
    let pairs = block.intra_pairs_ok();
    let mut outward = true;
    let mut complement = Bits::full(grid.size());
    for &s in &block.support_idx {
        complement.clear(s);
    }
    for &s in &block.support_idx {
        if !ds.zero[s].contains_all(&complement) {
            outward = false;
            break;
        }
    }
    let anchored = block.support_idx.iter().any(|&s| ds.resolved.get(s));
    [spanning, pairs, outward, anchored]
}

/// Runs the two propagation rules to a fixpoint: zero-row coordinates seed
/// the resolved set, and blocks whose hypotheses hold resolve their whole
/// support into the anchor's component.
pub fn propagate(ds: &mut DeductionState, grid: &CutGrid, blocks: &[ProjectedBlock]) {
    loop {
        let mut changed = false;
        for v in 0..grid.size() {
            if !ds.resolved.get(v) && ds.zero[v].count_ones() == grid.size() - 1 {
                ds.resolved.set(v);
                ds.trace.push(TraceEvent::ZeroRowSeed {
                    coord: grid.coords_of(v),
                });
                changed = true;
            }
        }
        for (pos, block) in blocks.iter().enumerate() {
            if ds.fired[pos] {
                continue;
            }
            let [spanning, pairs, outward, anchored] = block_hypotheses(ds, grid, block);
            if !(spanning && pairs && outward && anchored) {
                continue;
            }
            let anchor = *block
                .support_idx
                .iter()
                .find(|&&s| ds.resolved.get(s))
                .expect("anchored");
            ds.resolve_block(pos, block, anchor);
            ds.trace.push(TraceEvent::ResolveBlock {
                block: block.key.clone(),
                anchor: grid.coords_of(anchor),
            });
            changed = true;
        }
        if !changed {
            break;
        }
    }
}

/// Verdict for one cut.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CutStatus {
    Certified,
    Undecided,
}

/// Diagnosis of a stalled cut: what is left and why blocks did not fire.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Frontier {
    pub unresolved: Vec<Vec<u32>>,
    pub stalled_blocks: Vec<StalledBlock>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StalledBlock {
    pub block: BlockKey,
    pub missing: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CutReport {
    pub excluded_party: usize,
    pub status: CutStatus,
    pub grid_size: usize,
    pub resolved: usize,
    pub components: usize,
    pub trace: Vec<TraceEvent>,
    pub frontier: Option<Frontier>,
}

/// Certification result over all cuts.
#[derive(Debug, Clone, Serialize)]
pub struct Certificate {
    pub dims: Vec<u32>,
    pub role: Role,
    pub verdict: CutStatus,
    /// Set for local dimensions beyond the all-3 case, where the verdict
    /// rests on the engine alone.
    pub note: Option<String>,
    pub cuts: Vec<CutReport>,
}

impl Certificate {
    pub fn certified(&self) -> bool {
        self.verdict == CutStatus::Certified
    }
}

/// Runs seeding and propagation for one cut.
pub fn certify_cut(set: &StateSet, cut: &Cut) -> Result<CutReport> {
    let (grid, blocks) = project_blocks(set, cut)?;
    let mut ds = seed_zero_blocks(&grid, &blocks);
    propagate(&mut ds, &grid, &blocks);
    let resolved = ds.resolved_count();
    let components = ds.components();
    let certified = resolved == grid.size() && components <= 1;
    let frontier = (!certified).then(|| {
        let unresolved = (0..grid.size())
            .filter(|&v| !ds.resolved.get(v))
            .map(|v| grid.coords_of(v))
            .collect();
        let stalled_blocks = blocks
            .iter()
            .enumerate()
            .filter(|(pos, _)| !ds.fired[*pos])
            .map(|(_, b)| {
                let [spanning, pairs, outward, anchored] = block_hypotheses(&ds, &grid, b);
                let mut missing = Vec::new();
                if !spanning {
                    missing.push("spanning-family".to_string());
                }
                if !pairs {
                    missing.push("intra-pair-witness".to_string());
                }
                if !outward {
                    missing.push("outward-zeros".to_string());
                }
                if !anchored {
                    missing.push("anchor".to_string());
                }
                StalledBlock {
                    block: b.key.clone(),
                    missing,
                }
            })
            .collect();
        Frontier {
            unresolved,
            stalled_blocks,
        }
    });
    Ok(CutReport {
        excluded_party: cut.excluded_party,
        status: if certified {
            CutStatus::Certified
        } else {
            CutStatus::Undecided
        },
        grid_size: grid.size(),
        resolved,
        components,
        trace: ds.trace,
        frontier,
    })
}

/// Certifies strong nonlocality of a labeled orthogonal product set: every
/// cut must resolve its full grid into one constant component. The input
/// must be pairwise orthogonal. `Undecided` makes no claim either way.
pub fn certify_strong_nonlocality(set: &StateSet) -> Result<Certificate> {
    let ortho = check_pairwise_orthogonal(set);
    if !ortho.is_clean() {
        return Err(Error::NotOrthogonal {
            violations: ortho.violations.len(),
        });
    }
    let n = set.dims().len();
    let cuts: Vec<CutReport> = (1..=n)
        .into_par_iter()
        .map(|i| certify_cut(set, &Cut { excluded_party: i }))
        .collect::<Result<Vec<_>>>()?;
    let verdict = if cuts.iter().all(|c| c.status == CutStatus::Certified) {
        CutStatus::Certified
    } else {
        CutStatus::Undecided
    };
    let all3 = set.dims().iter().all(|&d| d == 3);
    Ok(Certificate {
        dims: set.dims().to_vec(),
        role: set.role(),
        verdict,
        note: (!all3).then(|| "engine-derived verdict for general local dimensions".to_string()),
        cuts,
    })
}

/// Replays a trace, re-checking every rule's hypotheses, and returns the
/// reconstructed deduction state. Errors if any step fails its checks or
/// differs from what the deterministic rules would derive.
pub fn replay_trace(
    grid: &CutGrid,
    blocks: &[ProjectedBlock],
    trace: &[TraceEvent],
) -> Result<DeductionState> {
    let by_key: BTreeMap<&BlockKey, usize> = blocks
        .iter()
        .enumerate()
        .map(|(i, b)| (&b.key, i))
        .collect();
    let mut ds = DeductionState::new(grid, blocks.len());
    for event in trace {
        match event {
            TraceEvent::SeedZeros {
                block_a,
                block_b,
                witnesses,
            } => {
                let a = &blocks[*by_key
                    .get(block_a)
                    .ok_or_else(|| Error::invalid("unknown block in trace".to_string()))?];
                let b = &blocks[*by_key
                    .get(block_b)
                    .ok_or_else(|| Error::invalid("unknown block in trace".to_string()))?];
                if !intervals_intersect(a.excluded_interval, b.excluded_interval) {
                    return Err(Error::invalid(
                        "trace seeds non-intersecting blocks".to_string(),
                    ));
                }
                if !a.spanning() || !b.spanning() {
                    return Err(Error::invalid(
                        "trace seeds non-spanning blocks".to_string(),
                    ));
                }
                let expected = seed_witnesses(a, b)
                    .ok_or_else(|| Error::invalid("trace seeds unjustified pair".to_string()))?;
                if &expected != witnesses {
                    return Err(Error::invalid(
                        "trace witnesses differ from derivation".to_string(),
                    ));
                }
                ds.mark_cross_zeros(a, b);
            }
            TraceEvent::ZeroRowSeed { coord } => {
                let v = grid.index_of(coord);
                if ds.zero[v].count_ones() != grid.size() - 1 {
                    return Err(Error::invalid("trace seeds a non-zero row".to_string()));
                }
                ds.resolved.set(v);
            }
            TraceEvent::ResolveBlock { block, anchor } => {
                let pos = *by_key
                    .get(block)
                    .ok_or_else(|| Error::invalid("unknown block in trace".to_string()))?;
                let b = &blocks[pos];
                let [spanning, pairs, outward, anchored] = block_hypotheses(&ds, grid, b);
                if !(spanning && pairs && outward && anchored) {
                    return Err(Error::invalid(
                        "trace resolves a block out of order".to_string(),
                    ));
                }
                let anchor_idx = grid.index_of(anchor);
                if !ds.resolved.get(anchor_idx) {
                    return Err(Error::invalid("trace anchor is not resolved".to_string()));
                }
                ds.resolve_block(pos, b, anchor_idx);
            }
        }
    }
    Ok(ds)
}
