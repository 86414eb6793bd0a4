//! Unextendibility decision: certify a UPB or produce an orthogonal
//! product witness.
//!
//! A product state is orthogonal to a member iff it is orthogonal on some
//! party, so an orthogonal extension exists exactly when one per-party
//! "kill option" can be chosen for each party, a set of local factors lying
//! in a common hyperplane, such that every member is killed somewhere. The
//! search branches on the options covering the first uncovered state
//! rather than on per-state party assignments, which keeps the branching
//! factor at the number of distinct local factors instead of `N^|set|`.

use std::collections::HashMap;

use serde::Serialize;

use crate::cyclotomic::CycNum;
use crate::error::{Error, Result};
use crate::states::{product_inner, LocalVector, ProductState, StateLabel, StateSet};
use crate::util::Bits;
use crate::verify::{check_pairwise_orthogonal, exact_rank, nullspace_vector};

/// Deduplicated local factors per party, with each state mapped to its
/// factor id. Deduplication is up to nonzero scaling, decided exactly.
#[derive(Debug, Clone)]
pub struct LocalFactorIndex {
    reps: Vec<Vec<LocalVector>>,
    state_factor: Vec<Vec<usize>>,
}

impl LocalFactorIndex {
    pub fn build(set: &StateSet) -> Self {
        let n = set.dims().len();
        let mut reps: Vec<Vec<LocalVector>> = vec![Vec::new(); n];
        let mut state_factor: Vec<Vec<usize>> = vec![Vec::new(); n];
        for s in set.states() {
            for p in 0..n {
                let f = s.factor(p + 1);
                let id = match reps[p].iter().position(|r| r.proportional(f)) {
                    Some(id) => id,
                    None => {
                        reps[p].push(f.clone());
                        reps[p].len() - 1
                    }
                };
                state_factor[p].push(id);
            }
        }
        LocalFactorIndex { reps, state_factor }
    }

    pub fn factors(&self, party: usize) -> &[LocalVector] {
        &self.reps[party - 1]
    }

    pub fn factor_of(&self, party: usize, state: usize) -> usize {
        self.state_factor[party - 1][state]
    }
}

/// One way to kill states at a party: a maximal set of factors of rank at
/// most `d - 1` (a common hyperplane), and the states it covers.
#[derive(Debug, Clone, Serialize)]
pub struct KillOption {
    pub party: usize,
    pub factor_ids: Vec<usize>,
    pub killed: Vec<usize>,
    pub maximal: bool,
    #[serde(skip)]
    killed_mask: Bits,
    #[serde(skip)]
    rank: usize,
}

impl KillOption {
    pub fn rank(&self) -> usize {
        self.rank
    }
}

struct RankMemo<'a> {
    factors: &'a [LocalVector],
    cache: HashMap<u64, usize>,
}

impl<'a> RankMemo<'a> {
    fn new(factors: &'a [LocalVector]) -> Self {
        RankMemo {
            factors,
            cache: HashMap::new(),
        }
    }

    fn rank(&mut self, mask: u64) -> usize {
        if let Some(&r) = self.cache.get(&mask) {
            return r;
        }
        let vs: Vec<LocalVector> = (0..self.factors.len())
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| self.factors[i].clone())
            .collect();
        let r = exact_rank(&vs);
        self.cache.insert(mask, r);
        r
    }

    /// Every factor lying in the span of `mask`.
    fn closure(&mut self, mask: u64) -> u64 {
        let base = self.rank(mask);
        let mut out = mask;
        for g in 0..self.factors.len() {
            if out >> g & 1 == 0 && self.rank(mask | 1 << g) == base {
                out |= 1 << g;
            }
        }
        out
    }
}

fn independent_subsets(memo: &mut RankMemo, max_rank: usize) -> Vec<u64> {
    let f = memo.factors.len();
    let mut flats: Vec<u64> = Vec::new();
    let mut stack: Vec<(u64, usize, usize)> = (0..f).map(|g| (1u64 << g, g, 1)).collect();
    stack.reverse();
    while let Some((mask, last, rank)) = stack.pop() {
        flats.push(memo.closure(mask));
        if rank == max_rank {
            continue;
        }
        for g in last + 1..f {
            if mask >> g & 1 == 0 && memo.rank(mask | 1 << g) == rank + 1 {
                stack.push((mask | 1 << g, g, rank + 1));
            }
        }
    }
    flats.sort_unstable();
    flats.dedup();
    flats
}

/// All maximal kill options of one party: closures of independent factor
/// subsets of rank below the local dimension, filtered to maximal sets.
pub fn enumerate_kill_options(set: &StateSet, party: usize) -> Vec<KillOption> {
    let index = LocalFactorIndex::build(set);
    enumerate_options_indexed(set, &index, party)
}

fn enumerate_options_indexed(
    set: &StateSet,
    index: &LocalFactorIndex,
    party: usize,
) -> Vec<KillOption> {
    let d = set.dims()[party - 1] as usize;
    let factors = index.factors(party);
    assert!(factors.len() <= 64, "factor universe exceeds the id width");
    let mut memo = RankMemo::new(factors);
    let flats = independent_subsets(&mut memo, d.saturating_sub(1));
    let maximal: Vec<u64> = flats
        .iter()
        .copied()
        .filter(|&m| !flats.iter().any(|&o| o != m && o & m == m))
        .collect();
    maximal
        .into_iter()
        .map(|mask| {
            let factor_ids: Vec<usize> =
                (0..factors.len()).filter(|i| mask >> i & 1 == 1).collect();
            let mut killed_mask = Bits::new(set.len());
            let mut killed = Vec::new();
            for s in 0..set.len() {
                if mask >> index.factor_of(party, s) & 1 == 1 {
                    killed_mask.set(s);
                    killed.push(s);
                }
            }
            let rank = memo.rank(mask);
            KillOption {
                party,
                factor_ids,
                killed,
                maximal: true,
                killed_mask,
                rank,
            }
        })
        .collect()
}

/// Outcome of the unextendibility decision.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum UpbStatus {
    Upb,
    Extendible,
    InconclusiveBudget,
}

#[derive(Debug, Clone, Serialize)]
pub struct ChosenOption {
    pub party: usize,
    pub factor_ids: Vec<usize>,
    pub killed: Vec<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct UpbVerdict {
    pub status: UpbStatus,
    /// On `Extendible`: a product state exactly orthogonal to every input
    /// state, verified before being returned.
    pub witness: Option<ProductState>,
    /// On `Extendible`: the hyperplane chosen at each covering party.
    pub cover: Option<Vec<ChosenOption>>,
    pub nodes_explored: u64,
    pub node_budget: u64,
    pub options_per_party: Vec<usize>,
}

#[derive(Debug, Clone, Copy)]
pub struct UpbConfig {
    pub node_budget: u64,
}

impl Default for UpbConfig {
    fn default() -> Self {
        UpbConfig {
            node_budget: 100_000_000,
        }
    }
}

enum Outcome {
    Found,
    Exhausted,
    Budget,
}

struct Search<'a> {
    options: &'a [Vec<KillOption>],
    party_order: &'a [usize],
    killable: &'a [Bits],
    n_states: usize,
    budget: u64,
    nodes: u64,
    assigned: Vec<Option<usize>>,
}

impl Search<'_> {
    fn dfs(&mut self, covered: &Bits) -> Outcome {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Outcome::Budget;
        }
        let Some(first_uncovered) = (0..self.n_states).find(|&i| !covered.get(i)) else {
            return Outcome::Found;
        };
        // A state no remaining party can kill makes the branch hopeless.
        let mut reach = covered.clone();
        for p in 0..self.assigned.len() {
            if self.assigned[p].is_none() {
                reach.or_assign(&self.killable[p]);
            }
        }
        if reach.count_ones() < self.n_states {
            return Outcome::Exhausted;
        }
        for &p in self.party_order {
            if self.assigned[p].is_some() {
                continue;
            }
            for (oi, opt) in self.options[p].iter().enumerate() {
                if !opt.killed_mask.get(first_uncovered) {
                    continue;
                }
                self.assigned[p] = Some(oi);
                let mut next = covered.clone();
                next.or_assign(&opt.killed_mask);
                match self.dfs(&next) {
                    Outcome::Found => return Outcome::Found,
                    Outcome::Budget => return Outcome::Budget,
                    Outcome::Exhausted => {}
                }
                self.assigned[p] = None;
            }
        }
        Outcome::Exhausted
    }
}

/// Decides unextendibility with the default node budget.
pub fn certify_unextendible(set: &StateSet) -> Result<UpbVerdict> {
    certify_unextendible_with(set, UpbConfig::default())
}

/// Decides unextendibility of a pairwise orthogonal product set.
///
/// Searches for one kill option per party whose killed sets cover every
/// state. A cover yields an `Extendible` verdict with a witness assembled
/// from exact nullspace vectors of the chosen hyperplanes; an exhausted
/// search is a `UPB` verdict. Exceeding the node budget is reported as
/// inconclusive, never as a mathematical verdict.
pub fn certify_unextendible_with(set: &StateSet, config: UpbConfig) -> Result<UpbVerdict> {
    let ortho = check_pairwise_orthogonal(set);
    if !ortho.is_clean() {
        return Err(Error::NotOrthogonal {
            violations: ortho.violations.len(),
        });
    }
    let n = set.dims().len();
    let index = LocalFactorIndex::build(set);
    let options: Vec<Vec<KillOption>> = (1..=n)
        .map(|p| enumerate_options_indexed(set, &index, p))
        .collect();
    let options_per_party: Vec<usize> = options.iter().map(Vec::len).collect();
    let killable: Vec<Bits> = options
        .iter()
        .map(|opts| {
            let mut b = Bits::new(set.len());
            for o in opts {
                b.or_assign(&o.killed_mask);
            }
            b
        })
        .collect();
    let mut party_order: Vec<usize> = (0..n).collect();
    party_order.sort_by_key(|&p| (options[p].len(), p));

    let mut search = Search {
        options: &options,
        party_order: &party_order,
        killable: &killable,
        n_states: set.len(),
        budget: config.node_budget,
        nodes: 0,
        assigned: vec![None; n],
    };
    let outcome = search.dfs(&Bits::new(set.len()));
    let nodes = search.nodes;
    match outcome {
        Outcome::Found => {
            let assigned = search.assigned.clone();
            let witness = build_witness(set, &index, &options, &assigned)?;
            let cover = assigned
                .iter()
                .enumerate()
                .filter_map(|(p, oi)| {
                    oi.map(|oi| {
                        let o = &options[p][oi];
                        ChosenOption {
                            party: p + 1,
                            factor_ids: o.factor_ids.clone(),
                            killed: o.killed.clone(),
                        }
                    })
                })
                .collect();
            Ok(UpbVerdict {
                status: UpbStatus::Extendible,
                witness: Some(witness),
                cover: Some(cover),
                nodes_explored: nodes,
                node_budget: config.node_budget,
                options_per_party,
            })
        }
        Outcome::Exhausted => Ok(UpbVerdict {
            status: UpbStatus::Upb,
            witness: None,
            cover: None,
            nodes_explored: nodes,
            node_budget: config.node_budget,
            options_per_party,
        }),
        Outcome::Budget => Ok(UpbVerdict {
            status: UpbStatus::InconclusiveBudget,
            witness: None,
            cover: None,
            nodes_explored: nodes,
            node_budget: config.node_budget,
            options_per_party,
        }),
    }
}

fn build_witness(
    set: &StateSet,
    index: &LocalFactorIndex,
    options: &[Vec<KillOption>],
    assigned: &[Option<usize>],
) -> Result<ProductState> {
    let mut factors = Vec::with_capacity(assigned.len());
    for (p, choice) in assigned.iter().enumerate() {
        let d = set.dims()[p] as usize;
        let amps = match choice {
            Some(oi) => {
                let opt = &options[p][*oi];
                let rows: Vec<Vec<CycNum>> = opt
                    .factor_ids
                    .iter()
                    .map(|&id| {
                        index.factors(p + 1)[id]
                            .amps
                            .iter()
                            .map(CycNum::conj)
                            .collect()
                    })
                    .collect();
                nullspace_vector(&rows, d)
                    .expect("kill options have rank below the local dimension")
            }
            None => {
                let mut amps = vec![CycNum::zero(1); d];
                amps[0] = CycNum::one();
                amps
            }
        };
        factors.push(LocalVector::new(p + 1, amps));
    }
    let witness = ProductState::new(StateLabel::External { id: 0 }, factors);
    for s in set.states() {
        let g = product_inner(s, &witness)?;
        if !g.is_zero() {
            return Err(Error::invalid(
                "internal error: candidate witness fails exact verification".to_string(),
            ));
        }
    }
    Ok(witness)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypercube::PartyDims;
    use crate::states::{build_ops, build_upb, shifts_upb, stopper, Role};

    fn dims(v: &[u32]) -> PartyDims {
        PartyDims::new(v.to_vec()).unwrap()
    }

    #[test]
    fn shifts_has_four_singleton_options_per_party() {
        let set = shifts_upb();
        for p in 1..=3 {
            let opts = enumerate_kill_options(&set, p);
            assert_eq!(opts.len(), 4);
            assert!(opts
                .iter()
                .all(|o| o.factor_ids.len() == 1 && o.rank() == 1));
        }
    }

    #[test]
    fn shifts_is_unextendible() {
        let v = certify_unextendible(&shifts_upb()).unwrap();
        assert_eq!(v.status, UpbStatus::Upb);
        assert!(v.witness.is_none());
    }

    #[test]
    fn single_factor_party_kills_everything() {
        let set = shifts_upb();
        let states: Vec<_> = set
            .states()
            .iter()
            .map(|s| {
                let mut s = s.clone();
                s.factors[0] = LocalVector::basis(1, 2, 0);
                s
            })
            .collect();
        let degenerate = StateSet::from_parts(vec![2, 2, 2], Role::Custom, states).unwrap();
        let opts = enumerate_kill_options(&degenerate, 1);
        assert_eq!(opts.len(), 1);
        assert_eq!(opts[0].killed.len(), degenerate.len());
    }

    #[test]
    fn small_upb_certifies() {
        let v = certify_unextendible(&build_upb(&dims(&[3, 3, 3]))).unwrap();
        assert_eq!(v.status, UpbStatus::Upb);
    }

    #[test]
    fn ops_is_extendible_with_the_central_witness() {
        let v = certify_unextendible(&build_ops(&dims(&[3, 3, 3]))).unwrap();
        assert_eq!(v.status, UpbStatus::Extendible);
        let w = v.witness.unwrap();
        let center = LocalVector::basis(1, 3, 1);
        for p in 1..=3 {
            assert!(w.factor(p).proportional(&LocalVector {
                party: p,
                ..center.clone()
            }));
        }
    }

    #[test]
    fn upb_without_stopper_is_extendible() {
        let d = dims(&[3, 3, 3]);
        let set = build_upb(&d).without(|s| s.label.is_stopper());
        let v = certify_unextendible(&set).unwrap();
        assert_eq!(v.status, UpbStatus::Extendible);
        // Any witness here must overlap the stopper: one orthogonal to the
        // stopper as well would extend the full set, which is a UPB.
        let w = v.witness.unwrap();
        assert!(!crate::states::product_inner(&stopper(&d), &w)
            .unwrap()
            .is_zero());
    }

    #[test]
    fn full_support_extension_collapses_to_the_stopper() {
        // Per party, the two phase-1 Fourier factors span a hyperplane
        // whose kill sets cover every non-stopper member, and whose
        // nullspace forces all three coefficients equal. The only
        // full-support extension direction is therefore the all-ones state.
        let d = dims(&[3, 3, 3]);
        let set = build_upb(&d).without(|s| s.label.is_stopper());
        let index = LocalFactorIndex::build(&set);
        let ones = stopper(&d);
        let mut covered = vec![false; set.len()];
        for party in 1..=3 {
            let eta_minus = LocalVector::new(
                party,
                vec![CycNum::one(), CycNum::integer(-1), CycNum::zero(1)],
            );
            let xi_minus = LocalVector::new(
                party,
                vec![CycNum::zero(1), CycNum::one(), CycNum::integer(-1)],
            );
            let ids: Vec<usize> = index
                .factors(party)
                .iter()
                .enumerate()
                .filter(|(_, r)| r.proportional(&eta_minus) || r.proportional(&xi_minus))
                .map(|(i, _)| i)
                .collect();
            assert_eq!(ids.len(), 2);
            let opts = enumerate_kill_options(&set, party);
            let opt = opts
                .iter()
                .find(|o| ids.iter().all(|i| o.factor_ids.contains(i)))
                .expect("the phase-1 hyperplane is a maximal option");
            assert_eq!(opt.factor_ids, ids);
            for &s in &opt.killed {
                covered[s] = true;
            }
            let rows: Vec<Vec<CycNum>> = [&eta_minus, &xi_minus]
                .iter()
                .map(|f| f.amps.iter().map(CycNum::conj).collect())
                .collect();
            let x = crate::verify::nullspace_vector(&rows, 3).unwrap();
            let dir = LocalVector::new(party, x);
            assert!(
                dir.proportional(ones.factor(party)),
                "coefficients collapse"
            );
        }
        assert!(covered.iter().all(|&c| c));
    }

    #[test]
    fn tiny_budget_is_reported_distinctly() {
        let v =
            certify_unextendible_with(&build_upb(&dims(&[3, 3, 3])), UpbConfig { node_budget: 1 })
                .unwrap();
        assert_eq!(v.status, UpbStatus::InconclusiveBudget);
    }

    #[test]
    fn non_orthogonal_input_is_rejected() {
        let set = shifts_upb();
        let mut states = set.states().to_vec();
        states.push(states[0].clone());
        let dup = StateSet::from_parts(vec![2, 2, 2], Role::Custom, states).unwrap();
        assert!(matches!(
            certify_unextendible(&dup),
            Err(Error::NotOrthogonal { .. })
        ));
    }
}
