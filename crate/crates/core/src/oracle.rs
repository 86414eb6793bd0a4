//! Independent reference implementations used to cross-check the main
//! decision procedures. Nothing here is called from the library's own
//! algorithms.

use std::collections::HashMap;

use crate::states::StateSet;
use crate::upb::LocalFactorIndex;
use crate::verify::exact_rank;

/// Textbook unextendibility criterion by brute force: the set is extendible
/// iff some assignment of states to parties puts every party's fiber of
/// local factors inside a hyperplane (rank at most `d - 1`).
///
/// Exponential in the set size; meant for sets of a dozen states.
pub fn assignment_extendible(set: &StateSet) -> bool {
    let n = set.dims().len();
    let index = LocalFactorIndex::build(set);
    let mut rank_memo: Vec<HashMap<u64, usize>> = vec![HashMap::new(); n];
    let mut masks = vec![0u64; n];
    dfs(set, &index, &mut rank_memo, &mut masks, 0)
}

fn fiber_rank(
    index: &LocalFactorIndex,
    memo: &mut HashMap<u64, usize>,
    party: usize,
    mask: u64,
) -> usize {
    if let Some(&r) = memo.get(&mask) {
        return r;
    }
    let factors = index.factors(party);
    let vs: Vec<_> = (0..factors.len())
        .filter(|i| mask >> i & 1 == 1)
        .map(|i| factors[i].clone())
        .collect();
    let r = exact_rank(&vs);
    memo.insert(mask, r);
    r
}

fn dfs(
    set: &StateSet,
    index: &LocalFactorIndex,
    memo: &mut [HashMap<u64, usize>],
    masks: &mut [u64],
    state: usize,
) -> bool {
    if state == set.len() {
        return true;
    }
    let n = set.dims().len();
    for p in 0..n {
        let id = index.factor_of(p + 1, state);
        let bit = 1u64 << id;
        if masks[p] & bit != 0 {
            // Factor already in the fiber: assigning here costs nothing.
            if dfs(set, index, memo, masks, state + 1) {
                return true;
            }
            continue;
        }
        let next = masks[p] | bit;
        if fiber_rank(index, &mut memo[p], p + 1, next) < set.dims()[p] as usize {
            masks[p] = next;
            if dfs(set, index, memo, masks, state + 1) {
                return true;
            }
            masks[p] &= !bit;
        }
    }
    false
}
