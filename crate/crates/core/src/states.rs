//! Product-state families attached to a decomposition.
//!
//! Every block of a decomposition carries a family of product states: point
//! factors contribute a single computational basis vector, range factors
//! contribute the full Fourier basis of their interval. States are never
//! normalized; amplitudes are exact cyclotomic integers. The constructions
//! exposed here are the orthogonal product basis (all blocks), the strongly
//! nonlocal orthogonal product set (outermost layer only), and the
//! unextendible product basis (drop each block's all-ones "plus" state and
//! add the all-ones stopper).

use serde::{Deserialize, Serialize};

use crate::cyclotomic::{lcm, validate_amp, CycNum};
use crate::error::{Error, Result};
use crate::hypercube::{build_decomposition, BlockKey, Decomposition, Family, PartyDims, Subcube};

/// Amplitudes of one party's local vector.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalVector {
    pub party: usize,
    pub amps: Vec<CycNum>,
}

impl LocalVector {
    pub fn new(party: usize, amps: Vec<CycNum>) -> Self {
        LocalVector { party, amps }
    }

    pub fn basis(party: usize, dim: u32, index: u32) -> Self {
        let mut amps = vec![CycNum::zero(1); dim as usize];
        amps[index as usize] = CycNum::one();
        LocalVector { party, amps }
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn is_zero(&self) -> bool {
        self.amps.iter().all(CycNum::is_zero)
    }

    /// Interval of the nonzero amplitudes, if any.
    pub fn support(&self) -> Option<(usize, usize)> {
        let lo = self.amps.iter().position(|a| !a.is_zero())?;
        let hi = self.amps.iter().rposition(|a| !a.is_zero())?;
        Some((lo, hi))
    }

    /// Exact proportionality up to a nonzero scalar, decided by
    /// cross-multiplication so no division is needed.
    pub fn proportional(&self, other: &LocalVector) -> bool {
        if self.dim() != other.dim() {
            return false;
        }
        let (i, j) = match (
            self.amps.iter().position(|a| !a.is_zero()),
            other.amps.iter().position(|a| !a.is_zero()),
        ) {
            (Some(i), Some(j)) => (i, j),
            (None, None) => return true,
            _ => return false,
        };
        if i != j {
            return false;
        }
        let (s, o) = (&self.amps[i], &other.amps[i]);
        self.amps
            .iter()
            .zip(&other.amps)
            .all(|(a, b)| (a * o) == (b * s))
    }
}

/// Hermitian inner product of two local vectors, conjugate-linear in the
/// first argument. Exact, including the zero test.
pub fn cyc_inner(u: &LocalVector, v: &LocalVector) -> Result<CycNum> {
    if u.party != v.party {
        return Err(Error::invalid(
            "inner product across different parties".to_string(),
        ));
    }
    if u.dim() != v.dim() {
        return Err(Error::invalid(
            "inner product with mismatched dimensions".to_string(),
        ));
    }
    Ok(inner_unchecked(u, v))
}

pub(crate) fn inner_unchecked(u: &LocalVector, v: &LocalVector) -> CycNum {
    let mut acc = CycNum::zero(1);
    for (a, b) in u.amps.iter().zip(&v.amps) {
        if a.is_zero() || b.is_zero() {
            continue;
        }
        acc = &acc + &(&a.conj() * b);
    }
    acc
}

/// Identity of a state within a set.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum StateLabel {
    /// A member of a block's Fourier family, addressed by one Fourier index
    /// per party (0 at point factors).
    Block { key: BlockKey, fourier: Vec<u32> },
    /// The all-ones stopper.
    Stopper,
    /// A state not derived from a decomposition (external fixtures,
    /// witnesses).
    External { id: u32 },
}

impl StateLabel {
    pub fn block_key(&self) -> Option<&BlockKey> {
        match self {
            StateLabel::Block { key, .. } => Some(key),
            _ => None,
        }
    }

    pub fn fourier(&self) -> Option<&[u32]> {
        match self {
            StateLabel::Block { fourier, .. } => Some(fourier),
            _ => None,
        }
    }

    pub fn is_stopper(&self) -> bool {
        matches!(self, StateLabel::Stopper)
    }
}

// The wire form keeps the four schema keys; the stopper is the all-null
// label and external states carry only a fourier index list.
#[derive(Serialize, Deserialize)]
struct LabelWire {
    family: Option<Family>,
    fourier: Option<Vec<u32>>,
    kset: Option<Vec<u8>>,
    layer: Option<u32>,
}

impl Serialize for StateLabel {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let wire = match self {
            StateLabel::Block { key, fourier } => LabelWire {
                family: key.family,
                fourier: Some(fourier.clone()),
                kset: Some(key.kset.clone()),
                layer: Some(key.layer),
            },
            StateLabel::Stopper => LabelWire {
                family: None,
                fourier: None,
                kset: None,
                layer: None,
            },
            StateLabel::External { id } => LabelWire {
                family: None,
                fourier: Some(vec![*id]),
                kset: None,
                layer: None,
            },
        };
        wire.serialize(ser)
    }
}

impl<'de> Deserialize<'de> for StateLabel {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let wire = LabelWire::deserialize(de)?;
        match (wire.layer, wire.kset, wire.fourier) {
            (Some(layer), Some(kset), Some(fourier)) => Ok(StateLabel::Block {
                key: BlockKey {
                    layer,
                    kset,
                    family: wire.family,
                },
                fourier,
            }),
            (None, None, None) => Ok(StateLabel::Stopper),
            (None, None, Some(f)) if f.len() == 1 => Ok(StateLabel::External { id: f[0] }),
            _ => Err(serde::de::Error::custom("inconsistent state label")),
        }
    }
}

/// One product state: a local vector per party plus its label.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProductState {
    pub label: StateLabel,
    pub factors: Vec<LocalVector>,
}

impl ProductState {
    pub fn new(label: StateLabel, factors: Vec<LocalVector>) -> Self {
        debug_assert!(factors.iter().enumerate().all(|(i, f)| f.party == i + 1));
        ProductState { label, factors }
    }

    pub fn n_parties(&self) -> usize {
        self.factors.len()
    }

    pub fn factor(&self, party: usize) -> &LocalVector {
        &self.factors[party - 1]
    }
}

/// Full inner product of two product states, conjugate-linear in the first
/// argument. Parties are visited in ascending support overlap so an exact
/// zero factor is found as early as possible.
pub fn product_inner(a: &ProductState, b: &ProductState) -> Result<CycNum> {
    if a.n_parties() != b.n_parties() {
        return Err(Error::invalid("party count mismatch".to_string()));
    }
    let n = a.n_parties();
    let mut overlaps: Vec<(usize, usize)> = Vec::with_capacity(n);
    for j in 0..n {
        let (sa, sb) = (a.factors[j].support(), b.factors[j].support());
        let ov = match (sa, sb) {
            (Some((la, ha)), Some((lb, hb))) => {
                let lo = la.max(lb);
                let hi = ha.min(hb);
                if lo > hi {
                    return Ok(CycNum::zero(1));
                }
                hi - lo + 1
            }
            _ => return Ok(CycNum::zero(1)),
        };
        overlaps.push((ov, j));
    }
    overlaps.sort_unstable();
    let mut acc = CycNum::one();
    for &(_, j) in &overlaps {
        let f = cyc_inner(&a.factors[j], &b.factors[j])?;
        if f.is_zero() {
            return Ok(CycNum::zero(1));
        }
        acc = &acc * &f;
    }
    Ok(acc)
}

/// What a state set claims to be.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Opb,
    Ops,
    Upb,
    Custom,
}

/// A finite list of labeled product states over fixed local dimensions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateSet {
    dims: Vec<u32>,
    role: Role,
    states: Vec<ProductState>,
}

impl StateSet {
    /// Shape-validates and stores the states, rewriting every amplitude at
    /// one common cyclotomic order so encodings are byte-stable.
    pub fn from_parts(dims: Vec<u32>, role: Role, states: Vec<ProductState>) -> Result<Self> {
        if dims.is_empty() || dims.contains(&0) {
            return Err(Error::malformed("dims must be positive".to_string()));
        }
        let mut order = 1u64;
        for s in &states {
            if s.factors.len() != dims.len() {
                return Err(Error::malformed("state has wrong party count"));
            }
            for (j, f) in s.factors.iter().enumerate() {
                if f.party != j + 1 {
                    return Err(Error::malformed("state factors out of party order"));
                }
                if f.amps.len() != dims[j] as usize {
                    return Err(Error::malformed("local vector has wrong dimension"));
                }
                if f.is_zero() {
                    return Err(Error::malformed("local vector is zero"));
                }
                for a in &f.amps {
                    validate_amp(a)?;
                    order = lcm(order, a.order() as u64);
                }
            }
        }
        let order = order as u32;
        let mut states = states;
        for s in &mut states {
            for f in &mut s.factors {
                for a in &mut f.amps {
                    *a = a.promote(order);
                }
            }
        }
        Ok(StateSet { dims, role, states })
    }

    pub fn dims(&self) -> &[u32] {
        &self.dims
    }

    pub fn role(&self) -> Role {
        self.role
    }

    pub fn states(&self) -> &[ProductState] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn with_role(mut self, role: Role) -> Self {
        self.role = role;
        self
    }

    /// A copy without the states selected by the predicate.
    pub fn without<F: Fn(&ProductState) -> bool>(&self, drop: F) -> StateSet {
        StateSet {
            dims: self.dims.clone(),
            role: Role::Custom,
            states: self.states.iter().filter(|s| !drop(s)).cloned().collect(),
        }
    }
}

/// The Fourier basis of the interval `[lo, hi]` of one party: vector `n`
/// has amplitude `w^((i - lo) * n)` at position `i`, with `w` the primitive
/// root of order `hi - lo + 1`. Vector 0 is the all-ones vector on the
/// support.
pub fn fourier_basis(party: usize, dim: u32, lo: u32, hi: u32) -> Result<Vec<LocalVector>> {
    if lo > hi || hi >= dim {
        return Err(Error::invalid(format!(
            "bad interval [{lo}, {hi}] in dimension {dim}"
        )));
    }
    let m = hi - lo + 1;
    Ok((0..m)
        .map(|n| {
            let mut amps = vec![CycNum::zero(1); dim as usize];
            for i in lo..=hi {
                amps[i as usize] = CycNum::root(m, ((i - lo) as i64) * (n as i64));
            }
            LocalVector { party, amps }
        })
        .collect())
}

fn block_local_families(sc: &Subcube, dims: &PartyDims) -> Vec<Vec<LocalVector>> {
    sc.factors
        .iter()
        .map(|f| {
            if f.tag.is_range() {
                fourier_basis(f.party, dims.dim(f.party), f.lo, f.hi).expect("valid interval")
            } else {
                vec![LocalVector::basis(f.party, dims.dim(f.party), f.lo)]
            }
        })
        .collect()
}

/// All product states of one block: the Cartesian product of each party's
/// local family, in row-major order over the Fourier indices (last party
/// fastest). The first state is the block's plus state.
pub fn states_from_subcube(sc: &Subcube, dims: &PartyDims) -> Vec<ProductState> {
    let families = block_local_families(sc, dims);
    let sizes: Vec<usize> = families.iter().map(Vec::len).collect();
    let total: usize = sizes.iter().product();
    let key = sc.key();
    (0..total)
        .map(|mut idx| {
            let mut fourier = vec![0u32; families.len()];
            for j in (0..families.len()).rev() {
                fourier[j] = (idx % sizes[j]) as u32;
                idx /= sizes[j];
            }
            let factors = families
                .iter()
                .zip(&fourier)
                .map(|(fam, &n)| fam[n as usize].clone())
                .collect();
            ProductState::new(
                StateLabel::Block {
                    key: key.clone(),
                    fourier,
                },
                factors,
            )
        })
        .collect()
}

/// The Fourier product family of the central block.
pub fn central_block_states(dims: &PartyDims) -> Vec<ProductState> {
    let dec_central = Subcube {
        layer: 0,
        kset: Vec::new(),
        family: None,
        factors: (1..=dims.n_parties())
            .map(|party| {
                let (lo, hi) = dims.central_interval(party);
                crate::hypercube::Factor {
                    party,
                    tag: crate::hypercube::FactorTag::CenterRange,
                    lo,
                    hi,
                }
            })
            .collect(),
    };
    states_from_subcube(&dec_central, dims)
}

/// The all-ones-on-support member of a block's family.
pub fn plus_state(sc: &Subcube, dims: &PartyDims) -> ProductState {
    let families = block_local_families(sc, dims);
    let fourier = vec![0u32; families.len()];
    let factors = families
        .into_iter()
        .map(|fam| fam.into_iter().next().unwrap())
        .collect();
    ProductState::new(
        StateLabel::Block {
            key: sc.key(),
            fourier,
        },
        factors,
    )
}

/// The stopper: all-ones amplitudes on every party.
pub fn stopper(dims: &PartyDims) -> ProductState {
    let factors = (1..=dims.n_parties())
        .map(|party| LocalVector {
            party,
            amps: vec![CycNum::one(); dims.dim(party) as usize],
        })
        .collect();
    ProductState::new(StateLabel::Stopper, factors)
}

fn layer_states(dec: &Decomposition, layer: Option<u32>) -> Vec<ProductState> {
    dec.blocks()
        .iter()
        .filter(|b| !b.is_central() && layer.is_none_or(|k| b.layer == k))
        .flat_map(|b| states_from_subcube(b, dec.dims()))
        .collect()
}

/// The orthogonal product basis: central states plus every layer state.
/// Cardinality is the full grid size.
pub fn build_opb(dims: &PartyDims) -> StateSet {
    let dec = build_decomposition(dims);
    let mut states = central_block_states(dims);
    states.extend(layer_states(&dec, None));
    StateSet::from_parts(dims.dims().to_vec(), Role::Opb, states).expect("constructed states")
}

/// The strongly nonlocal orthogonal product set: the outermost layer only.
/// Cardinality is `prod d_i - prod (d_i - 2)`.
pub fn build_ops(dims: &PartyDims) -> StateSet {
    let dec = build_decomposition(dims);
    StateSet::from_parts(dims.dims().to_vec(), Role::Ops, layer_states(&dec, Some(1)))
        .expect("constructed states")
}

/// The unextendible product basis: the stopper, then every block's family
/// with its plus state removed. Cardinality is
/// `prod d_i - 2^N * floor((d_1 - 1) / 2)`.
pub fn build_upb(dims: &PartyDims) -> StateSet {
    let dec = build_decomposition(dims);
    let mut states = vec![stopper(dims)];
    for block in dec.blocks() {
        let family = states_from_subcube(block, dims);
        states.extend(family.into_iter().skip(1));
    }
    StateSet::from_parts(dims.dims().to_vec(), Role::Upb, states).expect("constructed states")
}

/// The four-state shifts set in three qubits, the classic small fixture for
/// the unextendibility checker.
pub fn shifts_upb() -> StateSet {
    let plus = |party| LocalVector::new(party, vec![CycNum::one(), CycNum::one()]);
    let minus = |party| LocalVector::new(party, vec![CycNum::one(), CycNum::integer(-1)]);
    let basis = |party, i| LocalVector::basis(party, 2, i);
    let states = vec![
        ProductState::new(
            StateLabel::External { id: 0 },
            vec![basis(1, 0), basis(2, 1), plus(3)],
        ),
        ProductState::new(
            StateLabel::External { id: 1 },
            vec![basis(1, 1), plus(2), basis(3, 0)],
        ),
        ProductState::new(
            StateLabel::External { id: 2 },
            vec![plus(1), basis(2, 0), basis(3, 1)],
        ),
        ProductState::new(
            StateLabel::External { id: 3 },
            vec![minus(1), minus(2), minus(3)],
        ),
    ];
    StateSet::from_parts(vec![2, 2, 2], Role::Custom, states).expect("fixture is well formed")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypercube::build_subcube;

    fn dims(v: &[u32]) -> PartyDims {
        PartyDims::new(v.to_vec()).unwrap()
    }

    fn amp(v: i64) -> CycNum {
        CycNum::integer(v)
    }

    #[test]
    fn inner_product_examples() {
        let u = LocalVector::new(1, vec![amp(1), amp(1), amp(0)]);
        let v = LocalVector::new(1, vec![amp(1), amp(-1), amp(0)]);
        assert!(cyc_inner(&u, &v).unwrap().is_zero());

        let w = LocalVector::new(1, vec![amp(1), amp(1), amp(1)]);
        assert_eq!(cyc_inner(&u, &w).unwrap(), amp(2));

        let a = LocalVector::new(1, (0..3).map(|m| CycNum::root(3, m)).collect());
        let b = LocalVector::new(1, (0..3).map(|m| CycNum::root(3, 2 * m)).collect());
        assert!(cyc_inner(&a, &b).unwrap().is_zero());

        let short = LocalVector::new(1, vec![amp(1)]);
        assert!(cyc_inner(&u, &short).is_err());
        let other_party = LocalVector::new(2, vec![amp(1), amp(0), amp(0)]);
        assert!(cyc_inner(&u, &other_party).is_err());
    }

    #[test]
    fn fourier_basis_examples() {
        let f = fourier_basis(1, 3, 0, 1).unwrap();
        assert_eq!(f.len(), 2);
        assert_eq!(f[0].amps, vec![amp(1), amp(1), amp(0)]);
        assert_eq!(f[1].amps, vec![amp(1), amp(-1), amp(0)]);

        let f = fourier_basis(1, 3, 1, 2).unwrap();
        assert_eq!(f[0].amps, vec![amp(0), amp(1), amp(1)]);
        assert_eq!(f[1].amps, vec![amp(0), amp(1), amp(-1)]);

        let f = fourier_basis(1, 5, 1, 3).unwrap();
        assert_eq!(f.len(), 3);
        for i in 0..3 {
            for j in 0..3 {
                let g = cyc_inner(&f[i], &f[j]).unwrap();
                if i == j {
                    assert_eq!(g, amp(3));
                } else {
                    assert!(g.is_zero());
                }
            }
        }

        assert!(fourier_basis(1, 3, 2, 3).is_err());
        assert!(fourier_basis(1, 3, 2, 1).is_err());
    }

    #[test]
    fn subcube_state_families() {
        let d3 = dims(&[3, 3, 3]);
        let sc = build_subcube(&d3, 1, &[1, 2], Family::C).unwrap();
        let states = states_from_subcube(&sc, &d3);
        assert_eq!(states.len(), 4);
        for a in &states {
            for b in &states {
                let g = product_inner(a, b).unwrap();
                assert_eq!(g.is_zero(), a.label != b.label);
            }
        }

        let point = build_subcube(&d3, 1, &[], Family::D).unwrap();
        let states = states_from_subcube(&point, &d3);
        assert_eq!(states.len(), 1);
        assert_eq!(states[0].factor(1).amps, vec![amp(0), amp(0), amp(1)]);

        let d555 = dims(&[5, 5, 5]);
        let sc = build_subcube(&d555, 2, &[1, 2], Family::C).unwrap();
        assert_eq!(states_from_subcube(&sc, &d555).len(), 4);
        let sc1 = build_subcube(&d555, 1, &[1, 2], Family::C).unwrap();
        assert_eq!(states_from_subcube(&sc1, &d555).len(), 16);
    }

    #[test]
    fn central_states() {
        let one = central_block_states(&dims(&[3, 3, 3]));
        assert_eq!(one.len(), 1);
        assert_eq!(one[0].factor(2).amps, vec![amp(0), amp(1), amp(0)]);

        let six = central_block_states(&dims(&[3, 4, 5]));
        assert_eq!(six.len(), 6);
        for a in &six {
            for b in &six {
                assert_eq!(product_inner(a, b).unwrap().is_zero(), a.label != b.label);
            }
        }

        let point = central_block_states(&dims(&[5, 5, 5]));
        assert_eq!(point.len(), 1);
        assert_eq!(
            point[0].factor(1).amps,
            vec![amp(0), amp(0), amp(1), amp(0), amp(0)]
        );
    }

    #[test]
    fn set_sizes() {
        assert_eq!(build_opb(&dims(&[3, 3, 3])).len(), 27);
        assert_eq!(build_ops(&dims(&[3, 3, 3])).len(), 26);
        assert_eq!(build_ops(&dims(&[3; 5])).len(), 242);
        assert_eq!(build_ops(&dims(&[3, 4, 5])).len(), 54);
        assert_eq!(build_upb(&dims(&[3, 3, 3])).len(), 19);
        assert_eq!(build_upb(&dims(&[3, 4, 5])).len(), 52);
    }

    #[test]
    fn plus_and_stopper() {
        let d3 = dims(&[3, 3, 3]);
        let sc = build_subcube(&d3, 1, &[1, 2], Family::C).unwrap();
        let p = plus_state(&sc, &d3);
        assert_eq!(p.factor(1).amps, vec![amp(1), amp(1), amp(0)]);
        assert_eq!(p.factor(2).amps, vec![amp(0), amp(1), amp(1)]);
        assert_eq!(p.factor(3).amps, vec![amp(0), amp(0), amp(1)]);

        let c0 = build_subcube(&d3, 1, &[], Family::C).unwrap();
        let p = plus_state(&c0, &d3);
        assert_eq!(p.factor(1).amps, vec![amp(1), amp(0), amp(0)]);

        let d345 = dims(&[3, 4, 5]);
        let dec = build_decomposition(&d345);
        let central = dec.central().unwrap();
        let p = plus_state(central, &d345);
        assert_eq!(p.factor(1).amps, vec![amp(0), amp(1), amp(0)]);
        assert_eq!(p.factor(2).amps, vec![amp(0), amp(1), amp(1), amp(0)]);
        assert_eq!(
            p.factor(3).amps,
            vec![amp(0), amp(1), amp(1), amp(1), amp(0)]
        );

        let s = stopper(&d3);
        assert!(s
            .factors
            .iter()
            .all(|f| f.amps.iter().all(|a| a == &amp(1))));
        assert!(!product_inner(&stopper(&d345), &p).unwrap().is_zero());
    }

    #[test]
    fn stopper_hits_plus_states_only() {
        let d3 = dims(&[3, 3, 3]);
        let dec = build_decomposition(&d3);
        let s = stopper(&d3);
        for block in dec.blocks() {
            for (i, state) in states_from_subcube(block, &d3).iter().enumerate() {
                let g = product_inner(&s, state).unwrap();
                assert_eq!(g.is_zero(), i != 0, "block {}", block.short_label());
            }
        }
    }

    #[test]
    fn upb_drops_one_state_per_block() {
        let d3 = dims(&[3, 3, 3]);
        let upb = build_upb(&d3);
        assert!(upb.states()[0].label.is_stopper());
        assert!(upb
            .states()
            .iter()
            .all(|s| s.label.is_stopper() || s.label.fourier().unwrap().iter().any(|&n| n != 0)));
    }

    #[test]
    fn shifts_fixture_shape() {
        let s = shifts_upb();
        assert_eq!(s.dims(), &[2, 2, 2]);
        assert_eq!(s.len(), 4);
        for a in s.states() {
            for b in s.states() {
                assert_eq!(product_inner(a, b).unwrap().is_zero(), a.label != b.label);
            }
        }
    }

    #[test]
    fn proportionality() {
        let u = LocalVector::new(1, vec![amp(1), amp(-1), amp(0)]);
        let v = LocalVector::new(1, vec![amp(2), amp(-2), amp(0)]);
        let w = LocalVector::new(1, vec![amp(1), amp(1), amp(0)]);
        assert!(u.proportional(&v));
        assert!(!u.proportional(&w));
        let scaled = LocalVector::new(
            1,
            vec![CycNum::root(4, 1), &CycNum::root(4, 1) * &amp(-1), amp(0)],
        );
        assert!(u.proportional(&scaled));
    }

    #[test]
    fn label_wire_roundtrip() {
        let labels = vec![
            StateLabel::Block {
                key: BlockKey {
                    layer: 1,
                    kset: vec![1, 2],
                    family: Some(Family::C),
                },
                fourier: vec![0, 1, 0],
            },
            StateLabel::Stopper,
            StateLabel::External { id: 7 },
        ];
        for l in labels {
            let text = serde_json::to_string(&l).unwrap();
            let back: StateLabel = serde_json::from_str(&text).unwrap();
            assert_eq!(back, l);
        }
    }
}
