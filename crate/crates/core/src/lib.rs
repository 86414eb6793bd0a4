//! Constructions and exact certifiers for multiparty product-state sets
//! built from subcube decompositions of index grids.
//!
//! The crate builds, for an odd number of parties with local dimensions at
//! least 3:
//!
//! - the layered subcube decomposition of the grid `Z_{d1} x ... x Z_{dN}`
//!   ([`hypercube`]);
//! - orthogonal product bases, strongly nonlocal orthogonal product sets,
//!   and unextendible product bases attached to the decomposition
//!   ([`states`]), with amplitudes in exact cyclotomic arithmetic
//!   ([`cyclotomic`]);
//! - certifiers: pairwise orthogonality and exact rank ([`verify`]), a
//!   strong-nonlocality deduction engine over all one-vs-rest cuts
//!   ([`nonlocality`]), and an unextendibility decision procedure
//!   ([`upb`]).
//!
//! All decisions are made over the ring of cyclotomic integers; floating
//! point appears only in an optional cross-check backend. Canonical JSON
//! encodings live in [`json`].
//!
//! ```
//! use nonlocal_cubes::{build_ops, build_upb, certify_strong_nonlocality,
//!     certify_unextendible, PartyDims, UpbStatus};
//!
//! let dims = PartyDims::new(vec![3, 3, 3])?;
//!
//! let ops = build_ops(&dims);
//! assert_eq!(ops.len(), 26);
//! assert!(certify_strong_nonlocality(&ops)?.certified());
//!
//! let upb = build_upb(&dims);
//! assert_eq!(upb.len(), 19);
//! assert_eq!(certify_unextendible(&upb)?.status, UpbStatus::Upb);
//! # Ok::<(), nonlocal_cubes::Error>(())
//! ```

pub mod cyclotomic;
pub mod error;
pub mod hypercube;
pub mod json;
pub mod nonlocality;
pub mod oracle;
pub mod states;
pub mod upb;
mod util;
pub mod verify;

pub use cyclotomic::CycNum;
pub use error::{Error, Result};
pub use hypercube::{
    build_decomposition, build_subcube, corner_census, counting_identity_holds, index_family,
    locate, locate_scan, locate_walk, verify_cyclic_invariance, verify_partition, BlockKey,
    Decomposition, Factor, FactorTag, Family, GridPoint, PartyDims, Subcube,
};
pub use nonlocality::{certify_strong_nonlocality, Certificate, CutStatus};
pub use states::{
    build_opb, build_ops, build_upb, central_block_states, cyc_inner, fourier_basis, plus_state,
    product_inner, states_from_subcube, stopper, LocalVector, ProductState, Role, StateLabel,
    StateSet,
};
pub use upb::{certify_unextendible, enumerate_kill_options, KillOption, UpbStatus, UpbVerdict};
pub use verify::{check_completeness, check_pairwise_orthogonal, exact_rank, OrthoReport};
