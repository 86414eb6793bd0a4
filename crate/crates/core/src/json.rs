//! Canonical JSON encodings of decompositions, state sets, certificates,
//! and verdicts.
//!
//! Canonical form: object keys sorted, compact separators, integers only.
//! Amplitude coefficients above `2^53 - 1` in magnitude are emitted as
//! decimal strings. Fixed inputs produce byte-identical output.

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypercube::{Decomposition, PartyDims, Subcube};
use crate::states::{ProductState, Role, StateSet};

pub const FORMAT_VERSION: u32 = 1;

/// Serializes any value to canonical JSON text (sorted keys, compact).
pub fn to_canonical_json<T: Serialize>(value: &T) -> String {
    let v = serde_json::to_value(value).expect("serializable value");
    serde_json::to_string(&v).expect("value serializes")
}

#[derive(Serialize, Deserialize)]
struct DecompositionWire {
    blocks: Vec<Subcube>,
    dims: Vec<u32>,
    role: String,
    version: u32,
}

#[derive(Serialize, Deserialize)]
struct StateSetWire {
    dims: Vec<u32>,
    role: Role,
    states: Vec<ProductState>,
    version: u32,
}

/// Either kind of constructed artifact, distinguished by its `role` field.
pub enum Artifact {
    Decomposition(Decomposition),
    States(StateSet),
}

pub fn decomposition_to_json(dec: &Decomposition) -> String {
    let wire = DecompositionWire {
        blocks: dec.blocks().to_vec(),
        dims: dec.dims().dims().to_vec(),
        role: "decomposition".to_string(),
        version: FORMAT_VERSION,
    };
    to_canonical_json(&wire)
}

pub fn stateset_to_json(set: &StateSet) -> String {
    let wire = StateSetWire {
        dims: set.dims().to_vec(),
        role: set.role(),
        states: set.states().to_vec(),
        version: FORMAT_VERSION,
    };
    to_canonical_json(&wire)
}

fn parse<T: DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::malformed(e.to_string()))
}

pub fn decomposition_from_json(text: &str) -> Result<Decomposition> {
    let wire: DecompositionWire = parse(text)?;
    if wire.version != FORMAT_VERSION {
        return Err(Error::malformed(format!(
            "unsupported version {}",
            wire.version
        )));
    }
    if wire.role != "decomposition" {
        return Err(Error::malformed("role is not a decomposition"));
    }
    let dims = PartyDims::new(wire.dims).map_err(|e| Error::malformed(e.to_string()))?;
    Decomposition::from_blocks(dims, wire.blocks)
}

pub fn stateset_from_json(text: &str) -> Result<StateSet> {
    let wire: StateSetWire = parse(text)?;
    if wire.version != FORMAT_VERSION {
        return Err(Error::malformed(format!(
            "unsupported version {}",
            wire.version
        )));
    }
    StateSet::from_parts(wire.dims, wire.role, wire.states)
}

/// Loads either artifact kind, keyed on the `role` field.
pub fn artifact_from_json(text: &str) -> Result<Artifact> {
    #[derive(Deserialize)]
    struct Probe {
        role: serde_json::Value,
    }
    let probe: Probe = parse(text)?;
    match probe.role.as_str() {
        Some("decomposition") => Ok(Artifact::Decomposition(decomposition_from_json(text)?)),
        Some(_) => Ok(Artifact::States(stateset_from_json(text)?)),
        None => Err(Error::malformed("missing role field")),
    }
}

pub fn read_artifact(path: &Path) -> Result<Artifact> {
    let text = fs::read_to_string(path)?;
    artifact_from_json(&text)
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, format!("{text}\n"))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypercube::build_decomposition;
    use crate::states::{build_opb, build_upb};

    fn dims(v: &[u32]) -> PartyDims {
        PartyDims::new(v.to_vec()).unwrap()
    }

    #[test]
    fn keys_are_sorted() {
        let dec = build_decomposition(&dims(&[3, 3, 3]));
        let text = decomposition_to_json(&dec);
        let blocks_at = text.find("\"blocks\"").unwrap();
        let dims_at = text.find("\"dims\"").unwrap();
        let version_at = text.find("\"version\"").unwrap();
        assert!(blocks_at < dims_at && dims_at < version_at);
    }

    #[test]
    fn decomposition_roundtrip_is_identical() {
        let dec = build_decomposition(&dims(&[3, 4, 5]));
        let text = decomposition_to_json(&dec);
        let back = decomposition_from_json(&text).unwrap();
        assert_eq!(back, dec);
        assert_eq!(decomposition_to_json(&back), text);
    }

    #[test]
    fn stateset_roundtrip_is_identical() {
        for set in [build_opb(&dims(&[3, 3, 3])), build_upb(&dims(&[3, 4, 5]))] {
            let text = stateset_to_json(&set);
            let back = stateset_from_json(&text).unwrap();
            assert_eq!(back, set);
            assert_eq!(stateset_to_json(&back), text);
        }
    }

    #[test]
    fn malformed_inputs_are_rejected() {
        assert!(matches!(artifact_from_json("{"), Err(Error::Malformed(_))));
        assert!(matches!(
            artifact_from_json("{\"x\":1}"),
            Err(Error::Malformed(_))
        ));

        let dec = build_decomposition(&dims(&[3, 3, 3]));
        let bad_dims = decomposition_to_json(&dec).replace("[3,3,3]", "[3,3]");
        assert!(matches!(
            decomposition_from_json(&bad_dims),
            Err(Error::Malformed(_))
        ));

        let set = build_opb(&dims(&[3, 3, 3]));
        let text = stateset_to_json(&set);
        let bad_role = text.replace("\"role\":\"opb\"", "\"role\":\"nonsense\"");
        assert!(stateset_from_json(&bad_role).is_err());
    }

    #[test]
    fn artifact_dispatch() {
        let dec = build_decomposition(&dims(&[3, 3, 3]));
        match artifact_from_json(&decomposition_to_json(&dec)).unwrap() {
            Artifact::Decomposition(d) => assert_eq!(d.blocks().len(), 9),
            _ => panic!("expected a decomposition"),
        }
        let set = build_opb(&dims(&[3, 3, 3]));
        match artifact_from_json(&stateset_to_json(&set)).unwrap() {
            Artifact::States(s) => assert_eq!(s.len(), 27),
            _ => panic!("expected a state set"),
        }
    }
}
