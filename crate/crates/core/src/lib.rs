//! Finite copresheaf instances over presented schemas: constructions, hom
//! search, canonical forms, connected decomposition, and the arithmetic of
//! isomorphism classes.

pub mod canon;
pub mod components;
pub mod construct;
pub mod error;
pub mod format;
pub mod hom;
pub mod instance;
pub mod marks;
pub mod morphism;
pub mod profile;
pub mod ring;
pub mod schema;
pub mod universe;

pub use canon::{canonical_form, canonical_labeling, canonical_relabeling, CanonicalForm};
pub use components::{component_count, connected_components, is_connected, Decomposition};
pub use error::{Error, Result, Violation};
pub use hom::{check_conn_bijection, count_homs, count_homs_direct, enumerate_homs, find_iso, sample_hom, HomSet};
pub use instance::{eval_path, validate_instance, Instance};
pub use marks::{table_of_marks, MarksTable};
pub use morphism::{validate_morphism, Morphism};
pub use profile::{build_basis, profile, profile_instance, ring_profile, Profile, TestBasis};
pub use ring::{class_of, to_ring, DecClass, RingElement};
pub use schema::{presets, validate_schema, Path, PathDef, Schema, SchemaDef};
pub use universe::{enumerate_instances, raw_candidates, Bounds, Member};
