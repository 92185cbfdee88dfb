//! Seeded problem generators, the QL1P file format, and suite manifests.
//!
//! All generators are pure functions of their parameters and seed. Draws are
//! taken in a fixed order: matrices row-major, vectors front to back, in the
//! order the quantities are listed in each generator's docs.

mod families;
mod io;
mod rng;
mod suite;

pub use families::{gen_elastic_net, gen_sigrec, gen_strict_comp, GeneratedInstance, InstanceMeta};
pub use io::{read_problem, read_problem_bytes, write_problem, write_problem_bytes};
pub use rng::Rng;
pub use suite::{desk_suite, read_manifest, write_manifest, write_suite, Family, ManifestEntry};
