//! Built-in example diagrams.
//!
//! These are the worked examples used throughout the tests and
//! reachable from the command line as `corpus:<name>`.

/// The (2,5) diagram with eight internal nodes whose dimer algebra is
/// the running example of the whole crate.
pub const GR25: &str = include_str!("../corpus/gr25.plabic");

/// A (2,4) diagram with a single internal edge; all four faces are
/// boundary faces.
pub const GR24FROZEN: &str = include_str!("../corpus/gr24frozen.plabic");

/// The (1,3) triangle: one black node, three legs.
pub const TRIV13: &str = include_str!("../corpus/triv13.plabic");

/// Interior twist of the triangle (adds an unfrozen 2-cycle).
pub const TRIV13TWI: &str = include_str!("../corpus/triv13twi.plabic");

/// Boundary twist of the triangle (adds a frozen/unfrozen 2-cycle).
pub const TRIV13TWB: &str = include_str!("../corpus/triv13twb.plabic");

/// All entries as `(name, text)` pairs.
pub const ALL: &[(&str, &str)] = &[
    ("gr25", GR25),
    ("gr24frozen", GR24FROZEN),
    ("triv13", TRIV13),
    ("triv13twi", TRIV13TWI),
    ("triv13twb", TRIV13TWB),
];

/// Look up a corpus entry by name.
pub fn lookup(name: &str) -> Option<&'static str> {
    ALL.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}
