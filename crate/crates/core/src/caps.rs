use serde::Serialize;

/// Size limits for the exhaustive searches. Exceeding one is an error,
/// never a silent truncation.
#[derive(Debug, Clone, Serialize)]
pub struct Caps {
    /// Largest vertex count enumerated by `forbidden_family`.
    pub family_vertices: usize,
    /// Largest vertex count accepted by `canonical_form`.
    pub canonical_vertices: usize,
    /// Largest `n` for `ex_bruteforce`.
    pub bruteforce_n: usize,
    /// Largest construction size for `check_rigidity`.
    pub rigidity_vertices: usize,
    /// Largest pattern-side graph for `hom_density`.
    pub hom_source_vertices: usize,
    /// Largest target graph for `hom_density`.
    pub hom_target_vertices: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            family_vertices: 6,
            canonical_vertices: 9,
            bruteforce_n: 6,
            rigidity_vertices: 8,
            hom_source_vertices: 7,
            hom_target_vertices: 12,
        }
    }
}
