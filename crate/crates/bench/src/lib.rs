//! Workloads shared by the benchmarks.

use forestjudge::{AnalysisSet, Incidence, Property, Span};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A random incidence of constituent properties over `analyses` analyses.
/// Each property holds for a random subset of roughly `density` of them.
pub fn synthetic_incidence(analyses: usize, properties: usize, density: f64, seed: u64) -> Incidence {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let entries = (0..properties)
        .map(|i| {
            let span = Span::new(i, i + 1).expect("non-empty span");
            let p = Property::constituent("NP", span, format!("w{i}")).expect("valid constituent");
            let ids = (0..analyses).filter(|_| rng.gen_bool(density));
            (p, AnalysisSet::from_ids(analyses, ids).expect("ids in range"))
        })
        .collect();
    Incidence::new(analyses, entries).expect("distinct keys")
}

/// Keys of the first `n` properties, for building assertion sets.
pub fn keys(incidence: &Incidence, n: usize) -> Vec<String> {
    incidence.properties().iter().take(n).map(|p| p.key.clone()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn synthetic_incidence_is_reproducible() {
        assert_eq!(synthetic_incidence(32, 10, 0.5, 7), synthetic_incidence(32, 10, 0.5, 7));
        assert_eq!(keys(&synthetic_incidence(8, 5, 0.5, 1), 3).len(), 3);
    }
}
