//! Invariants of the encounter simulator, trace replay and metrics over
//! random parameters.

mod common;

use common::props::*;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn uniform_rounds_respect_invariants((cfg, _) in arb_round()) {
        uniform_round(&cfg)?;
    }

    #[test]
    fn rounds_are_seed_deterministic((cfg, _) in arb_round(), master in any::<u64>()) {
        seed_determinism(&cfg, master)?;
    }

    #[test]
    fn non_cooperative_population_is_inert(params in arb_params(), seed in any::<u64>()) {
        non_cooperative_inert(&params, seed)?;
    }

    #[test]
    fn trace_replays_respect_invariants(input in arb_replay()) {
        trace_replay(&input)?;
    }

    #[test]
    fn derive_encounters_matches_quadratic(records in arb_associations()) {
        overlap_matches_quadratic(&records)?;
    }
}
