//! Sub-seed derivation.
//!
//! Every randomized stage of a run draws its seed as
//! `sub_seed(master, stage_tag, counter)`, where the stage tag is a stable
//! string (for learners it embeds the family name, e.g. `"tune:knn"`).
//! Streams are keyed by tag rather than by evaluation order, so adding or
//! removing a stage never perturbs another stage's draws.

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 step: advances the state and returns the mixed output.
fn splitmix(state: u64) -> u64 {
    let mut z = state.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn sub_seed(master: u64, stage: &str, counter: u64) -> u64 {
    let mut h = splitmix(master);
    for &b in stage.as_bytes() {
        h = splitmix(h ^ u64::from(b));
    }
    splitmix(h ^ counter)
}
