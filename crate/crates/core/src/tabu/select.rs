use rand::seq::SliceRandom;
use rand::Rng;

use super::{SelectionMode, TabuError};

/// Chooses `k` non-tabu variables, returned in ascending order.
///
/// Greedy mode takes the smallest move values (lowest index on ties).
/// Weighted-random mode ranks the non-tabu variables by move value, gives
/// the best of `m` candidates weight `m` down to weight 1 for the worst, and
/// draws `k` of them without replacement.
pub fn select_variables<R: Rng + ?Sized>(
    deltas: &[f64],
    tabu: &[usize],
    k: usize,
    mode: SelectionMode,
    rng: &mut R,
) -> Result<Vec<usize>, TabuError> {
    assert_eq!(
        deltas.len(),
        tabu.len(),
        "move values and tabu counters differ in length"
    );
    let mut candidates: Vec<usize> = (0..deltas.len()).filter(|&i| tabu[i] == 0).collect();
    if k == 0 || candidates.len() < k {
        return Err(TabuError::TooFewCandidates {
            available: candidates.len(),
            k,
        });
    }
    candidates.sort_by(|&a, &b| deltas[a].total_cmp(&deltas[b]).then(a.cmp(&b)));

    let mut chosen: Vec<usize> = match mode {
        SelectionMode::Greedy => candidates[..k].to_vec(),
        SelectionMode::WeightedRandom => {
            let m = candidates.len();
            let ranked: Vec<(usize, usize)> = candidates
                .iter()
                .enumerate()
                .map(|(rank, &i)| (i, m - rank))
                .collect();
            ranked
                .choose_multiple_weighted(rng, k, |&(_, w)| w as f64)
                .expect("rank weights are positive and finite")
                .map(|&(i, _)| i)
                .collect()
        }
    };
    chosen.sort_unstable();
    Ok(chosen)
}
