use super::{RunTrace, TabuError, TabuOutcome, TabuParams, TabuState};
use crate::bitstring::BitString;
use crate::qubo::Qubo;
use crate::seeded_rng;

/// One-flip tabu search.
///
/// Every iteration flips the admissible variable with the smallest move
/// value, updates the best solution, decrements all positive tabu counters
/// and then makes the flipped variable tabu for `TT + Random(rTT)`
/// iterations, or clears its counter when the flip produced a new best.
pub fn basic_tabu_search(
    q: &Qubo,
    x0: &BitString,
    params: &TabuParams,
) -> Result<TabuOutcome, TabuError> {
    params.validate(q.n())?;
    let mut rng = seeded_rng(params.seed, 0);
    let mut state = TabuState::new(q, x0)?;
    let mut records = vec![state.record(Vec::new(), false, None)];

    let termination = loop {
        if let Some(reason) = state.termination(params) {
            break reason;
        }
        state.iteration += 1;
        let j = state.one_flip_move()?;
        state.apply(q, &[j])?;
        state.commit(q, &[j], params, &mut rng);
        records.push(state.record(vec![j], false, None));
    };

    Ok(TabuOutcome {
        best: state.x_best,
        best_value: state.f_best,
        trace: RunTrace {
            records,
            termination,
        },
    })
}
