use super::{select_variables, RunTrace, TabuError, TabuOutcome, TabuParams, TabuState};
use crate::bitstring::BitString;
use crate::qubo::Qubo;
use crate::samplers::{NeighborhoodSampler, SamplerContext};
use crate::seeded_rng;

/// Tabu search whose neighborhood is explored by a sampler.
///
/// Each iteration forms the one-flip candidate as in
/// [`basic_tabu_search`](super::basic_tabu_search), selects `k` non-tabu
/// variables, clamps the rest from the current solution and asks `sampler`
/// for an assignment of the selected ones. The sampler's candidate replaces
/// the current solution only when it is strictly better than the one-flip
/// candidate; otherwise the one-flip move is taken. Only variables that
/// actually flipped are made tabu.
///
/// When fewer than `k` variables are non-tabu, the subproblem shrinks to the
/// non-tabu ones. The sampler draws from its own RNG stream, so a sampler
/// that never wins reproduces the one-flip search exactly under greedy
/// selection.
pub fn sampler_tabu_search<S>(
    q: &Qubo,
    x0: &BitString,
    params: &TabuParams,
    sampler: &mut S,
) -> Result<TabuOutcome, TabuError>
where
    S: NeighborhoodSampler + ?Sized,
{
    params.validate(q.n())?;
    let k = params
        .k
        .ok_or_else(|| TabuError::Params("subproblem size k is required".into()))?;
    let mut rng = seeded_rng(params.seed, 0);
    let mut sampler_rng = seeded_rng(params.seed, 1);
    let mut state = TabuState::new(q, x0)?;
    let mut records = vec![state.record(Vec::new(), false, None)];

    let termination = loop {
        if let Some(reason) = state.termination(params) {
            break reason;
        }
        state.iteration += 1;
        let iteration = state.iteration;

        let j = state.one_flip_move()?;
        let f_one_flip = state.f_ts + state.moves.get(j);

        let k_eff = k.min(state.non_tabu_count());
        let mut proposal = None;
        if k_eff > 0 {
            let selected = select_variables(
                state.moves.values(),
                &state.tabu,
                k_eff,
                params.selection,
                &mut rng,
            )?;
            let sub = q.clamp(&state.x_ts, &selected)?;
            let ctx = SamplerContext::new(&sub, &state.moves);
            let y = sampler
                .sample_best(&sub, &ctx, &mut sampler_rng)
                .map_err(|source| TabuError::Sampler { iteration, source })?;
            if y.len() != sub.k() {
                return Err(TabuError::SamplerLength {
                    iteration,
                    k: sub.k(),
                    found: y.len(),
                });
            }
            let f_sampled = sub.reduced().evaluate(&y)?;
            let flips: Vec<usize> = ctx
                .reference
                .diff_indices(&y)
                .into_iter()
                .map(|l| sub.parent_indices()[l])
                .collect();
            proposal = Some((flips, f_sampled));
        }

        let (flips, accepted, candidate) = match proposal {
            Some((flips, f)) if f < f_one_flip => (flips, true, Some(f)),
            Some((_, f)) => (vec![j], false, Some(f)),
            None => (vec![j], false, None),
        };
        state.apply(q, &flips)?;
        state.commit(q, &flips, params, &mut rng);
        records.push(state.record(flips, accepted, candidate));
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
