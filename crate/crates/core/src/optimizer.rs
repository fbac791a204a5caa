//! Search for the best single-state cheating preparation, and the matching
//! discrimination bound for a cheating Bob.
//!
//! Alice needs to cheat only when Bob's bet would otherwise win, so a fixed
//! preparation `ψ` wins with
//! `½·max(|⟨A11|ψ⟩|², |⟨A12|ψ⟩|²) + ½·max(|⟨A21|ψ⟩|², |⟨A22|ψ⟩|²)`.
//! All four targets have real amplitudes, so flipping the phase of any
//! component of `ψ` to make it real and nonnegative can only raise each
//! `|⟨Aᵢⱼ|ψ⟩|` for the better member of each set. The search therefore runs
//! over the nonnegative octant of the real unit sphere.

use std::f64::consts::FRAC_PI_2;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::qutrit::{
    canonical_state, helstrom_win_probability, Coin, DensityOperator, QutritError, QutritState,
    StateLabel,
};

/// Win probability of a fixed preparation and the claim used in each branch.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheatObjective {
    pub win_prob: f64,
    /// Best tails-set state, announced when Bob bets heads.
    pub claim_against_heads: StateLabel,
    /// Best heads-set state, announced when Bob bets tails.
    pub claim_against_tails: StateLabel,
}

fn best_in_set(psi: &QutritState, coin: Coin) -> (StateLabel, f64) {
    let [a, b] = StateLabel::set_of(coin);
    let (pa, pb) = (
        canonical_state(a).overlap(psi),
        canonical_state(b).overlap(psi),
    );
    if pb > pa {
        (b, pb)
    } else {
        (a, pa)
    }
}

pub fn cheat_win_probability(psi: &QutritState) -> CheatObjective {
    let (against_tails, p_heads) = best_in_set(psi, Coin::Heads);
    let (against_heads, p_tails) = best_in_set(psi, Coin::Tails);
    CheatObjective {
        win_prob: 0.5 * p_heads + 0.5 * p_tails,
        claim_against_heads: against_heads,
        claim_against_tails: against_tails,
    }
}

/// Evaluates each candidate and returns the best (first one on ties).
pub fn best_over(candidates: &[QutritState]) -> Option<(QutritState, CheatObjective)> {
    candidates
        .iter()
        .map(|s| (*s, cheat_win_probability(s)))
        .fold(None, |best, cur| match best {
            Some((_, b)) if b.win_prob >= cur.1.win_prob => best,
            _ => Some(cur),
        })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    /// Final step size of the local ascent, in radians.
    pub tolerance: f64,
    /// Angular spacing of the initial grid, in radians.
    pub grid_step: f64,
    pub restarts: usize,
    /// Objective evaluations allowed per local ascent.
    pub max_evaluations: usize,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            tolerance: 1e-4,
            grid_step: 0.01,
            restarts: 32,
            max_evaluations: 20_000,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizeReport {
    pub state: QutritState,
    pub objective: CheatObjective,
    /// Whether the best ascent shrank its step below the tolerance within budget.
    pub converged: bool,
    pub evaluations: usize,
}

fn octant_point(theta: f64, phi: f64) -> QutritState {
    QutritState::from_real(
        theta.cos(),
        theta.sin() * phi.cos(),
        theta.sin() * phi.sin(),
    )
    .expect("point on the unit sphere")
}

fn objective_at(theta: f64, phi: f64) -> f64 {
    cheat_win_probability(&octant_point(theta, phi)).win_prob
}

struct Ascent {
    theta: f64,
    phi: f64,
    value: f64,
    converged: bool,
    evaluations: usize,
}

/// Compass search on `(θ, φ) ∈ [0, π/2]²` with step halving.
fn ascend(theta: f64, phi: f64, initial_step: f64, config: &OptimizerConfig) -> Ascent {
    let clamp = |x: f64| x.clamp(0.0, FRAC_PI_2);
    let (mut theta, mut phi) = (clamp(theta), clamp(phi));
    let mut value = objective_at(theta, phi);
    let mut step = initial_step;
    let mut evaluations = 1;
    while step >= config.tolerance && evaluations < config.max_evaluations {
        let mut improved = false;
        for (dt, dp) in [(1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0)] {
            let (t, p) = (clamp(theta + dt * step), clamp(phi + dp * step));
            let v = objective_at(t, p);
            evaluations += 1;
            if v > value {
                (theta, phi, value) = (t, p, v);
                improved = true;
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    Ascent {
        theta,
        phi,
        value,
        converged: step < config.tolerance,
        evaluations,
    }
}

/// Grid scan over the octant followed by local ascent from the grid optimum
/// and from `config.restarts` random starting points. Returns the best point.
pub fn optimize_cheat_state<R: Rng + ?Sized>(
    config: &OptimizerConfig,
    rng: &mut R,
) -> Result<OptimizeReport, QutritError> {
    if !(config.tolerance > 0.0) || !(config.grid_step > 0.0) {
        return Err(QutritError::InvalidDistribution(
            "optimizer tolerance and grid step must be positive".into(),
        ));
    }
    let cells = (FRAC_PI_2 / config.grid_step).ceil() as usize;
    let mut evaluations = 0;
    let mut grid_best = (0.0, 0.0, f64::NEG_INFINITY);
    for i in 0..=cells {
        let theta = (i as f64 * config.grid_step).min(FRAC_PI_2);
        for j in 0..=cells {
            let phi = (j as f64 * config.grid_step).min(FRAC_PI_2);
            let v = objective_at(theta, phi);
            evaluations += 1;
            if v > grid_best.2 {
                grid_best = (theta, phi, v);
            }
        }
    }

    let mut best = ascend(grid_best.0, grid_best.1, config.grid_step, config);
    evaluations += best.evaluations;
    for _ in 0..config.restarts {
        let theta = rng.random::<f64>() * FRAC_PI_2;
        let phi = rng.random::<f64>() * FRAC_PI_2;
        let run = ascend(theta, phi, 0.25, config);
        evaluations += run.evaluations;
        if run.value > best.value {
            best = run;
        }
    }

    let state = octant_point(best.theta, best.phi);
    Ok(OptimizeReport {
        state,
        objective: cheat_win_probability(&state),
        converged: best.converged,
        evaluations,
    })
}

fn set_mixture(set: &[QutritState]) -> Result<DensityOperator, QutritError> {
    if set.is_empty() {
        return Err(QutritError::InvalidDistribution("empty state set".into()));
    }
    let w = 1.0 / set.len() as f64;
    DensityOperator::mixture(&set.iter().map(|s| (w, *s)).collect::<Vec<_>>())
}

/// Helstrom bound for guessing which of two equiprobable sets a uniformly
/// chosen member came from.
pub fn discrimination_bound(
    set_a: &[QutritState],
    set_b: &[QutritState],
) -> Result<f64, QutritError> {
    helstrom_win_probability(&set_mixture(set_a)?, &set_mixture(set_b)?)
}

/// Best achievable guess of the coin by Bob before REVEAL.
pub fn bob_discrimination_bound() -> f64 {
    let set = |coin| StateLabel::set_of(coin).map(canonical_state);
    discrimination_bound(&set(Coin::Heads), &set(Coin::Tails))
        .expect("canonical sets give valid density operators")
}
