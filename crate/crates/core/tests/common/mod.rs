//! Brute-force reference model in plain real arithmetic.
//!
//! Every state in the protocol has real amplitudes, so the oracle works with
//! `[f64; 3]` vectors and enumerates (preparation, bet, outcome) directly. It
//! deliberately shares no code with the library.

#![allow(dead_code)]

use std::f64::consts::FRAC_1_SQRT_2 as H;

pub type Vec3 = [f64; 3];

pub const E0: Vec3 = [1.0, 0.0, 0.0];
pub const E1: Vec3 = [0.0, 1.0, 0.0];
pub const E2: Vec3 = [0.0, 0.0, 1.0];

/// Claimable states in the order A11, A12, A21, A22.
pub const CLAIMS: [Vec3; 4] = [[H, H, 0.0], [H, -H, 0.0], [H, 0.0, H], [H, 0.0, -H]];

pub const HEADS: usize = 0;
pub const TAILS: usize = 1;

pub fn coin_of(claim: usize) -> usize {
    claim / 2
}

pub fn basis_of(claim: usize) -> usize {
    claim / 2
}

/// Measurement basis `b`: two claim states then the out-of-plane vector.
pub fn basis(b: usize) -> [Vec3; 3] {
    if b == 0 {
        [CLAIMS[0], CLAIMS[1], E2]
    } else {
        [CLAIMS[2], CLAIMS[3], E1]
    }
}

pub fn dot(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn normalize(v: Vec3) -> Vec3 {
    let n = dot(v, v).sqrt();
    [v[0] / n, v[1] / n, v[2] / n]
}

/// Outcome probabilities of `psi` in basis `b` after mixing with white noise.
pub fn outcome_probs(psi: Vec3, b: usize, v: f64) -> [f64; 3] {
    let basis = basis(b);
    let mut p = [0.0; 3];
    for (k, e) in basis.iter().enumerate() {
        p[k] = v * dot(*e, psi).powi(2) + (1.0 - v) / 3.0;
    }
    p
}

/// Slot of a claim within its basis.
pub fn slot_of(claim: usize) -> usize {
    claim % 2
}

#[derive(Clone, Copy, Debug, Default)]
pub struct KeptRates {
    pub failure: f64,
    pub alice_win: f64,
    /// Per-basis failure mass on each outcome slot, normalised by all kept throws.
    pub failure_slots: [[f64; 3]; 2],
}

/// Rates over kept throws when Alice prepares from `preps` and claims
/// `claim(prep_index, bet)`, against a fair-betting honest Bob.
///
/// Bob's basis is independent of everything else, so conditioning on a
/// matching basis leaves the (preparation, bet) weights unchanged.
pub fn kept_rates(preps: &[(f64, Vec3)], claim: impl Fn(usize, usize) -> usize, v: f64) -> KeptRates {
    let mut out = KeptRates::default();
    for (i, &(w, psi)) in preps.iter().enumerate() {
        for bet in [HEADS, TAILS] {
            let c = claim(i, bet);
            let probs = outcome_probs(psi, basis_of(c), v);
            let weight = w * 0.5;
            for (slot, p) in probs.iter().enumerate() {
                if slot == slot_of(c) {
                    if coin_of(c) != bet {
                        out.alice_win += weight * p;
                    }
                } else {
                    out.failure += weight * p;
                    out.failure_slots[basis_of(c)][slot] += weight * p;
                }
            }
        }
    }
    out
}

pub fn honest_preps() -> Vec<(f64, Vec3)> {
    CLAIMS.iter().map(|s| (0.25, *s)).collect()
}

pub fn honest_rates(v: f64) -> KeptRates {
    kept_rates(&honest_preps(), |i, _| i, v)
}

/// A12 or A21 with equal weight; claims A21 against Heads and A12 against Tails.
pub fn mixture_rates(v: f64) -> KeptRates {
    kept_rates(
        &[(0.5, CLAIMS[1]), (0.5, CLAIMS[2])],
        |_, bet| if bet == HEADS { 2 } else { 1 },
        v,
    )
}

/// Fixed preparation, claiming the highest-overlap state opposite to the bet.
pub fn fixed_state_rates(psi: Vec3, v: f64) -> KeptRates {
    kept_rates(&[(1.0, psi)], |_, bet| best_opposite(psi, bet), v)
}

pub fn best_opposite(psi: Vec3, bet: usize) -> usize {
    let set = if bet == HEADS { [2, 3] } else { [0, 1] };
    if dot(CLAIMS[set[0]], psi).powi(2) >= dot(CLAIMS[set[1]], psi).powi(2) {
        set[0]
    } else {
        set[1]
    }
}

/// Definite-state cheat objective: average over bets of the best opposite overlap.
pub fn cheat_objective(psi: Vec3) -> f64 {
    let psi = normalize(psi);
    0.5 * [HEADS, TAILS]
        .iter()
        .map(|&bet| dot(CLAIMS[best_opposite(psi, bet)], psi).powi(2))
        .sum::<f64>()
}

/// Bob measures the computational basis before betting against honest Alice (V=1).
/// Returns (bet-win rate, failure rate) over kept throws.
pub fn measure_early_rates() -> (f64, f64) {
    let (mut win, mut fail) = (0.0, 0.0);
    for (claim, psi) in CLAIMS.iter().enumerate() {
        for (level, e) in [E0, E1, E2].iter().enumerate() {
            let p_level = 0.25 * psi[level].powi(2);
            if p_level == 0.0 {
                continue;
            }
            let p_heads = match level {
                1 => 1.0,
                2 => 0.0,
                _ => 0.5,
            };
            let p_match = if coin_of(claim) == HEADS { p_heads } else { 1.0 - p_heads };
            win += p_level * p_match;
            fail += p_level * (1.0 - dot(CLAIMS[claim], *e).powi(2));
        }
    }
    (win, fail)
}

/// Deny-loss Bob with probability `p` against honest Alice at V=1.
/// Returns (loss rate over attempts, Bob win rate over acknowledged throws).
pub fn deny_loss_rates(p: f64) -> (f64, f64) {
    // half the attempts route to the wrong basis; the rest are successes at V=1
    let mismatch = 0.5;
    let lost_bet = 0.5 * 0.5;
    let won_bet = 0.5 * 0.5;
    let denied = lost_bet * p;
    let loss = mismatch + denied;
    let bob_win = won_bet / (won_bet + lost_bet - denied);
    (loss, bob_win)
}

/// Eigenvalues of a real symmetric 3×3 matrix by the trigonometric closed form.
pub fn sym_eigenvalues(a: [[f64; 3]; 3]) -> [f64; 3] {
    let p1 = a[0][1].powi(2) + a[0][2].powi(2) + a[1][2].powi(2);
    let q = (a[0][0] + a[1][1] + a[2][2]) / 3.0;
    if p1 == 0.0 {
        let mut d = [a[0][0], a[1][1], a[2][2]];
        d.sort_by(f64::total_cmp);
        return d;
    }
    let p2 = (a[0][0] - q).powi(2) + (a[1][1] - q).powi(2) + (a[2][2] - q).powi(2) + 2.0 * p1;
    let p = (p2 / 6.0).sqrt();
    let mut b = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            b[i][j] = (a[i][j] - if i == j { q } else { 0.0 }) / p;
        }
    }
    let det = b[0][0] * (b[1][1] * b[2][2] - b[1][2] * b[2][1])
        - b[0][1] * (b[1][0] * b[2][2] - b[1][2] * b[2][0])
        + b[0][2] * (b[1][0] * b[2][1] - b[1][1] * b[2][0]);
    let r = (det / 2.0).clamp(-1.0, 1.0);
    let phi = r.acos() / 3.0;
    let e1 = q + 2.0 * p * phi.cos();
    let e3 = q + 2.0 * p * (phi + 2.0 * std::f64::consts::PI / 3.0).cos();
    let e2 = 3.0 * q - e1 - e3;
    let mut e = [e1, e2, e3];
    e.sort_by(f64::total_cmp);
    e
}

pub fn outer_mix(states: &[Vec3]) -> [[f64; 3]; 3] {
    let w = 1.0 / states.len() as f64;
    let mut m = [[0.0; 3]; 3];
    for s in states {
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] += w * s[i] * s[j];
            }
        }
    }
    m
}

/// 1/2 + ‖ρa − ρb‖₁ / 4 for equal-weight mixtures of real states.
pub fn helstrom(set_a: &[Vec3], set_b: &[Vec3]) -> f64 {
    let (a, b) = (outer_mix(set_a), outer_mix(set_b));
    let mut d = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            d[i][j] = a[i][j] - b[i][j];
        }
    }
    0.5 + 0.25 * sym_eigenvalues(d).iter().map(|l| l.abs()).sum::<f64>()
}

/// Standard error of a proportion.
pub fn sigma(p: f64, n: u64) -> f64 {
    (p * (1.0 - p) / n as f64).sqrt()
}

pub fn within_sigmas(observed: f64, expected: f64, n: u64, k: f64) -> bool {
    (observed - expected).abs() <= k * sigma(expected, n).max(1e-12)
}
