use rand::Rng;
use serde::{Deserialize, Serialize};

use super::labels::{BasisLabel, OutcomeLabel};
use super::state::{basis_states, outcome_state, DensityOperator, Operator, QutritState};
use super::{QutritError, NORM_TOLERANCE};

/// Visibility loss plus per-projector detector efficiency.
///
/// The channel maps `|ψ⟩` to `V·|ψ⟩⟨ψ| + (1−V)·I/3`; a detector for outcome
/// `k` then fires with probability `p_k · η_k`, otherwise the photon is lost.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub visibility: f64,
    /// Indexed in `OutcomeLabel::ALL` order (B11..B23).
    pub detector_efficiency: [f64; 6],
}

impl Default for NoiseModel {
    fn default() -> Self {
        NoiseModel::ideal()
    }
}

impl NoiseModel {
    /// Visibility that reproduces a 6% honest failure rate.
    pub const CALIBRATED_VISIBILITY: f64 = 0.91;

    pub fn ideal() -> Self {
        NoiseModel {
            visibility: 1.0,
            detector_efficiency: [1.0; 6],
        }
    }

    pub fn new(visibility: f64, detector_efficiency: [f64; 6]) -> Result<Self, QutritError> {
        let model = NoiseModel {
            visibility,
            detector_efficiency,
        };
        model.validate()?;
        Ok(model)
    }

    pub fn with_visibility(visibility: f64) -> Result<Self, QutritError> {
        Self::new(visibility, [1.0; 6])
    }

    pub fn validate(&self) -> Result<(), QutritError> {
        if !(0.0..=1.0).contains(&self.visibility) {
            return Err(QutritError::InvalidNoise(format!(
                "visibility {} outside [0, 1]",
                self.visibility
            )));
        }
        if let Some(e) = self
            .detector_efficiency
            .iter()
            .find(|e| !(**e > 0.0 && **e <= 1.0))
        {
            return Err(QutritError::InvalidNoise(format!(
                "detector efficiency {e} outside (0, 1]"
            )));
        }
        Ok(())
    }

    pub fn is_ideal(&self) -> bool {
        self.visibility == 1.0 && self.detector_efficiency.iter().all(|e| *e == 1.0)
    }

    pub fn efficiencies(&self, basis: BasisLabel) -> [f64; 3] {
        basis.outcomes().map(|o| self.detector_efficiency[o.index()])
    }

    pub fn efficiency(&self, outcome: OutcomeLabel) -> f64 {
        self.detector_efficiency[outcome.index()]
    }
}

/// Honest failure rate produced by visibility `v`: `(2/3)(1 − v)`.
pub fn honest_failure_rate(visibility: f64) -> f64 {
    2.0 * (1.0 - visibility) / 3.0
}

/// Inverse of [`honest_failure_rate`]: `V = 1 − (3/2)·f₀`.
pub fn calibrate_visibility(target_failure_rate: f64) -> Result<f64, QutritError> {
    if !(0.0..=2.0 / 3.0).contains(&target_failure_rate) {
        return Err(QutritError::InvalidNoise(format!(
            "target failure rate {target_failure_rate} unreachable: visibility loss alone yields at most 2/3"
        )));
    }
    Ok(1.0 - 1.5 * target_failure_rate)
}

pub fn apply_noise(state: &QutritState, noise: &NoiseModel) -> DensityOperator {
    depolarize(&state.projector(), noise.visibility)
}

/// `V·ρ + (1−V)·I/3`.
pub fn depolarize(rho: &DensityOperator, visibility: f64) -> DensityOperator {
    if visibility == 1.0 {
        return *rho;
    }
    let m = rho.matrix().scale(visibility) + Operator::identity().scale((1.0 - visibility) / 3.0);
    DensityOperator::from_matrix_unchecked(m)
}

/// Born-rule probabilities in `basis`, ordered as [`basis_states`].
pub fn born_probabilities(rho: &DensityOperator, basis: BasisLabel) -> [f64; 3] {
    basis_states(basis).map(|b| rho.expectation(&b).max(0.0))
}

/// Born-rule probabilities in the computational basis `{|0⟩, |1⟩, |2⟩}`.
pub fn computational_probabilities(rho: &DensityOperator) -> [f64; 3] {
    let m = rho.matrix();
    [m[(0, 0)].re.max(0.0), m[(1, 1)].re.max(0.0), m[(2, 2)].re.max(0.0)]
}

/// What a detector bank reports for one photon.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Detection {
    Click(OutcomeLabel),
    Lost,
}

/// Draws one detection event. Consumes exactly one `f64` from `rng`.
///
/// Outcome `k` fires with probability `probs[k]·eff[k]`; the photon is lost
/// with the remaining probability.
pub fn sample_outcome<R: Rng + ?Sized>(
    probs: &[f64; 3],
    efficiencies: &[f64; 3],
    basis: BasisLabel,
    rng: &mut R,
) -> Detection {
    match sample_index(probs, efficiencies, rng) {
        Some(k) => Detection::Click(basis.outcomes()[k]),
        None => Detection::Lost,
    }
}

pub(crate) fn sample_index<R: Rng + ?Sized>(
    probs: &[f64; 3],
    efficiencies: &[f64; 3],
    rng: &mut R,
) -> Option<usize> {
    debug_assert!((probs.iter().sum::<f64>() - 1.0).abs() < 1e-9);
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for k in 0..3 {
        acc += probs[k] * efficiencies[k];
        if u < acc {
            return Some(k);
        }
    }
    // with perfect detectors a miss is only rounding in the probabilities
    if efficiencies.iter().all(|e| *e >= 1.0) {
        return (0..3).rev().find(|k| probs[*k] > 0.0);
    }
    None
}

/// Rank-1 projective collapse onto the clicked projector's state.
pub fn collapse(state: &QutritState, outcome: OutcomeLabel) -> Result<QutritState, QutritError> {
    let target = outcome_state(outcome);
    if target.overlap(state) <= NORM_TOLERANCE {
        return Err(QutritError::ZeroProbabilityCollapse(outcome.name().to_string()));
    }
    Ok(target)
}

/// Collapse of a mixed state onto computational level `k`.
pub fn collapse_computational(
    rho: &DensityOperator,
    level: usize,
) -> Result<QutritState, QutritError> {
    let target = QutritState::computational(level);
    if rho.expectation(&target) <= NORM_TOLERANCE {
        return Err(QutritError::ZeroProbabilityCollapse(format!("|{level}⟩")));
    }
    Ok(target)
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::qutrit::labels::StateLabel;
    use crate::qutrit::state::canonical_state;

    const TOL: f64 = 1e-12;

    fn assert_probs(actual: [f64; 3], expected: [f64; 3]) {
        for k in 0..3 {
            assert!(
                (actual[k] - expected[k]).abs() < TOL,
                "{actual:?} != {expected:?}"
            );
        }
    }

    #[test]
    fn noise_endpoints() {
        let a11 = canonical_state(StateLabel::A11);
        let ideal = apply_noise(&a11, &NoiseModel::ideal());
        assert!((ideal.matrix() - a11.projector().matrix()).norm() < TOL);
        let flat = apply_noise(&a11, &NoiseModel::with_visibility(0.0).unwrap());
        assert!((flat.matrix() - DensityOperator::maximally_mixed().matrix()).norm() < TOL);
    }

    #[test]
    fn calibrated_visibility_probabilities() {
        let noise = NoiseModel::with_visibility(0.91).unwrap();
        let rho = apply_noise(&canonical_state(StateLabel::A11), &noise);
        assert_probs(born_probabilities(&rho, BasisLabel::Basis1), [0.94, 0.03, 0.03]);
    }

    #[test]
    fn born_examples() {
        let pure = |l| canonical_state(l).projector();
        assert_probs(born_probabilities(&pure(StateLabel::A11), BasisLabel::Basis1), [1.0, 0.0, 0.0]);
        assert_probs(
            born_probabilities(&pure(StateLabel::A21), BasisLabel::Basis1),
            [0.25, 0.25, 0.5],
        );
        assert_probs(
            born_probabilities(&QutritState::computational(0).projector(), BasisLabel::Basis1),
            [0.5, 0.5, 0.0],
        );
    }

    #[test]
    fn own_basis_is_deterministic() {
        for s in StateLabel::ALL {
            let probs = born_probabilities(&canonical_state(s).projector(), s.basis());
            let mut expected = [0.0; 3];
            expected[s.matching_outcome().slot()] = 1.0;
            assert_probs(probs, expected);
        }
    }

    #[test]
    fn sampling_is_deterministic_and_respects_certainty() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..1000 {
            assert_eq!(
                sample_outcome(&[1.0, 0.0, 0.0], &[1.0; 3], BasisLabel::Basis2, &mut rng),
                Detection::Click(OutcomeLabel::B21)
            );
        }
        let draw = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..200)
                .map(|_| sample_outcome(&[0.2, 0.3, 0.5], &[0.9, 1.0, 0.7], BasisLabel::Basis1, &mut rng))
                .collect::<Vec<_>>()
        };
        assert_eq!(draw(7), draw(7));
    }

    #[test]
    fn inefficient_detector_loses_half() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 10_000;
        let lost = (0..n)
            .filter(|_| {
                sample_outcome(&[1.0, 0.0, 0.0], &[0.5, 1.0, 1.0], BasisLabel::Basis1, &mut rng)
                    == Detection::Lost
            })
            .count() as f64;
        let sigma = (0.25 / n as f64).sqrt();
        assert!((lost / n as f64 - 0.5).abs() < 3.0 * sigma);
    }

    #[test]
    fn collapse_examples() {
        let a21 = canonical_state(StateLabel::A21);
        assert!(collapse(&a21, OutcomeLabel::B11)
            .unwrap()
            .eq_up_to_phase(&QutritState::from_real(1.0, 1.0, 0.0).unwrap(), TOL));
        assert!(matches!(
            collapse(&canonical_state(StateLabel::A11), OutcomeLabel::B13),
            Err(QutritError::ZeroProbabilityCollapse(_))
        ));
        assert!(collapse(&QutritState::computational(0), OutcomeLabel::B12)
            .unwrap()
            .eq_up_to_phase(&QutritState::from_real(1.0, -1.0, 0.0).unwrap(), TOL));
    }

    #[test]
    fn calibration_closed_form() {
        assert!((calibrate_visibility(0.06).unwrap() - 0.91).abs() < TOL);
        assert_eq!(calibrate_visibility(0.0).unwrap(), 1.0);
        assert!(calibrate_visibility(0.7).is_err());
        assert!(calibrate_visibility(-0.1).is_err());
        assert!((honest_failure_rate(0.91) - 0.06).abs() < TOL);
    }

    #[test]
    fn noise_validation() {
        assert!(NoiseModel::with_visibility(1.2).is_err());
        assert!(NoiseModel::new(1.0, [1.0, 1.0, 0.0, 1.0, 1.0, 1.0]).is_err());
        assert!(NoiseModel::new(0.5, [0.5; 6]).is_ok());
    }
}
