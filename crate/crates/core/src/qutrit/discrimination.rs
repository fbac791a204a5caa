use super::state::{hermitian_deviation, hermitian_eigenvalues, DensityOperator, Operator};
use super::{QutritError, NORM_TOLERANCE};

/// Trace norm `‖A‖₁ = Σ|λᵢ|` of a Hermitian 3×3 matrix.
pub fn trace_norm(m: &Operator) -> Result<f64, QutritError> {
    let dev = hermitian_deviation(m);
    if !(dev <= NORM_TOLERANCE) {
        return Err(QutritError::NotHermitian(dev));
    }
    Ok(hermitian_eigenvalues(m).iter().map(|l| l.abs()).sum())
}

/// Optimal probability of telling `rho1` from `rho2` given equal priors:
/// `1/2 + ‖ρ₁ − ρ₂‖₁ / 4`.
pub fn helstrom_win_probability(
    rho1: &DensityOperator,
    rho2: &DensityOperator,
) -> Result<f64, QutritError> {
    let diff = rho1.matrix() - rho2.matrix();
    Ok(0.5 + 0.25 * trace_norm(&diff)?)
}

#[cfg(test)]
mod tests {
    use num_complex::Complex64;

    use super::*;
    use crate::qutrit::labels::StateLabel;
    use crate::qutrit::state::{canonical_state, QutritState};

    #[test]
    fn identical_states_are_indistinguishable() {
        let rho = canonical_state(StateLabel::A12).projector();
        assert!((helstrom_win_probability(&rho, &rho).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn orthogonal_states_are_perfectly_distinguishable() {
        let a = canonical_state(StateLabel::A11).projector();
        let b = canonical_state(StateLabel::A12).projector();
        assert!((helstrom_win_probability(&a, &b).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn set_mixtures_reach_three_quarters() {
        let mix = |l1, l2| {
            DensityOperator::mixture(&[(0.5, canonical_state(l1)), (0.5, canonical_state(l2))])
                .unwrap()
        };
        let heads = mix(StateLabel::A11, StateLabel::A12);
        let tails = mix(StateLabel::A21, StateLabel::A22);
        assert!((helstrom_win_probability(&heads, &tails).unwrap() - 0.75).abs() < 1e-12);
    }

    #[test]
    fn non_hermitian_is_rejected() {
        let mut m = *QutritState::computational(0).projector().matrix();
        m[(0, 2)] = Complex64::new(0.0, 0.3);
        let bad = DensityOperator::from_matrix_unchecked(m);
        let good = DensityOperator::maximally_mixed();
        assert!(matches!(
            helstrom_win_probability(&bad, &good),
            Err(QutritError::NotHermitian(_))
        ));
    }
}
