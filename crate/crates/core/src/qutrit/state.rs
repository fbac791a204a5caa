use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::labels::{BasisLabel, OutcomeLabel, StateLabel};
use super::{QutritError, NORM_TOLERANCE, PSD_TOLERANCE};

pub type Operator = Matrix3<Complex64>;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const HALF_ROOT: Complex64 = Complex64::new(FRAC_1_SQRT_2, 0.0);
const NEG_HALF_ROOT: Complex64 = Complex64::new(-FRAC_1_SQRT_2, 0.0);

/// A pure qutrit state: a unit vector in C³.
///
/// Equality with `==` compares amplitudes exactly; use
/// [`QutritState::eq_up_to_phase`] for physical equality.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QutritState {
    amps: Vector3<Complex64>,
}

impl QutritState {
    /// Builds a state from amplitudes that must already be normalized.
    pub fn new(amps: [Complex64; 3]) -> Result<Self, QutritError> {
        let state = QutritState {
            amps: Vector3::from(amps),
        };
        let norm_sqr = state.norm_sqr();
        if !norm_sqr.is_finite() || (norm_sqr - 1.0).abs() > NORM_TOLERANCE {
            return Err(QutritError::NotNormalized(norm_sqr));
        }
        Ok(state)
    }

    /// Normalizes the given amplitudes.
    pub fn normalized(amps: [Complex64; 3]) -> Result<Self, QutritError> {
        let v = Vector3::from(amps);
        let norm = v.norm();
        if !norm.is_finite() || norm < NORM_TOLERANCE {
            return Err(QutritError::NotNormalized(norm * norm));
        }
        Ok(QutritState {
            amps: v.unscale(norm),
        })
    }

    pub fn from_real(a: f64, b: f64, c: f64) -> Result<Self, QutritError> {
        Self::normalized([a.into(), b.into(), c.into()])
    }

    /// Computational basis state `|k⟩`, `k ∈ {0, 1, 2}`.
    pub fn computational(k: usize) -> Self {
        assert!(k < 3, "qutrit level {k} out of range");
        let mut amps = [ZERO; 3];
        amps[k] = ONE;
        QutritState {
            amps: Vector3::from(amps),
        }
    }

    const fn exact(a: Complex64, b: Complex64, c: Complex64) -> Self {
        QutritState {
            amps: Vector3::new(a, b, c),
        }
    }

    pub fn amplitudes(&self) -> [Complex64; 3] {
        [self.amps[0], self.amps[1], self.amps[2]]
    }

    pub(crate) fn vector(&self) -> &Vector3<Complex64> {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.norm_squared()
    }

    /// `⟨self|other⟩`, conjugate-linear in `self`.
    pub fn inner(&self, other: &QutritState) -> Complex64 {
        self.amps.dotc(&other.amps)
    }

    /// Transition probability `|⟨self|other⟩|²`.
    pub fn overlap(&self, other: &QutritState) -> f64 {
        self.inner(other).norm_sqr()
    }

    pub fn with_global_phase(&self, theta: f64) -> Self {
        let phase = Complex64::from_polar(1.0, theta);
        QutritState {
            amps: self.amps * phase,
        }
    }

    /// Physical equality: the states differ at most by a global phase.
    pub fn eq_up_to_phase(&self, other: &QutritState, tol: f64) -> bool {
        (1.0 - self.inner(other).norm()).abs() <= tol
    }

    pub fn projector(&self) -> DensityOperator {
        DensityOperator {
            m: self.amps * self.amps.adjoint(),
        }
    }
}

impl Serialize for QutritState {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let pairs: [[f64; 2]; 3] = self.amplitudes().map(|a| [a.re, a.im]);
        pairs.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for QutritState {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let pairs = <[[f64; 2]; 3]>::deserialize(deserializer)?;
        QutritState::new(pairs.map(|[re, im]| Complex64::new(re, im)))
            .map_err(serde::de::Error::custom)
    }
}

/// Alice's four announced states.
pub fn canonical_state(label: StateLabel) -> QutritState {
    match label {
        StateLabel::A11 => QutritState::exact(HALF_ROOT, HALF_ROOT, ZERO),
        StateLabel::A12 => QutritState::exact(HALF_ROOT, NEG_HALF_ROOT, ZERO),
        StateLabel::A21 => QutritState::exact(HALF_ROOT, ZERO, HALF_ROOT),
        StateLabel::A22 => QutritState::exact(HALF_ROOT, ZERO, NEG_HALF_ROOT),
    }
}

/// The state measured by a single projector of Bob's.
pub fn outcome_state(outcome: OutcomeLabel) -> QutritState {
    match outcome {
        OutcomeLabel::B11 => canonical_state(StateLabel::A11),
        OutcomeLabel::B12 => canonical_state(StateLabel::A12),
        OutcomeLabel::B13 => QutritState::computational(2),
        OutcomeLabel::B21 => canonical_state(StateLabel::A21),
        OutcomeLabel::B22 => canonical_state(StateLabel::A22),
        OutcomeLabel::B23 => QutritState::computational(1),
    }
}

/// Bob's orthonormal measurement triple, in outcome order.
pub fn basis_states(basis: BasisLabel) -> [QutritState; 3] {
    basis.outcomes().map(outcome_state)
}

pub fn inner_product(a: &QutritState, b: &QutritState) -> Complex64 {
    a.inner(b)
}

/// A 3×3 density operator: Hermitian, positive semidefinite, unit trace.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DensityOperator {
    m: Operator,
}

impl DensityOperator {
    /// Validates Hermiticity and trace (within 1e-12) and positivity
    /// (eigenvalues ≥ −1e-10).
    pub fn new(m: Operator) -> Result<Self, QutritError> {
        let dev = hermitian_deviation(&m);
        if !(dev <= NORM_TOLERANCE) {
            return Err(QutritError::NotHermitian(dev));
        }
        let tr = m.trace();
        if (tr.re - 1.0).abs() > NORM_TOLERANCE || tr.im.abs() > NORM_TOLERANCE {
            return Err(QutritError::BadTrace(tr.re));
        }
        let rho = DensityOperator { m };
        let min = rho.eigenvalues()[0];
        if min < -PSD_TOLERANCE {
            return Err(QutritError::NotPositive(min));
        }
        Ok(rho)
    }

    /// Wraps a matrix without validation. Consumers that need the density
    /// operator invariants re-check what they rely on.
    pub fn from_matrix_unchecked(m: Operator) -> Self {
        DensityOperator { m }
    }

    pub fn pure(state: &QutritState) -> Self {
        state.projector()
    }

    pub fn maximally_mixed() -> Self {
        DensityOperator {
            m: Operator::identity().unscale(3.0),
        }
    }

    /// Convex combination `Σ wᵢ |ψᵢ⟩⟨ψᵢ|`; weights must be nonnegative and sum to 1.
    pub fn mixture(components: &[(f64, QutritState)]) -> Result<Self, QutritError> {
        let total: f64 = components.iter().map(|(w, _)| *w).sum();
        if components.iter().any(|(w, _)| !(*w >= 0.0)) || (total - 1.0).abs() > NORM_TOLERANCE {
            return Err(QutritError::InvalidDistribution(format!(
                "mixture weights must be nonnegative and sum to 1 (sum {total})"
            )));
        }
        let m = components
            .iter()
            .fold(Operator::zeros(), |acc, (w, s)| acc + s.projector().m.scale(*w));
        Ok(DensityOperator { m })
    }

    pub fn matrix(&self) -> &Operator {
        &self.m
    }

    pub fn trace(&self) -> f64 {
        self.m.trace().re
    }

    /// `⟨ψ|ρ|ψ⟩`.
    pub fn expectation(&self, state: &QutritState) -> f64 {
        let v = state.vector();
        v.dotc(&(self.m * v)).re
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        hermitian_deviation(&self.m) <= tol
    }

    /// Eigenvalues in ascending order. Assumes Hermitian input.
    pub fn eigenvalues(&self) -> [f64; 3] {
        hermitian_eigenvalues(&self.m)
    }

    /// Purity `tr ρ²`.
    pub fn purity(&self) -> f64 {
        (self.m * self.m).trace().re
    }
}

pub(crate) fn hermitian_deviation(m: &Operator) -> f64 {
    (m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub(crate) fn hermitian_eigenvalues(m: &Operator) -> [f64; 3] {
    let eig = m.symmetric_eigenvalues();
    let mut vals = [eig[0], eig[1], eig[2]];
    vals.sort_by(f64::total_cmp);
    vals
}
