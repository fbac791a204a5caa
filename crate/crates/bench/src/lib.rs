//! Shared fixtures for the criterion benches.

use qcoin_core::{AliceConfig, BobConfig, MixtureParams, NoiseModel, StrategyConfig};

/// Strategy pairs worth timing, with a short name for the report.
pub fn scenarios() -> Vec<(&'static str, StrategyConfig, NoiseModel)> {
    let calibrated = NoiseModel::with_visibility(NoiseModel::CALIBRATED_VISIBILITY)
        .expect("calibrated visibility is valid");
    vec![
        ("honest", StrategyConfig::honest(), calibrated),
        (
            "mixture",
            StrategyConfig::new(
                AliceConfig::MixtureCheat(MixtureParams::default()),
                BobConfig::Honest,
            ),
            NoiseModel::ideal(),
        ),
        (
            "measure_early",
            StrategyConfig::new(AliceConfig::Honest, BobConfig::MeasureEarly),
            calibrated,
        ),
    ]
}
