//! Minimal end-to-end run on synthetic imbalanced data.

use gpbag::dataset::SplitSpec;
use gpbag::ensemble::{train_ensemble, EnsembleConfig};
use gpbag::evaluation::evaluate;
use gpbag::gp::GpConfig;
use gpbag::synth::gaussian_imbalanced;

fn main() -> gpbag::Result<()> {
    let data = gaussian_imbalanced(60, 540, 6, 1.8, 7);
    let (train, test) = data.stratified_split(&SplitSpec::new(0.5, 7))?;
    let cfg = EnsembleConfig {
        bag_count: 10,
        gp: GpConfig {
            population_size: 100,
            generations: 10,
            ..GpConfig::default()
        },
        seed: 7,
        ..EnsembleConfig::default()
    };
    let model = train_ensemble(&train, &cfg)?;
    let report = evaluate(&model, &test)?;
    print!("{}", report.summary_text(data.name()));
    Ok(())
}
