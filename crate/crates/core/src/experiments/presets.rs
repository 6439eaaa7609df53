use super::config::{Algo, ExperimentConfig};

/// `n` log-spaced points from `lo` to `hi`, rounded to 4 significant
/// digits so that they print compactly.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| {
            let v = (a + (b - a) * i as f64 / (n - 1) as f64).exp();
            let mag = 10f64.powi(v.log10().floor() as i32 - 3);
            (v / mag).round() * mag
        })
        .collect()
}

fn base(algo: Algo, profile: &str, seed: u64) -> ExperimentConfig {
    let mut c = ExperimentConfig::single(algo, profile, 1, 0.1, seed);
    c.dims.clear();
    c.steps.clear();
    c
}

/// Noise levels of the noisy experiments.
pub const NOISE_LEVELS: [f64; 4] = [0.03, 0.01, 0.003, 0.001];

/// Number of available presets, `fig1` to `fig4`.
pub const FIGURES: usize = 4;

/// Step grid of the noisy ridge experiment.
pub fn fig3_steps() -> Vec<f64> {
    log_grid(0.02, 3.0, 12)
}

/// Cube algorithm with dense directions: error against `h` for two
/// profiles and growing `d`.
pub fn fig1(seed: u64, full: bool) -> Vec<ExperimentConfig> {
    ["tanh", "tanh-shift"]
        .into_iter()
        .map(|profile| {
            let mut c = base(Algo::A, profile, seed);
            c.dims = if full {
                vec![10, 100, 1000, 10_000]
            } else {
                vec![10, 100, 1000]
            };
            c.steps = vec![0.01, 0.02, 0.05, 0.1, 0.2, 0.5, 1.0];
            c
        })
        .collect()
}

/// Compressed cube algorithm: error over the `(d, m)` plane, then against
/// `h` for three `(d, m)` pairs.
pub fn fig2(seed: u64, full: bool) -> Vec<ExperimentConfig> {
    let mut plane = base(Algo::B, "tanh-shift", seed);
    plane.sparsity = Some(5);
    plane.steps = vec![0.1];
    if full {
        plane.dims = (50..=1000).collect();
        plane.measurements = (1..=55).collect();
    } else {
        plane.dims = (50..=400).step_by(50).collect();
        plane.measurements = (1..=55).step_by(3).collect();
        plane.trials = 40;
    }
    let mut out = vec![plane.clone()];
    for (d, m) in [(100, 10), (500, 20), (1000, 30)] {
        let mut c = plane.clone();
        c.dims = vec![d];
        c.measurements = vec![m];
        c.steps = vec![0.01, 0.02, 0.05, 0.1, 0.2, 0.5, 1.0];
        out.push(c);
    }
    out
}

/// Noisy ridge recovery: Dantzig selector and plain coordinate differences
/// against `h` for four noise levels.
pub fn fig3(seed: u64, full: bool) -> Vec<ExperimentConfig> {
    let (d, m) = if full { (1000, 400) } else { (300, 120) };
    let mut c = base(Algo::C, "tanh-shift", seed);
    c.dims = vec![d];
    c.measurements = vec![m];
    c.sparsity = Some(5);
    c.steps = fig3_steps();
    c.sigmas = NOISE_LEVELS.to_vec();
    c.allow_exterior = true;
    if !full {
        c.trials = 40;
    }
    let mut plain = c.clone();
    plain.algo = Algo::ANoisy;
    plain.measurements.clear();
    plain.steps.retain(|h| *h <= 1.0);
    plain.allow_exterior = false;
    vec![c, plain]
}

/// Radial recovery with the pole at a sparse point: quadratic program
/// against `h` for growing `d`, then the noise-aware variant.
pub fn fig4(seed: u64, full: bool) -> Vec<ExperimentConfig> {
    let mut pairs = vec![(100, 40), (1000, 60)];
    if full {
        pairs.push((10_000, 80));
    }
    let mut out: Vec<ExperimentConfig> = pairs
        .into_iter()
        .map(|(d, m)| {
            let mut c = base(Algo::DCs, "recip", seed);
            c.dims = vec![d];
            c.measurements = vec![m];
            c.sparsity = Some(5);
            c.steps = vec![0.001, 0.002, 0.005, 0.01, 0.02, 0.05, 0.1, 0.2];
            if !full {
                c.trials = 40;
            }
            c
        })
        .collect();
    let mut noisy = base(Algo::DNoisy, "recip", seed);
    noisy.dims = vec![500];
    noisy.measurements = vec![100];
    noisy.sparsity = Some(5);
    noisy.steps = log_grid(0.01, 2.0, 10);
    noisy.sigmas = NOISE_LEVELS.to_vec();
    noisy.allow_exterior = true;
    if !full {
        noisy.trials = 40;
    }
    out.push(noisy);
    out
}

/// Preset by figure number.
pub fn preset(figure: usize, seed: u64, full: bool) -> Option<Vec<ExperimentConfig>> {
    match figure {
        1 => Some(fig1(seed, full)),
        2 => Some(fig2(seed, full)),
        3 => Some(fig3(seed, full)),
        4 => Some(fig4(seed, full)),
        _ => None,
    }
}
