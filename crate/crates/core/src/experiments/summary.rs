use super::config::Algo;
use super::run::TrialRecord;

/// Statistics of all trials at one grid point. Means and medians skip
/// failed trials and are `NaN` when every trial failed.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregateRow {
    pub algo: Algo,
    pub profile: String,
    pub d: usize,
    pub m: usize,
    pub s: usize,
    pub h: f64,
    pub sigma: f64,
    pub trials: usize,
    pub failures: usize,
    pub mean_l1: f64,
    pub median_l1: f64,
    pub mean_l2: f64,
    pub median_l2: f64,
    pub mean_sup: f64,
    /// Fraction of trials whose primary error is at most the threshold.
    pub success_rate: f64,
    pub mean_queries: f64,
}

fn mean(v: &[f64]) -> f64 {
    if v.is_empty() {
        f64::NAN
    } else {
        v.iter().sum::<f64>() / v.len() as f64
    }
}

fn median(v: &[f64]) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len();
    if n % 2 == 1 {
        s[n / 2]
    } else {
        0.5 * (s[n / 2 - 1] + s[n / 2])
    }
}

fn same_point(a: &TrialRecord, b: &TrialRecord) -> bool {
    a.algo == b.algo
        && a.d == b.d
        && a.m == b.m
        && a.s == b.s
        && a.h.to_bits() == b.h.to_bits()
        && a.sigma.to_bits() == b.sigma.to_bits()
}

fn aggregate(profile: &str, group: &[TrialRecord], threshold: f64) -> AggregateRow {
    let ok: Vec<&TrialRecord> = group.iter().filter(|r| !r.failed()).collect();
    let col = |f: fn(&TrialRecord) -> f64| ok.iter().map(|r| f(r)).collect::<Vec<_>>();
    let l1 = col(|r| r.err_l1);
    let l2 = col(|r| r.err_l2);
    let sup: Vec<f64> = col(|r| r.sup_err)
        .into_iter()
        .filter(|v| !v.is_nan())
        .collect();
    let successes = ok.iter().filter(|r| r.primary_error() <= threshold).count();
    let first = &group[0];
    AggregateRow {
        algo: first.algo,
        profile: profile.to_string(),
        d: first.d,
        m: first.m,
        s: first.s,
        h: first.h,
        sigma: first.sigma,
        trials: group.len(),
        failures: group.len() - ok.len(),
        mean_l1: mean(&l1),
        median_l1: median(&l1),
        mean_l2: mean(&l2),
        median_l2: median(&l2),
        mean_sup: mean(&sup),
        success_rate: successes as f64 / group.len() as f64,
        mean_queries: mean(&col(|r| r.queries as f64)),
    }
}

/// One row per run of consecutive records sharing a grid point, in input
/// order. [`super::run_grid`] emits each grid point contiguously.
pub fn summarize(
    profile: &str,
    records: &[TrialRecord],
    success_threshold: f64,
) -> Vec<AggregateRow> {
    records
        .chunk_by(same_point)
        .map(|g| aggregate(profile, g, success_threshold))
        .collect()
}
