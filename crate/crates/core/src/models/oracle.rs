use rand::seq::index::sample;
use rand_distr::{Distribution, StandardNormal};

use super::profile::Profile;
use crate::error::{invalid, Error, Result};
use crate::la::{self, Vector};
use crate::rng;

/// Relative slack on domain membership, absorbing rounding in `h·φ_j`.
pub const DOMAIN_TOL: f64 = 1e-9;

/// Model family of the hidden function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelKind {
    /// `g(⟨a,x⟩)` on `[−1,1]^d` with `‖a‖₁ = 1`.
    RidgeCube,
    /// `g(⟨a,x⟩)` on the unit ball with `‖a‖₂ = 1`.
    RidgeBall,
    /// `g(‖a − x‖²)` on the unit ball with `‖a‖₂ = 1`.
    RadialBall,
}

impl ModelKind {
    /// Profile argument range over the domain.
    pub fn profile_domain(self) -> (f64, f64) {
        match self {
            ModelKind::RidgeCube | ModelKind::RidgeBall => (-1.0, 1.0),
            ModelKind::RadialBall => (0.0, 4.0),
        }
    }

    /// Point where the profile derivative drives identifiability.
    pub fn anchor(self) -> f64 {
        match self {
            ModelKind::RadialBall => 1.0,
            _ => 0.0,
        }
    }

    fn direction_norm(self, a: &[f64]) -> f64 {
        match self {
            ModelKind::RidgeCube => la::l1(a),
            _ => la::l2(a),
        }
    }
}

/// Additive Gaussian noise on oracle answers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    pub sigma: f64,
    /// Answer `f(0)` exactly.
    pub noiseless_origin: bool,
    /// Number of noisy reads averaged for `f(0)` when the origin is noisy.
    pub origin_resamples: usize,
}

impl Default for NoiseSpec {
    fn default() -> Self {
        NoiseSpec {
            sigma: 0.0,
            noiseless_origin: true,
            origin_resamples: 1,
        }
    }
}

impl NoiseSpec {
    pub fn gaussian(sigma: f64) -> Self {
        NoiseSpec {
            sigma,
            ..Default::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.sigma >= 0.0 && self.sigma.is_finite()) {
            return invalid(format!(
                "noise level must be finite and non-negative, got {}",
                self.sigma
            ));
        }
        if self.origin_resamples == 0 {
            return invalid("origin_resamples must be at least 1");
        }
        Ok(())
    }
}

/// The hidden function without noise or query accounting. Used to measure
/// errors; recovery algorithms never see it.
#[derive(Debug, Clone)]
pub struct GroundTruth {
    kind: ModelKind,
    direction: Vector,
    profile: Profile,
}

impl GroundTruth {
    /// Checks the normalization required by `kind`.
    pub fn new(kind: ModelKind, direction: Vector, profile: Profile) -> Result<Self> {
        let n = kind.direction_norm(&direction);
        if (n - 1.0).abs() > DOMAIN_TOL {
            return invalid(format!(
                "direction must have unit norm for {kind:?}, got {n}"
            ));
        }
        Ok(Self::new_unchecked(kind, direction, profile))
    }

    /// Skips the normalization check, e.g. for the representation `(λa, g(·/λ))`.
    pub fn new_unchecked(kind: ModelKind, direction: Vector, profile: Profile) -> Self {
        GroundTruth {
            kind,
            direction,
            profile,
        }
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }
    pub fn direction(&self) -> &Vector {
        &self.direction
    }
    pub fn profile(&self) -> &Profile {
        &self.profile
    }
    pub fn dim(&self) -> usize {
        self.direction.len()
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match self.kind {
            ModelKind::RidgeCube | ModelKind::RidgeBall => {
                self.profile.eval(la::dot(&self.direction, x))
            }
            ModelKind::RadialBall => {
                let t: f64 = self
                    .direction
                    .iter()
                    .zip(x)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum();
                self.profile.eval(t)
            }
        }
    }

    /// Whether `x` lies in the model's domain, up to [`DOMAIN_TOL`]. With
    /// `exterior`, ball models accept the circumscribing cube.
    pub fn contains(&self, x: &[f64], exterior: bool) -> bool {
        let bound = 1.0 + DOMAIN_TOL;
        match (self.kind, exterior) {
            (ModelKind::RidgeCube, _) | (_, true) => la::linf(x) <= bound,
            _ => la::l2(x) <= bound,
        }
    }
}

/// Black-box access to the hidden function: evaluates with noise and counts
/// queries. The noise of the k-th query depends only on `(seed, k)`.
#[derive(Debug, Clone)]
pub struct FunctionOracle {
    truth: GroundTruth,
    noise: NoiseSpec,
    seed: u64,
    queries: u64,
    allow_exterior: bool,
}

impl FunctionOracle {
    pub fn new(truth: GroundTruth, noise: NoiseSpec, seed: u64) -> Result<Self> {
        noise.validate()?;
        Ok(FunctionOracle {
            truth,
            noise,
            seed,
            queries: 0,
            allow_exterior: false,
        })
    }

    /// Relaxes the ball domain to the circumscribing cube.
    pub fn with_exterior(mut self, allow: bool) -> Self {
        self.allow_exterior = allow;
        self
    }

    pub fn kind(&self) -> ModelKind {
        self.truth.kind
    }
    pub fn dim(&self) -> usize {
        self.truth.dim()
    }
    pub fn noise(&self) -> &NoiseSpec {
        &self.noise
    }
    pub fn queries(&self) -> u64 {
        self.queries
    }
    pub fn seed(&self) -> u64 {
        self.seed
    }
    pub fn allows_exterior(&self) -> bool {
        self.allow_exterior
    }

    /// The hidden function. Reserved for error measurement.
    pub fn truth(&self) -> &GroundTruth {
        &self.truth
    }

    fn draw(&self) -> f64 {
        let z: f64 = StandardNormal.sample(&mut rng::rng_stream(self.seed, self.queries));
        self.noise.sigma * z
    }

    /// One query. Fails without counting when `x` is outside the domain or
    /// has the wrong length.
    pub fn eval(&mut self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim() {
            return invalid(format!(
                "query has length {} but dimension is {}",
                x.len(),
                self.dim()
            ));
        }
        if !self.truth.contains(x, self.allow_exterior) {
            return Err(Error::Domain(format!(
                "‖x‖∞ = {}, ‖x‖₂ = {} for {:?}",
                la::linf(x),
                la::l2(x),
                self.truth.kind
            )));
        }
        let mut value = self.truth.eval(x);
        if !value.is_finite() {
            return Err(Error::Domain("profile is undefined at this point".into()));
        }
        let exact =
            self.noise.sigma == 0.0 || (self.noise.noiseless_origin && x.iter().all(|v| *v == 0.0));
        if !exact {
            value += self.draw();
        }
        self.queries += 1;
        Ok(value)
    }

    /// `f(0)`: exact when the origin is noiseless, otherwise the mean of
    /// `origin_resamples` noisy reads (each counted).
    pub fn eval_origin(&mut self) -> Result<f64> {
        let zero = vec![0.0; self.dim()];
        let reads = if self.noise.noiseless_origin || self.noise.sigma == 0.0 {
            1
        } else {
            self.noise.origin_resamples
        };
        let mut acc = 0.0;
        for _ in 0..reads {
            acc += self.eval(&zero)?;
        }
        Ok(acc / reads as f64)
    }
}

/// How a random direction is drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DirectionMode {
    DenseGaussian,
    /// `s` nonzeros at uniformly chosen positions.
    Sparse(usize),
}

/// Which norm the direction is normalized in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormKind {
    L1,
    L2,
}

impl NormKind {
    pub fn for_model(kind: ModelKind) -> Self {
        match kind {
            ModelKind::RidgeCube => NormKind::L1,
            _ => NormKind::L2,
        }
    }
}

/// Random direction with standard normal entries on its support, normalized.
pub fn make_direction(d: usize, mode: DirectionMode, norm: NormKind, seed: u64) -> Result<Vector> {
    if d == 0 {
        return invalid("dimension must be positive");
    }
    let mut r = rng::rng(seed);
    let mut a = vec![0.0; d];
    match mode {
        DirectionMode::DenseGaussian => {
            for v in a.iter_mut() {
                *v = StandardNormal.sample(&mut r);
            }
        }
        DirectionMode::Sparse(s) => {
            if s == 0 || s > d {
                return invalid(format!("sparsity must lie in 1..={d}, got {s}"));
            }
            let mut support = sample(&mut r, d, s).into_vec();
            support.sort_unstable();
            for i in support {
                a[i] = StandardNormal.sample(&mut r);
            }
        }
    }
    let normalized = match norm {
        NormKind::L1 => la::normalize_l1(&a),
        NormKind::L2 => la::normalize_l2(&a),
    };
    normalized
        .ok_or_else(|| Error::Degenerate("drawn direction is zero".into()))
        .and_then(Vector::new)
}
