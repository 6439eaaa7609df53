use std::fmt;
use std::sync::Arc;

use crate::error::{invalid, Result};

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Lipschitz constants of a profile and its derivative on some interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lipschitz {
    pub c0: f64,
    pub c1: f64,
}

#[derive(Clone)]
enum Shape {
    Linear,
    Tanh,
    TanhShift,
    Recip,
    Custom {
        eval: ScalarFn,
        deriv: ScalarFn,
        constants: Lipschitz,
    },
}

/// Univariate profile `g` with its derivative and Lipschitz data.
///
/// A profile can be rescaled in its argument: `rescaled(λ)` evaluates
/// `t ↦ g(t/λ)`.
#[derive(Clone)]
pub struct Profile {
    name: String,
    shape: Shape,
    scale: f64,
}

impl fmt::Debug for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Profile")
            .field("name", &self.name)
            .field("scale", &self.scale)
            .finish()
    }
}

/// `max |tanh''|`, attained where `tanh² = 1/3`.
pub const TANH_SECOND_DERIV_MAX: f64 = 0.769_800_358_919_501_4;

/// Names accepted by [`make_profile`].
pub const PROFILE_NAMES: [&str; 4] = ["linear", "tanh", "tanh-shift", "recip"];

/// Builds one of the built-in profiles:
///
/// * `linear`: `g(t) = t`
/// * `tanh`: `g(t) = tanh t`
/// * `tanh-shift`: `g(t) = tanh(t − 1)`
/// * `recip`: `g(t) = −1/t`, meant for radial models around `t = 1`
pub fn make_profile(name: &str) -> Result<Profile> {
    let shape = match name {
        "linear" => Shape::Linear,
        "tanh" => Shape::Tanh,
        "tanh-shift" => Shape::TanhShift,
        "recip" => Shape::Recip,
        other => {
            return invalid(format!(
                "unknown profile '{other}', expected one of {}",
                PROFILE_NAMES.join(", ")
            ))
        }
    };
    Ok(Profile {
        name: name.to_string(),
        shape,
        scale: 1.0,
    })
}

impl Profile {
    /// A profile from user-supplied closures. `constants` must bound `g`
    /// and `g'` on the domain the profile will be used on.
    pub fn custom(
        name: impl Into<String>,
        eval: impl Fn(f64) -> f64 + Send + Sync + 'static,
        deriv: impl Fn(f64) -> f64 + Send + Sync + 'static,
        constants: Lipschitz,
    ) -> Self {
        Profile {
            name: name.into(),
            shape: Shape::Custom {
                eval: Arc::new(eval),
                deriv: Arc::new(deriv),
                constants,
            },
            scale: 1.0,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// `t ↦ g(t/λ)`. Lipschitz constants scale by `1/λ` and `1/λ²`.
    pub fn rescaled(&self, lambda: f64) -> Result<Profile> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return invalid(format!("scale must be positive and finite, got {lambda}"));
        }
        Ok(Profile {
            scale: self.scale * lambda,
            ..self.clone()
        })
    }

    pub fn eval(&self, t: f64) -> f64 {
        let u = t / self.scale;
        match &self.shape {
            Shape::Linear => u,
            Shape::Tanh => u.tanh(),
            Shape::TanhShift => (u - 1.0).tanh(),
            Shape::Recip => -1.0 / u,
            Shape::Custom { eval, .. } => eval(u),
        }
    }

    pub fn deriv(&self, t: f64) -> f64 {
        let u = t / self.scale;
        let base = match &self.shape {
            Shape::Linear => 1.0,
            Shape::Tanh => sech2(u),
            Shape::TanhShift => sech2(u - 1.0),
            Shape::Recip => 1.0 / (u * u),
            Shape::Custom { deriv, .. } => deriv(u),
        };
        base / self.scale
    }

    /// Constants valid on the whole real line (or the positive half-line for
    /// `recip`, where both are unbounded and reported as infinity).
    pub fn lipschitz(&self) -> Lipschitz {
        self.lipschitz_on(f64::NEG_INFINITY, f64::INFINITY)
    }

    /// Constants on `[lo, hi]`. For `recip` these come from the endpoint
    /// nearest zero, where `|g'| = 1/t²` and `|g''| = 2/t³` are largest.
    pub fn lipschitz_on(&self, lo: f64, hi: f64) -> Lipschitz {
        let s = self.scale;
        let base = match &self.shape {
            Shape::Linear => Lipschitz { c0: 1.0, c1: 0.0 },
            Shape::Tanh | Shape::TanhShift => Lipschitz {
                c0: 1.0,
                c1: TANH_SECOND_DERIV_MAX,
            },
            Shape::Recip => {
                let near = (lo / s).max(0.0);
                if near <= 0.0 || hi <= 0.0 {
                    Lipschitz {
                        c0: f64::INFINITY,
                        c1: f64::INFINITY,
                    }
                } else {
                    Lipschitz {
                        c0: 1.0 / (near * near),
                        c1: 2.0 / (near * near * near),
                    }
                }
            }
            Shape::Custom { constants, .. } => *constants,
        };
        Lipschitz {
            c0: base.c0 / s,
            c1: base.c1 / (s * s),
        }
    }
}

fn sech2(u: f64) -> f64 {
    let c = u.cosh();
    1.0 / (c * c)
}
