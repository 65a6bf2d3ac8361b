use serde::{Deserialize, Serialize};

/// Constant coefficients of `u_t + V·∇u = Σ D_a u_aa`.
///
/// Two-dimensional problems ignore the third component.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PdeCoefficients {
    pub velocity: [f64; 3],
    pub diffusion: [f64; 3],
}

impl PdeCoefficients {
    pub fn new_2d(velocity: [f64; 2], diffusion: [f64; 2]) -> Self {
        Self {
            velocity: [velocity[0], velocity[1], 0.0],
            diffusion: [diffusion[0], diffusion[1], 0.0],
        }
    }

    pub fn new_3d(velocity: [f64; 3], diffusion: [f64; 3]) -> Self {
        Self {
            velocity,
            diffusion,
        }
    }

    /// Pure isotropic diffusion.
    pub fn heat(d: f64) -> Self {
        Self {
            velocity: [0.0; 3],
            diffusion: [d; 3],
        }
    }
}
