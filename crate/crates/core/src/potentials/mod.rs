//! Pair interactions between loops: Coulomb parts (equal-time, electrostatic
//! wire and dipolar remainder), the magnetic potential with its quantum
//! photon kernel, the transverse projector and closed-form Fourier kernels.

mod coulomb;
mod magnetic;
mod oracles;
mod tables;
mod transverse;

pub use coulomb::{
    coulomb_force_kernel, coulomb_regularization, monopole_force_x, self_energy_coulomb, vc_force_x, vc_pair,
    vel_fourier, vel_pair, wc_pair, LoopMoments,
};
pub use magnetic::{
    magnetic_capacitor_decay, magnetic_capacitor_integral, wab_asymptotic, wab_derivative_asymptotic, wab_direct,
    wc_fourier, wm_pair_fourier, wm_small_k, CapacitorDecay, DirectKernel, MagneticModel, WabMoments,
};
pub use oracles::{coulomb_force_kernel_quadrature, v_transverse_quadrature};
pub use tables::{KernelKind, PairKernelSample};
pub use transverse::{transverse_delta, v_transverse_partial, VTransverse};

/// Radial profile of the ultraviolet form factor.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FormProfile {
    /// `exp(-(k/k_cut)^2)`
    Gaussian,
    /// `exp(-(k/k_cut)^4)`
    QuarticExp,
}

/// Smooth, even form factor with `g(0) = 1` that vanishes beyond `k_cut`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FormFactor {
    pub k_cut: f64,
    pub profile: FormProfile,
}

impl FormFactor {
    pub fn gaussian(k_cut: f64) -> Self {
        Self { k_cut, profile: FormProfile::Gaussian }
    }

    /// Cutoff at the Compton wavenumber `2π m c / ħ` of a reference mass.
    pub fn from_mass(mass: f64, hbar: f64, c: f64) -> Self {
        Self::gaussian(2.0 * std::f64::consts::PI * mass * c / hbar)
    }

    pub fn eval(&self, k: f64) -> f64 {
        let t = k / self.k_cut;
        match self.profile {
            FormProfile::Gaussian => (-t * t).exp(),
            FormProfile::QuarticExp => (-(t * t) * (t * t)).exp(),
        }
    }
}

/// Quantum photon kernel
/// `Q(k, ds) = (λ_ph k / (2 sinh(λ_ph k/2))) cosh(λ_ph k (|ds mod 1| - 1/2))`,
/// evaluated in the overflow-free form `(x/2)(e^{x(t-1)} + e^{-xt})/(1 - e^{-x})`.
pub fn eval_q(lambda_ph: f64, kmag: f64, ds: f64) -> f64 {
    let x = lambda_ph * kmag.abs();
    if x == 0.0 {
        return 1.0;
    }
    let t = ds.rem_euclid(1.0);
    0.5 * x * ((x * (t - 1.0)).exp() + (-x * t).exp()) / (-(-x).exp_m1())
}
