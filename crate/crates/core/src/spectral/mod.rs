//! Hecke zeta functions, the Eisenstein weight and sieve quantity, the
//! geometric side of the Kuznetsov formula, and gamma factors.

mod eisenstein;
mod gamma_factor;
mod kuznetsov;
mod sequence;
mod zeta;

pub use eisenstein::{
    default_grid, eisenstein_sieve_sum, eisenstein_weight, eisenstein_weight_with,
    EisensteinGrid, EisensteinPoint, EISENSTEIN_STEP, POLE_BAND, ZETA_SMOOTH_CUTOFF,
};
pub use gamma_factor::{analytic_conductor, gamma_factor};
pub use kuznetsov::{kuznetsov_geometric, KuznetsovGeometric, WEIL_CONSTANT};
pub use sequence::{CoefficientSequence, NormWindow};
pub use zeta::{
    hecke_character, hecke_zeta, hecke_zeta_with, ideal_angle, tau_s_p, IdealTable, ZetaMode,
    ZetaValue,
};
