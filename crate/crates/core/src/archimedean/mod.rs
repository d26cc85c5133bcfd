//! Gamma and Bessel functions, the test-function kernels, and the
//! Plancherel and Bessel integrals of the spectral side.

mod bessel;
mod gamma;
mod integrals;
mod kernels;
mod quadrature;

pub use bessel::{bessel_j, bold_j, SpectralPoint, SERIES_MAX_ABS, T_EPS};
pub use gamma::{complex_gamma, ln_gamma, rgamma};
pub(crate) use integrals::h_geometric2_value;
pub use integrals::{
    h_geometric0, h_geometric2, h_spectral, plancherel_closed_form, plancherel_h,
    plancherel_quadrature, small_z_constant, Estimate, PlancherelValue,
};
pub use kernels::{angular_kernel, kernels, psi, radial_kernel, trh, KernelValues, TestFunction};
pub use quadrature::{gauss_legendre, QuadratureConfig};
