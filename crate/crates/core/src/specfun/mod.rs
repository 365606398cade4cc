//! Bessel functions, spherical harmonics and the tangent vector harmonics.

mod cylinder;
mod harmonics;
mod scaled;
mod spherical;

pub use cylinder::{cylinder_bessel, cylinder_bessel_array, cylinder_bessel_zeros};
pub use harmonics::{
    cross, dot, gauss_legendre, real_spherical_harmonic, vector_harmonics, HarmonicIndex,
    SurfacePoint, Vec3,
};
pub use scaled::{scaled_bessel, ScaledBessel};
pub(crate) use spherical::bisect;
pub use spherical::{
    bessel_zeros, spherical_bessel, spherical_bessel_array, spherical_bessel_d2,
    spherical_bessel_origin, spherical_bessel_over_x,
};
