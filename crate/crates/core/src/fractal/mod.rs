//! Self-affine rough surfaces: Fourier-filter generation, circular and square
//! patch sampling, the m = 0 disk-harmonic power spectrum and Hurst fits.

mod grid;
mod patch;
mod spectrum;

pub use grid::{generate_surface, iso_power_law, HeightGrid, PowerLawSpec};
pub use patch::{
    random_patch_centers, sample_circular_patch, sample_patch, sample_square_patch, Patch,
};
pub use spectrum::{
    fit_hurst, fit_hurst_with_floor, psd_m0, HurstFit, Spectrum, SpectrumAxis, DEFAULT_FLOOR,
};
