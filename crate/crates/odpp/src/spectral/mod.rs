//! State-transition graphs, Laplacian spectra and spectral state features.

mod graph;
mod learn;
mod spectrum;

pub use graph::{build_graph, laplacian, SpectralError, TransitionGraph};
pub use learn::{learn_spectrum_sgd, spectral_loss, spectral_loss_grad, LearnedSpectrum};
pub use spectrum::{
    fiedler, spectrum, state_feature, LaplacianSpectrum, StateFeatureMap, ZERO_EIGENVALUE_TOL,
};
