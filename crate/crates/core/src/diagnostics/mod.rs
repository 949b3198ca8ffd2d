//! Derived sequences and estimators: running maxima and record times,
//! signed maxima, ratio tracks, the fluctuation ratios `lambda` and
//! `lambda_2`, limsup proxies against auxiliary scalers, modulation
//! residuals, phi-moment time averages and the pathwise a-priori estimates.

mod divergence;
mod maxima;
mod moments;
mod pathwise;
mod regime;
mod scaling;
mod track;

pub use divergence::{
    detect_divergence, ladder_growth_exponent, least_squares_slope, DivergenceEvidence,
    DivergenceRule,
};
pub use maxima::{running_max_abs, running_signed_max, MaxTrack, Side};
pub use moments::{phi_time_average, pth_moment_track, ConvexWeight, ConvexWeightSpec};
pub use pathwise::{check_pathwise, Inequality, PathwiseCheck, PATHWISE_REL_SLACK};
pub use regime::{estimate, estimate_lambda, estimate_lambda2, Regime, RegimeEstimate};
pub use scaling::{
    lambda_a_residual, tail_sup_ratio, tail_window, SupKind, DEFAULT_TAIL_FRACTION,
};
pub use track::{default_guard, ratio_track, Track, WindowSummary, FINAL_WINDOW};
