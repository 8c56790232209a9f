//! Attacks and analytic calculators: the LLL-based solver for noiseless
//! CLWE, the covariance eigenvalue distinguisher, statistical-query
//! pairwise-correlation evaluation (closed form and Monte-Carlo), the SQ
//! query-bound calculator, packing-set generation, the density-equality
//! tester, and total-variation quadrature.

mod covariance;
mod lll_attack;
mod sq;
mod tv;

pub use covariance::{
    covariance_distinguisher, sample_covariance, symmetric_eigenvalues, CovarianceAccumulator,
    CovarianceReport, Decision,
};
pub use lll_attack::{solve_noiseless_clwe, NoiselessSolveReport};
pub use sq::{
    generate_packing, sq_corr_closed_form, sq_corr_monte_carlo, sq_query_lower_bound,
    SqBoundParams, SqCorrParams, SqCorrValue,
};
pub use tv::{
    adaptive_simpson, density_equality_test, hclwe_tv_lower_estimate, truncation_tv_estimate,
};
