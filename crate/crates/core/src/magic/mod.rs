//! Magic quantifiers, variance bounds and closed forms.
//!
//! Unit convention: every [`VarianceBounds`] is on the variance scale of the
//! 1/2-DFE estimator, i.e. squares of ℓ₁-scale quantities.

mod haar;
mod hypergraph;
mod norms;
mod special;

pub use haar::{
    dirichlet_sqrt_pair_moment, haar_l1_asymptote, haar_l1_mean_closed_form, haar_l1_monte_carlo,
    haar_stripped_l1_estimate, haar_stripped_l1_monte_carlo, ln_haar_l1_mixed_term,
    StrippedEstimate, StrippedPrefactor, CLOSED_FORM_MAX_QUBITS, DIRICHLET_MAX_QUBITS,
};
pub use hypergraph::{
    complete3_variance_bounds, hollow_symmetric_rank_count, hypergraph_derivative_matrix,
    hypergraph_variance_bounds, rank_distribution, HypergraphPoly,
};
pub use norms::{dfe_variance_bound, norms, norms_from_coeffs, NormReport};
pub use special::{incomplete_beta, ln_beta, ln_incomplete_beta, regularized_incomplete_beta};

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundMethod {
    SampledRank,
    ClosedFormComplete,
    NormFormula,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VarianceBounds {
    pub lower: f64,
    pub upper: f64,
    pub method: BoundMethod,
}

impl VarianceBounds {
    /// `log₂(bound)/n`, which tends to one when the variance scales as 2^n.
    pub fn normalized(&self, n: usize) -> (f64, f64) {
        (self.lower.log2() / n as f64, self.upper.log2() / n as f64)
    }

    pub fn contains(&self, x: f64, slack: f64) -> bool {
        x >= self.lower - slack && x <= self.upper + slack
    }
}
