#pragma once

#include "esmda/analysis.hpp"
#include "esmda/ensemble.hpp"
#include "esmda/forward.hpp"
#include "esmda/la.hpp"

namespace esmda {

struct GaussianPosterior {
    la::Vector mean;
    la::Matrix covariance;
};

/// Closed-form posterior of a linear-Gaussian inverse problem:
///   mean = m_pr + C_M G^T (G C_M G^T + C_D)^-1 (d - G m_pr - bias)
///   cov  = C_M - C_M G^T (G C_M G^T + C_D)^-1 G C_M
/// Requires a full-rank prior and strictly positive noise.
GaussianPosterior exact_posterior(const GaussianPrior& prior,
                                  const LinearModel& model,
                                  const la::Vector& d_hist,
                                  const NoiseModel& noise);

/// How far an ensemble's first two moments are from a reference posterior:
/// absolute per-component mean error in posterior-standard-deviation units,
/// and the max-norm relative error of the sample covariance.
struct DistanceReport {
    la::Vector mean_error;
    double covariance_error = 0.0;
};
DistanceReport posterior_distance(const Ensemble& ensemble,
                                  const GaussianPosterior& truth);

} // namespace esmda
