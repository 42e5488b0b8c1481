#include "esmda/oracle.hpp"

#include <cmath>
#include <cstddef>
#include <string>

#include "esmda/errors.hpp"
#include "esmda/kernels.hpp"

namespace esmda {

GaussianPosterior exact_posterior(const GaussianPrior& prior,
                                  const LinearModel& model,
                                  const la::Vector& d_hist,
                                  const NoiseModel& noise) {
    const std::size_t n_m = model.n_m();
    const std::size_t n_d = model.n_d();
    if (prior.dim() != n_m) {
        throw ConfigError("exact posterior: prior has dimension " +
                          std::to_string(prior.dim()) +
                          " but the linear operator expects " +
                          std::to_string(n_m));
    }
    if (d_hist.size() != n_d || noise.dim() != n_d) {
        throw ConfigError("exact posterior: operator produces " +
                          std::to_string(n_d) + " data but d_hist has " +
                          std::to_string(d_hist.size()) + " and sigma has " +
                          std::to_string(noise.dim()));
    }
    if (!noise.zero_indices().empty()) {
        throw ConfigError("exact posterior requires positive noise on every "
                          "datum; sigma is zero at data index " +
                          std::to_string(noise.zero_indices().front()));
    }
    if (!prior.full_rank()) {
        throw ConfigError("exact posterior requires a full-rank prior "
                          "covariance factor");
    }

    const la::Matrix& g = model.matrix();
    const la::Matrix& l = prior.covariance_factor();
    const la::Matrix c_m = la::matmul_abt(l, l);

    // S = G C_M G^T + C_D, factored once and reused for mean and covariance.
    const la::Matrix gc = la::matmul(g, c_m);
    la::Matrix s = la::matmul_abt(gc, g);
    for (std::size_t i = 0; i < n_d; ++i) {
        s(i, i) += noise.std_devs()[i] * noise.std_devs()[i];
    }
    const la::CholeskyResult chol = la::cholesky(s);
    if (!chol.ok) {
        throw NumericalError(
            "exact posterior: G C_M G^T + C_D is not positive definite "
            "(pivot " +
            std::to_string(chol.failed_index) + ")");
    }

    la::Vector innovation(n_d);
    const la::Vector sim = model.evaluate(prior.mean());
    for (std::size_t i = 0; i < n_d; ++i) {
        innovation[i] = d_hist[i] - sim[i];
    }
    la::cholesky_solve_in_place(chol.lower, innovation);

    // cmgt = C_M G^T = gc^T, reused as the left factor of the gain.
    const la::Matrix cmgt = la::transpose(gc);
    GaussianPosterior post;
    post.mean = prior.mean();
    for (std::size_t i = 0; i < n_m; ++i) {
        post.mean[i] += kernels::dot(cmgt.row(i), innovation.data(), n_d);
    }

    la::Matrix solved = gc; // S^-1 G C_M, one triangular solve per column
    la::cholesky_solve_rows(chol.lower, solved);
    post.covariance = c_m;
    const la::Matrix reduction = la::matmul(cmgt, solved);
    for (std::size_t i = 0; i < n_m; ++i) {
        for (std::size_t j = 0; j < n_m; ++j) {
            post.covariance(i, j) -= reduction(i, j);
        }
    }
    for (std::size_t i = 0; i < n_m; ++i) { // symmetrize rounding residue
        for (std::size_t j = i + 1; j < n_m; ++j) {
            const double v = 0.5 * (post.covariance(i, j) + post.covariance(j, i));
            post.covariance(i, j) = v;
            post.covariance(j, i) = v;
        }
    }
    return post;
}

DistanceReport posterior_distance(const Ensemble& ensemble,
                                  const GaussianPosterior& truth) {
    const std::size_t n_m = truth.mean.size();
    if (ensemble.dim() != n_m) {
        throw ConfigError("posterior distance: ensemble members have "
                          "dimension " +
                          std::to_string(ensemble.dim()) +
                          " but the reference posterior has " +
                          std::to_string(n_m));
    }

    DistanceReport report;
    const la::Vector mean = ensemble_mean(ensemble);
    report.mean_error.resize(n_m);
    for (std::size_t i = 0; i < n_m; ++i) {
        const double sd = std::sqrt(truth.covariance(i, i));
        if (!(sd > 0.0)) {
            throw ConfigError("posterior distance: reference covariance has "
                              "non-positive variance at component " +
                              std::to_string(i));
        }
        report.mean_error[i] = std::abs(mean[i] - truth.mean[i]) / sd;
    }

    const la::Matrix a = anomalies(ensemble);
    const la::Matrix sample_cov = la::matmul_abt(a, a);
    const double scale = la::max_abs(truth.covariance);
    report.covariance_error =
        la::max_abs_diff(sample_cov, truth.covariance) / scale;
    return report;
}

} // namespace esmda
