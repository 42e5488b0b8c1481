#include "esmda/analysis.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "esmda/errors.hpp"
#include "esmda/kernels.hpp"

namespace esmda {

namespace {

void check_aligned(const Ensemble& models, const Ensemble& sims,
                   const la::Matrix& residuals, const NoiseModel& noise) {
    if (models.size() != sims.size())
        throw std::invalid_argument(
            "model and simulation ensembles differ in size: " +
            std::to_string(models.size()) + " vs " +
            std::to_string(sims.size()));
    if (sims.dim() != noise.dim())
        throw std::invalid_argument(
            "noise model dimension " + std::to_string(noise.dim()) +
            " does not match data dimension " + std::to_string(sims.dim()));
    if (residuals.rows() != sims.dim() || residuals.cols() != sims.size())
        throw std::invalid_argument(
            "residual matrix shape " + std::to_string(residuals.rows()) + "x" +
            std::to_string(residuals.cols()) + " does not match N_d x N_e " +
            std::to_string(sims.dim()) + "x" + std::to_string(sims.size()));
}

void check_alpha(double alpha) {
    if (!(alpha > 0.0) || !std::isfinite(alpha))
        throw std::invalid_argument("inflation coefficient must be positive");
}

/// residual matrix N_d-by-N_e, column j = perturbed_j - simulated_j.
la::Matrix residual_matrix(const Ensemble& sims, const la::Matrix& perturbed) {
    if (perturbed.rows() != sims.size() || perturbed.cols() != sims.dim())
        throw std::invalid_argument(
            "perturbed data shape " + std::to_string(perturbed.rows()) + "x" +
            std::to_string(perturbed.cols()) + " does not match ensemble " +
            std::to_string(sims.size()) + "x" + std::to_string(sims.dim()));
    la::Matrix r(sims.dim(), sims.size());
    for (std::size_t j = 0; j < sims.size(); ++j) {
        const double* p = perturbed.row(j);
        const double* d = sims.member(j);
        for (std::size_t k = 0; k < sims.dim(); ++k)
            r(k, j) = p[k] - d[k];
    }
    return r;
}

Ensemble apply_increment(const Ensemble& models, const la::Matrix& increment) {
    la::Matrix updated = models.members();
    for (std::size_t j = 0; j < models.size(); ++j) {
        double* m = updated.row(j);
        for (std::size_t i = 0; i < models.dim(); ++i)
            m[i] += increment(i, j);
    }
    return Ensemble(std::move(updated), models.iteration_index() + 1);
}

} // namespace

NoiseModel::NoiseModel(la::Vector std_devs) : std_devs_(std::move(std_devs)) {
    for (double s : std_devs_)
        if (!(s >= 0.0) || !std::isfinite(s))
            throw std::invalid_argument(
                "noise standard deviations must be finite and >= 0");
}

std::vector<std::size_t> NoiseModel::zero_indices() const {
    std::vector<std::size_t> idx;
    for (std::size_t k = 0; k < std_devs_.size(); ++k)
        if (std_devs_[k] == 0.0)
            idx.push_back(k);
    return idx;
}

la::Matrix perturb_observations(const la::Vector& d_hist,
                                const NoiseModel& noise, double alpha,
                                const rng::StreamFactory& streams,
                                std::uint64_t iteration, std::size_t n_e) {
    check_alpha(alpha);
    la::Matrix normals(n_e, d_hist.size());
    for (std::size_t j = 0; j < n_e; ++j) {
        auto stream =
            streams.stream(rng::Purpose::data_perturbation, iteration, j);
        for (std::size_t k = 0; k < d_hist.size(); ++k)
            normals(j, k) = stream.next_normal();
    }
    return perturb_observations_with(d_hist, noise, alpha, normals);
}

la::Matrix perturb_observations_with(const la::Vector& d_hist,
                                     const NoiseModel& noise, double alpha,
                                     const la::Matrix& normals) {
    check_alpha(alpha);
    if (d_hist.size() != noise.dim())
        throw std::invalid_argument(
            "historical data length " + std::to_string(d_hist.size()) +
            " does not match noise dimension " + std::to_string(noise.dim()));
    if (normals.cols() != d_hist.size())
        throw std::invalid_argument("normal draws do not match data dimension");
    const double root_alpha = std::sqrt(alpha);
    la::Matrix perturbed(normals.rows(), d_hist.size());
    for (std::size_t j = 0; j < normals.rows(); ++j) {
        const double* z = normals.row(j);
        double* p = perturbed.row(j);
        for (std::size_t k = 0; k < d_hist.size(); ++k)
            p[k] = d_hist[k] + root_alpha * noise.std_devs()[k] * z[k];
    }
    return perturbed;
}

la::Matrix dense_increment(const Ensemble& models, const Ensemble& sims,
                           const la::Matrix& residuals,
                           const NoiseModel& noise, double alpha) {
    check_aligned(models, sims, residuals, noise);
    check_alpha(alpha);
    const std::size_t n_d = sims.dim();

    const CrossCovariance cov = cross_covariances(models, sims);
    la::Matrix system = cov.data_data;
    for (std::size_t k = 0; k < n_d; ++k)
        system(k, k) += alpha * noise.std_devs()[k] * noise.std_devs()[k];

    auto chol = la::cholesky(system);
    if (!chol.ok) {
        // Rank-deficient C_dd with (near-)zero noise; retry once with a
        // trace-scaled jitter before reporting the singularity.
        double trace = 0.0;
        for (std::size_t k = 0; k < n_d; ++k)
            trace += system(k, k);
        const double jitter = 1e-12 * trace / static_cast<double>(n_d);
        la::Matrix retry = system;
        for (std::size_t k = 0; k < n_d; ++k)
            retry(k, k) += jitter;
        chol = la::cholesky(retry);
        if (!chol.ok) {
            std::ostringstream msg;
            msg << "analysis matrix (alpha*C_D + C_dd) is singular at data index "
                << chol.failed_index;
            std::vector<std::size_t> degenerate;
            for (std::size_t k = 0; k < n_d; ++k)
                if (system(k, k) == 0.0)
                    degenerate.push_back(k);
            if (!degenerate.empty()) {
                msg << "; zero-variance data indices:";
                for (std::size_t k : degenerate)
                    msg << ' ' << k;
            }
            throw NumericalError(msg.str());
        }
    }

    la::Matrix solved = residuals; // N_d-by-N_e
    la::cholesky_solve_rows(chol.lower, solved);

    la::Matrix increment(models.dim(), models.size());
    for (std::size_t i = 0; i < models.dim(); ++i)
        for (std::size_t k = 0; k < n_d; ++k)
            kernels::axpy(cov.model_data(i, k), solved.row(k),
                          increment.row(i), models.size());
    return increment;
}

la::Matrix subspace_increment(const Ensemble& models, const Ensemble& sims,
                              const la::Matrix& residuals,
                              const NoiseModel& noise, double alpha,
                              const SolverChoice& choice) {
    check_aligned(models, sims, residuals, noise);
    check_alpha(alpha);
    if (!(choice.energy_fraction > 0.0) || choice.energy_fraction > 1.0)
        throw std::invalid_argument("energy fraction must lie in (0, 1]");
    const std::size_t n_d = sims.dim();
    const std::size_t n_e = sims.size();
    for (std::size_t k = 0; k < n_d; ++k)
        if (noise.std_devs()[k] == 0.0)
            throw std::invalid_argument(
                "subspace solver requires positive noise on every datum; "
                "sigma is zero at data index " + std::to_string(k));

    // Scale data anomalies and residuals to unit noise.
    const la::Matrix a_d = anomalies(sims);
    la::Matrix scaled_anomalies(n_d, n_e);
    la::Matrix scaled_residuals(n_d, n_e);
    for (std::size_t k = 0; k < n_d; ++k) {
        const double inv_sigma = 1.0 / noise.std_devs()[k];
        kernels::shift_scale(a_d.row(k), 0.0, inv_sigma,
                             scaled_anomalies.row(k), n_e);
        kernels::shift_scale(residuals.row(k), 0.0, inv_sigma,
                             scaled_residuals.row(k), n_e);
    }

    // Thin SVD of the scaled anomalies (decompose the transpose: tall and
    // kernel-friendly). Rows of svd.right_t span the data subspace, rows
    // of svd.left_t the ensemble subspace.
    const la::ThinSvd svd = la::thin_svd(la::transpose(scaled_anomalies));

    double total_energy = 0.0;
    for (double s : svd.singular)
        total_energy += s * s;
    std::size_t rank = 0;
    double cumulative = 0.0;
    while (rank < svd.singular.size() && cumulative < choice.energy_fraction * total_energy &&
           svd.singular[rank] > 0.0) {
        cumulative += svd.singular[rank] * svd.singular[rank];
        ++rank;
    }

    la::Matrix increment(models.dim(), n_e); // zero when rank == 0
    if (rank == 0)
        return increment;

    // w = U_r^T R~, one retained mode per row.
    la::Matrix w(rank, n_e);
    for (std::size_t i = 0; i < rank; ++i)
        for (std::size_t k = 0; k < n_d; ++k)
            kernels::axpy(svd.right_t(i, k), scaled_residuals.row(k), w.row(i),
                          n_e);
    for (std::size_t i = 0; i < rank; ++i) {
        const double s = svd.singular[i];
        kernels::scal(s / (alpha + s * s), w.row(i), n_e);
    }

    // projected = A_m V_r (N_m-by-rank), then increment = projected w.
    const la::Matrix a_m = anomalies(models);
    la::Matrix projected(models.dim(), rank);
    for (std::size_t i = 0; i < models.dim(); ++i)
        for (std::size_t l = 0; l < rank; ++l)
            projected(i, l) = kernels::dot(a_m.row(i), svd.left_t.row(l), n_e);
    for (std::size_t i = 0; i < models.dim(); ++i)
        for (std::size_t l = 0; l < rank; ++l)
            kernels::axpy(projected(i, l), w.row(l), increment.row(i), n_e);
    return increment;
}

Ensemble analysis_update_dense(const Ensemble& models, const Ensemble& sims,
                               const la::Matrix& perturbed,
                               const NoiseModel& noise, double alpha) {
    const la::Matrix residuals = residual_matrix(sims, perturbed);
    return apply_increment(models,
                           dense_increment(models, sims, residuals, noise, alpha));
}

Ensemble analysis_update_subspace(const Ensemble& models, const Ensemble& sims,
                                  const la::Matrix& perturbed,
                                  const NoiseModel& noise, double alpha,
                                  const SolverChoice& choice) {
    const la::Matrix residuals = residual_matrix(sims, perturbed);
    return apply_increment(
        models, subspace_increment(models, sims, residuals, noise, alpha, choice));
}

MismatchReport data_mismatch(const Ensemble& sims, const la::Vector& d_hist,
                             const NoiseModel& noise) {
    if (sims.dim() != d_hist.size() || sims.dim() != noise.dim())
        throw std::invalid_argument(
            "data mismatch: dimensions disagree (sims " +
            std::to_string(sims.dim()) + ", d_hist " +
            std::to_string(d_hist.size()) + ", noise " +
            std::to_string(noise.dim()) + ")");
    MismatchReport report;
    report.excluded = noise.zero_indices();
    const std::size_t used = noise.dim() - report.excluded.size();

    la::Vector weights(noise.dim());
    for (std::size_t k = 0; k < noise.dim(); ++k)
        weights[k] =
            noise.std_devs()[k] > 0.0 ? 1.0 / noise.std_devs()[k] : 0.0;

    report.per_member.resize(sims.size(), 0.0);
    if (used == 0)
        return report;
    for (std::size_t j = 0; j < sims.size(); ++j) {
        const double ssq = kernels::weighted_ssq(sims.member(j), d_hist.data(),
                                                 weights.data(), sims.dim());
        report.per_member[j] = ssq / static_cast<double>(used);
    }
    report.mean = kernels::sum(report.per_member.data(), sims.size()) /
                  static_cast<double>(sims.size());
    return report;
}

} // namespace esmda
