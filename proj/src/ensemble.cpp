#include "esmda/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "esmda/csv.hpp"
#include "esmda/errors.hpp"
#include "esmda/kernels.hpp"

namespace esmda {

Ensemble::Ensemble(la::Matrix members, int iteration_index)
    : members_(std::move(members)), iteration_index_(iteration_index) {
    if (members_.rows() < 2)
        throw std::invalid_argument(
            "ensemble needs at least 2 members, got " +
            std::to_string(members_.rows()));
    if (members_.cols() == 0)
        throw std::invalid_argument("ensemble members must be non-empty vectors");
    if (!members_.all_finite())
        throw std::invalid_argument("ensemble contains non-finite entries");
    if (iteration_index_ < 0)
        throw std::invalid_argument("iteration index must be >= 0");
}

Ensemble Ensemble::from_members(const std::vector<la::Vector>& members,
                                int iteration_index) {
    if (members.empty())
        throw std::invalid_argument("ensemble needs at least 2 members, got 0");
    la::Matrix m(members.size(), members.front().size());
    for (std::size_t j = 0; j < members.size(); ++j) {
        if (members[j].size() != m.cols())
            throw std::invalid_argument("ensemble members differ in length");
        std::copy(members[j].begin(), members[j].end(), m.row(j));
    }
    return Ensemble(std::move(m), iteration_index);
}

la::Vector Ensemble::member_vector(std::size_t j) const {
    return la::Vector(member(j), member(j) + dim());
}

GaussianPrior::GaussianPrior(la::Vector mean, la::Matrix lower_factor)
    : mean_(std::move(mean)), factor_(std::move(lower_factor)) {
    if (factor_.rows() != factor_.cols() || factor_.rows() != mean_.size())
        throw std::invalid_argument(
            "prior factor must be square with the mean's dimension");
    for (double v : mean_)
        if (!std::isfinite(v))
            throw std::invalid_argument("prior mean contains non-finite entries");
    if (!factor_.all_finite())
        throw std::invalid_argument("prior factor contains non-finite entries");
    for (std::size_t i = 0; i < factor_.rows(); ++i)
        for (std::size_t j = i + 1; j < factor_.cols(); ++j)
            if (factor_(i, j) != 0.0)
                throw std::invalid_argument(
                    "prior covariance factor must be lower triangular");
}

GaussianPrior GaussianPrior::from_covariance(la::Vector mean,
                                             const la::Matrix& covariance) {
    auto chol = la::cholesky(covariance);
    if (!chol.ok)
        throw ConfigError(
            "prior covariance is not symmetric positive definite "
            "(factorization failed at row " +
            std::to_string(chol.failed_index) + ")");
    return GaussianPrior(std::move(mean), std::move(chol.lower));
}

bool GaussianPrior::full_rank() const {
    for (std::size_t i = 0; i < factor_.rows(); ++i)
        if (!(factor_(i, i) > 0.0))
            return false;
    return !mean_.empty();
}

Ensemble sample_prior(const GaussianPrior& prior, std::size_t n_e,
                      const rng::StreamFactory& streams) {
    const std::size_t n_m = prior.dim();
    la::Matrix normals(n_e, n_m);
    for (std::size_t j = 0; j < n_e; ++j) {
        auto stream = streams.stream(rng::Purpose::prior_sample, 0, j);
        for (std::size_t i = 0; i < n_m; ++i)
            normals(j, i) = stream.next_normal();
    }
    return sample_prior_with(prior, normals);
}

Ensemble sample_prior_with(const GaussianPrior& prior,
                           const la::Matrix& normals) {
    if (normals.rows() < 2)
        throw std::invalid_argument(
            "ensemble needs at least 2 members, got " +
            std::to_string(normals.rows()));
    if (normals.cols() != prior.dim())
        throw std::invalid_argument("normal draws do not match prior dimension");
    const std::size_t n_m = prior.dim();
    const la::Matrix& l = prior.covariance_factor();
    la::Matrix members(normals.rows(), n_m);
    for (std::size_t j = 0; j < normals.rows(); ++j) {
        const double* z = normals.row(j);
        double* m = members.row(j);
        for (std::size_t i = 0; i < n_m; ++i)
            m[i] = prior.mean()[i] + kernels::dot(l.row(i), z, i + 1);
    }
    return Ensemble(std::move(members), 0);
}

la::Vector ensemble_mean(const Ensemble& e) {
    la::Vector mean(e.dim(), 0.0);
    for (std::size_t j = 0; j < e.size(); ++j)
        kernels::axpy(1.0, e.member(j), mean.data(), e.dim());
    kernels::scal(1.0 / static_cast<double>(e.size()), mean.data(), e.dim());
    return mean;
}

la::Matrix anomalies(const Ensemble& e) {
    const la::Vector mean = ensemble_mean(e);
    const double factor = 1.0 / std::sqrt(static_cast<double>(e.size()) - 1.0);
    la::Matrix a(e.dim(), e.size());
    for (std::size_t j = 0; j < e.size(); ++j) {
        const double* m = e.member(j);
        for (std::size_t i = 0; i < e.dim(); ++i)
            a(i, j) = (m[i] - mean[i]) * factor;
    }
    return a;
}

CrossCovariance cross_covariances(const Ensemble& models,
                                  const Ensemble& sims) {
    if (models.size() != sims.size())
        throw std::invalid_argument(
            "ensembles differ in size: " + std::to_string(models.size()) +
            " models vs " + std::to_string(sims.size()) + " simulations");
    const la::Matrix a_m = anomalies(models);
    const la::Matrix a_d = anomalies(sims);
    CrossCovariance cov;
    cov.model_data = la::matmul_abt(a_m, a_d);
    // Data auto covariance: compute the upper triangle, mirror the rest.
    const std::size_t n_d = a_d.rows();
    cov.data_data = la::Matrix(n_d, n_d);
    for (std::size_t i = 0; i < n_d; ++i)
        for (std::size_t j = i; j < n_d; ++j) {
            const double v = kernels::dot(a_d.row(i), a_d.row(j), a_d.cols());
            cov.data_data(i, j) = v;
            cov.data_data(j, i) = v;
        }
    return cov;
}

void write_ensemble_csv(const Ensemble& e, std::ostream& out,
                        std::string_view column_prefix) {
    for (std::size_t i = 0; i < e.dim(); ++i) {
        if (i > 0)
            out << ',';
        out << column_prefix << i;
    }
    out << '\n';
    for (std::size_t j = 0; j < e.size(); ++j)
        csv::write_row(out, e.member(j), e.dim());
}

Ensemble read_ensemble_csv(std::istream& in, const std::string& source,
                           int iteration_index) {
    csv::Table t = csv::read_table(in, source);
    if (t.values.rows() < 2)
        throw ConfigError(source + ": ensemble CSV needs at least 2 member rows");
    return Ensemble(std::move(t.values), iteration_index);
}

} // namespace esmda
