#pragma once

#include <cstddef>
#include <iosfwd>
#include <string_view>

#include "esmda/la.hpp"
#include "esmda/rng.hpp"

namespace esmda {

/// A set of realizations, stored one member per row. Holds either model
/// vectors (length N_m) or simulated-data vectors (length N_d). Immutable
/// after construction.
class Ensemble {
public:
    Ensemble() = default;

    /// `members` has one realization per row; at least two rows, all
    /// entries finite.
    explicit Ensemble(la::Matrix members, int iteration_index = 0);

    static Ensemble from_members(const std::vector<la::Vector>& members,
                                 int iteration_index = 0);

    std::size_t size() const noexcept { return members_.rows(); } // N_e
    std::size_t dim() const noexcept { return members_.cols(); }

    const la::Matrix& members() const noexcept { return members_; }
    const double* member(std::size_t j) const { return members_.row(j); }
    la::Vector member_vector(std::size_t j) const;

    int iteration_index() const noexcept { return iteration_index_; }

private:
    la::Matrix members_;
    int iteration_index_ = 0;
};

/// Gaussian prior given by its mean and a lower-triangular factor L with
/// L L^T equal to the prior covariance. Sampling never factorizes anything
/// at run time; use from_covariance() to Cholesky-factor a full SPD matrix
/// once. A zero or rank-deficient factor is allowed for degenerate priors;
/// full_rank() reports whether every diagonal entry is positive.
class GaussianPrior {
public:
    GaussianPrior() = default;
    GaussianPrior(la::Vector mean, la::Matrix lower_factor);

    static GaussianPrior from_covariance(la::Vector mean,
                                         const la::Matrix& covariance);

    std::size_t dim() const noexcept { return mean_.size(); }
    const la::Vector& mean() const noexcept { return mean_; }
    const la::Matrix& covariance_factor() const noexcept { return factor_; }
    bool full_rank() const;

    friend bool operator==(const GaussianPrior&, const GaussianPrior&) = default;

private:
    la::Vector mean_;
    la::Matrix factor_;
};

/// Ensemble sample covariances consumed by the analysis step:
/// `model_data` is the N_m-by-N_d cross covariance between parameters and
/// simulated data, `data_data` the N_d-by-N_d data auto covariance.
struct CrossCovariance {
    la::Matrix model_data;
    la::Matrix data_data;
};

/// Draws n_e realizations mean + L z, one substream per member.
Ensemble sample_prior(const GaussianPrior& prior, std::size_t n_e,
                      const rng::StreamFactory& streams);

/// Same, with the standard-normal draws supplied (one member per row).
Ensemble sample_prior_with(const GaussianPrior& prior,
                           const la::Matrix& normals);

/// Componentwise mean, summed in ascending member order.
la::Vector ensemble_mean(const Ensemble& e);

/// Deviations from the mean scaled by 1/sqrt(N_e - 1), one column per
/// member (dim-by-N_e), so A A^T is the unbiased sample covariance.
la::Matrix anomalies(const Ensemble& e);

CrossCovariance cross_covariances(const Ensemble& models,
                                  const Ensemble& sims);

/// One row per member, one column per component, header prefix0..prefixN-1.
void write_ensemble_csv(const Ensemble& e, std::ostream& out,
                        std::string_view column_prefix = "m_");

Ensemble read_ensemble_csv(std::istream& in, const std::string& source,
                           int iteration_index = 0);

} // namespace esmda
