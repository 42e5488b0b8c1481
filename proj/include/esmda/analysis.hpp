#pragma once

#include <cstdint>
#include <vector>

#include "esmda/ensemble.hpp"
#include "esmda/la.hpp"
#include "esmda/rng.hpp"

namespace esmda {

/// Diagonal data-error covariance, stored as per-datum standard deviations.
/// The full matrix is never materialized.
class NoiseModel {
public:
    NoiseModel() = default;
    explicit NoiseModel(la::Vector std_devs);

    std::size_t dim() const noexcept { return std_devs_.size(); }
    const la::Vector& std_devs() const noexcept { return std_devs_; }

    /// Indices with zero standard deviation (exactly known data).
    std::vector<std::size_t> zero_indices() const;

    friend bool operator==(const NoiseModel&, const NoiseModel&) = default;

private:
    la::Vector std_devs_;
};

struct SolverChoice {
    enum class Mode { dense, subspace };
    Mode mode = Mode::dense;
    /// Fraction of squared-singular-value energy retained by the subspace
    /// truncation.
    double energy_fraction = 0.999;

    friend bool operator==(const SolverChoice&, const SolverChoice&) = default;
};

/// Draws the perturbed data d_hist + sqrt(alpha) * sigma * z per member,
/// one row per member, using the (iteration, member)-keyed substreams.
la::Matrix perturb_observations(const la::Vector& d_hist,
                                const NoiseModel& noise, double alpha,
                                const rng::StreamFactory& streams,
                                std::uint64_t iteration, std::size_t n_e);

/// Same, with the standard-normal draws supplied (one member per row).
la::Matrix perturb_observations_with(const la::Vector& d_hist,
                                     const NoiseModel& noise, double alpha,
                                     const la::Matrix& normals);

/// Parameter increments for one analysis step, N_m-by-N_e, column j being
/// the update of member j:
///
///   increment_j = C_md (alpha C_D + C_dd)^-1 residual_j
///
/// with `residuals` the N_d-by-N_e matrix of perturbed-minus-simulated
/// data. The covariance matrices are formed explicitly and the system is
/// solved by Cholesky factorization; on breakdown a tiny diagonal jitter
/// is added once before giving up.
la::Matrix dense_increment(const Ensemble& models, const Ensemble& sims,
                           const la::Matrix& residuals,
                           const NoiseModel& noise, double alpha);

/// Same increment computed in the ensemble subspace: the data anomalies
/// are scaled by 1/sigma, decomposed by a thin SVD truncated to the
/// requested energy fraction, and the gain is applied through the factors
///
///   increment = (A_m V_r) diag(s_i / (alpha + s_i^2)) (U_r^T R~)
///
/// so no N_m-by-N_d or N_d-by-N_d matrix is ever formed. At full retention
/// and full anomaly rank this equals the dense path to rounding.
la::Matrix subspace_increment(const Ensemble& models, const Ensemble& sims,
                              const la::Matrix& residuals,
                              const NoiseModel& noise, double alpha,
                              const SolverChoice& choice);

/// One analysis step: members updated with dense_increment, iteration
/// index incremented. `perturbed` has one perturbed-data row per member.
Ensemble analysis_update_dense(const Ensemble& models, const Ensemble& sims,
                               const la::Matrix& perturbed,
                               const NoiseModel& noise, double alpha);

/// One analysis step through the subspace solver. Requires strictly
/// positive noise on every datum.
Ensemble analysis_update_subspace(const Ensemble& models, const Ensemble& sims,
                                  const la::Matrix& perturbed,
                                  const NoiseModel& noise, double alpha,
                                  const SolverChoice& choice);

/// Normalized data mismatch per member,
/// phi_j = mean over usable data of ((d_sim - d_hist) / sigma)^2.
/// Data with zero sigma are excluded from the average and reported.
struct MismatchReport {
    la::Vector per_member;
    double mean = 0.0;
    std::vector<std::size_t> excluded;
};
MismatchReport data_mismatch(const Ensemble& sims, const la::Vector& d_hist,
                             const NoiseModel& noise);

} // namespace esmda
