#pragma once

#include <string>

#include "esmda/la.hpp"

namespace esmda {

/// Inflation-coefficient sequence alpha_1..alpha_Na. Each coefficient must
/// be positive; a schedule only samples the posterior correctly when the
/// reciprocals sum to one, which validate() checks.
class AlphaSchedule {
public:
    AlphaSchedule() = default;

    /// [n_a, n_a, ..., n_a]: the equal-weight choice.
    static AlphaSchedule equal_weights(std::size_t n_a);

    /// Geometrically decreasing alpha_l = a * ratio^(l-1), ratio in (0,1),
    /// with a fixed in closed form so the reciprocals sum to one.
    static AlphaSchedule geometric_decreasing(std::size_t n_a, double ratio);

    /// User-supplied coefficients; positivity enforced, normalization not
    /// (callers decide what to do with a failing validate()).
    static AlphaSchedule from_values(la::Vector alphas);

    const la::Vector& values() const noexcept { return alphas_; }
    std::size_t length() const noexcept { return alphas_.size(); }

    friend bool operator==(const AlphaSchedule&, const AlphaSchedule&) = default;

private:
    explicit AlphaSchedule(la::Vector alphas) : alphas_(std::move(alphas)) {}
    la::Vector alphas_;
};

struct ScheduleValidation {
    bool ok = false;
    double residual = 0.0; // sum of reciprocals minus one
    std::string message;
};

/// Accepts iff all coefficients are positive and |sum(1/alpha) - 1| is
/// within 1e-12.
ScheduleValidation validate(const AlphaSchedule& schedule);

} // namespace esmda
