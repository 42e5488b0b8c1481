#include "esmda/alpha.hpp"

#include <cmath>
#include <stdexcept>

#include "esmda/csv.hpp"

namespace esmda {

namespace {
constexpr double kNormalizationTol = 1e-12;
}

AlphaSchedule AlphaSchedule::equal_weights(std::size_t n_a) {
    if (n_a == 0)
        throw std::invalid_argument("schedule length must be at least 1");
    return AlphaSchedule(la::Vector(n_a, static_cast<double>(n_a)));
}

AlphaSchedule AlphaSchedule::geometric_decreasing(std::size_t n_a, double ratio) {
    if (n_a == 0)
        throw std::invalid_argument("schedule length must be at least 1");
    if (!(ratio > 0.0) || !(ratio < 1.0))
        throw std::invalid_argument("geometric ratio must lie in (0, 1), got " +
                                    csv::format_value(ratio));
    // sum_l 1/(a ratio^(l-1)) = 1 forces a = sum_l (1/ratio)^(l-1).
    double a = 0.0;
    double power = 1.0;
    for (std::size_t l = 0; l < n_a; ++l) {
        a += power;
        power /= ratio;
    }
    la::Vector alphas(n_a);
    double value = a;
    for (std::size_t l = 0; l < n_a; ++l) {
        alphas[l] = value;
        value *= ratio;
    }
    return AlphaSchedule(std::move(alphas));
}

AlphaSchedule AlphaSchedule::from_values(la::Vector alphas) {
    if (alphas.empty())
        throw std::invalid_argument("schedule length must be at least 1");
    for (double a : alphas)
        if (!(a > 0.0) || !std::isfinite(a))
            throw std::invalid_argument(
                "inflation coefficients must be positive and finite, got " +
                csv::format_value(a));
    return AlphaSchedule(std::move(alphas));
}

ScheduleValidation validate(const AlphaSchedule& schedule) {
    ScheduleValidation result;
    if (schedule.length() == 0) {
        result.message = "schedule is empty";
        return result;
    }
    double reciprocal_sum = 0.0;
    for (double a : schedule.values()) {
        if (!(a > 0.0)) {
            result.message = "inflation coefficient not positive: " +
                             csv::format_value(a);
            return result;
        }
        reciprocal_sum += 1.0 / a;
    }
    result.residual = reciprocal_sum - 1.0;
    if (std::abs(result.residual) > kNormalizationTol) {
        result.message =
            "schedule violates sum(1/alpha) == 1: residual " +
            csv::format_value(result.residual);
        return result;
    }
    result.ok = true;
    return result;
}

} // namespace esmda
