#pragma once

#include <cstdint>
#include <memory>

#include "esmda/ensemble.hpp"
#include "esmda/la.hpp"

namespace esmda {

/// Abstract forward map g: model vector of length n_m to simulated-data
/// vector of length n_d. Implementations must be deterministic, free of
/// side effects, and safe to call from several threads at once.
class ForwardModel {
public:
    virtual ~ForwardModel() = default;
    virtual std::size_t n_m() const = 0;
    virtual std::size_t n_d() const = 0;
    virtual la::Vector evaluate(const la::Vector& m) const = 0;
};

/// g(m) = G m + bias.
class LinearModel final : public ForwardModel {
public:
    LinearModel(la::Matrix g, la::Vector bias);

    std::size_t n_m() const override { return g_.cols(); }
    std::size_t n_d() const override { return g_.rows(); }
    la::Vector evaluate(const la::Vector& m) const override;

    const la::Matrix& matrix() const noexcept { return g_; }
    const la::Vector& bias() const noexcept { return bias_; }

private:
    la::Matrix g_;
    la::Vector bias_;
};

/// Exponential decline curve in log parameters, m = [log q_i, log D]:
/// q(t_k) = exp(m_0 - exp(m_1) t_k). A Gaussian prior in m stays Gaussian
/// while the rate response is nonlinear, the minimal stand-in for a
/// rate-history match.
class DeclineCurveModel final : public ForwardModel {
public:
    explicit DeclineCurveModel(la::Vector times);

    std::size_t n_m() const override { return 2; }
    std::size_t n_d() const override { return times_.size(); }
    la::Vector evaluate(const la::Vector& m) const override;

    const la::Vector& times() const noexcept { return times_; }

private:
    la::Vector times_;
};

/// Monotone count of forward-model evaluations. A complete smoother run
/// performs exactly (N_a + 1) * N_e of them.
class RunCounter {
public:
    void add(std::uint64_t n) noexcept { total_ += n; }
    std::uint64_t total() const noexcept { return total_; }

private:
    std::uint64_t total_ = 0;
};

/// Evaluates g on every member, up to `parallelism` members concurrently.
/// Output order always matches input order and results are identical for
/// any parallelism. Non-finite outputs raise a NumericalError naming the
/// member. The counter is incremented by N_e on success.
Ensemble evaluate_batch(const ForwardModel& model, const Ensemble& e,
                        std::size_t parallelism, RunCounter& counter);

} // namespace esmda
