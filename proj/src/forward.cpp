#include "esmda/forward.hpp"

#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "esmda/errors.hpp"
#include "esmda/kernels.hpp"

namespace esmda {

LinearModel::LinearModel(la::Matrix g, la::Vector bias)
    : g_(std::move(g)), bias_(std::move(bias)) {
    if (g_.rows() == 0 || g_.cols() == 0)
        throw std::invalid_argument("linear model matrix must be non-empty");
    if (bias_.empty())
        bias_.assign(g_.rows(), 0.0);
    if (bias_.size() != g_.rows())
        throw std::invalid_argument(
            "linear model bias length " + std::to_string(bias_.size()) +
            " does not match matrix rows " + std::to_string(g_.rows()));
    if (!g_.all_finite())
        throw std::invalid_argument("linear model matrix has non-finite entries");
}

la::Vector LinearModel::evaluate(const la::Vector& m) const {
    if (m.size() != n_m())
        throw std::invalid_argument("model vector length " +
                                    std::to_string(m.size()) +
                                    " does not match n_m " +
                                    std::to_string(n_m()));
    la::Vector d(n_d());
    for (std::size_t k = 0; k < n_d(); ++k)
        d[k] = kernels::dot(g_.row(k), m.data(), n_m()) + bias_[k];
    return d;
}

DeclineCurveModel::DeclineCurveModel(la::Vector times)
    : times_(std::move(times)) {
    if (times_.empty())
        throw std::invalid_argument("decline model needs at least one time");
    for (std::size_t k = 0; k < times_.size(); ++k) {
        if (!(times_[k] >= 0.0) || !std::isfinite(times_[k]))
            throw std::invalid_argument("decline times must be finite and >= 0");
        if (k > 0 && !(times_[k] > times_[k - 1]))
            throw std::invalid_argument("decline times must be strictly increasing");
    }
}

la::Vector DeclineCurveModel::evaluate(const la::Vector& m) const {
    if (m.size() != 2)
        throw std::invalid_argument(
            "decline model expects m = [log rate, log decline], got length " +
            std::to_string(m.size()));
    const double decline = std::exp(m[1]);
    la::Vector q(times_.size());
    for (std::size_t k = 0; k < times_.size(); ++k) {
        q[k] = std::exp(m[0] - decline * times_[k]);
        if (!std::isfinite(q[k]))
            throw NumericalError("decline curve overflowed at time index " +
                                 std::to_string(k));
    }
    return q;
}

Ensemble evaluate_batch(const ForwardModel& model, const Ensemble& e,
                        std::size_t parallelism, RunCounter& counter) {
    if (e.dim() != model.n_m())
        throw std::invalid_argument(
            "ensemble dimension " + std::to_string(e.dim()) +
            " does not match model n_m " + std::to_string(model.n_m()));
    if (parallelism == 0)
        throw std::invalid_argument("parallelism must be at least 1");

    const std::size_t n_e = e.size();
    la::Matrix outputs(n_e, model.n_d());
    std::vector<std::string> failures(n_e);
    std::vector<char> failed(n_e, 0);

    auto evaluate_member = [&](std::size_t j) {
        try {
            const la::Vector d = model.evaluate(e.member_vector(j));
            if (d.size() != model.n_d())
                throw NumericalError("forward model returned length " +
                                     std::to_string(d.size()) +
                                     ", expected " +
                                     std::to_string(model.n_d()));
            for (double v : d)
                if (!std::isfinite(v))
                    throw NumericalError("forward model output is non-finite");
            std::copy(d.begin(), d.end(), outputs.row(j));
        } catch (const std::exception& ex) {
            failed[j] = 1;
            failures[j] = ex.what();
        }
    };

    if (parallelism == 1 || n_e == 1) {
        for (std::size_t j = 0; j < n_e; ++j)
            evaluate_member(j);
    } else {
        // Workers pull the next member index; each result lands in its own
        // output row, so the gather order never depends on scheduling.
        std::atomic<std::size_t> next{0};
        const std::size_t workers = std::min(parallelism, n_e);
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t j = next.fetch_add(1); j < n_e;
                     j = next.fetch_add(1))
                    evaluate_member(j);
            });
        }
        for (auto& t : pool)
            t.join();
    }

    for (std::size_t j = 0; j < n_e; ++j)
        if (failed[j])
            throw NumericalError("member " + std::to_string(j) + ": " +
                                 failures[j]);

    counter.add(n_e);
    return Ensemble(std::move(outputs), e.iteration_index());
}

} // namespace esmda
