#include "esmda/kernels.hpp"

#include <stdexcept>

#include "kernels_impl.hpp"

namespace esmda::kernels {

namespace scalar {

double dot(const double* x, const double* y, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        acc += x[i] * y[i];
    return acc;
}

double sum(const double* x, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        acc += x[i];
    return acc;
}

void axpy(double a, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i)
        y[i] += a * x[i];
}

void scal(double a, double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i)
        x[i] *= a;
}

void shift_scale(const double* x, double shift, double factor, double* out,
                 std::size_t n) {
    for (std::size_t i = 0; i < n; ++i)
        out[i] = (x[i] - shift) * factor;
}

void rot(double* x, double* y, double c, double s, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const double xi = x[i];
        const double yi = y[i];
        x[i] = c * xi - s * yi;
        y[i] = s * xi + c * yi;
    }
}

double weighted_ssq(const double* x, const double* ref, const double* w,
                    std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = (x[i] - ref[i]) * w[i];
        acc += r * r;
    }
    return acc;
}

} // namespace scalar

namespace {

struct Ops {
    double (*dot)(const double*, const double*, std::size_t);
    double (*sum)(const double*, std::size_t);
    void (*axpy)(double, const double*, double*, std::size_t);
    void (*scal)(double, double*, std::size_t);
    void (*shift_scale)(const double*, double, double, double*, std::size_t);
    void (*rot)(double*, double*, double, double, std::size_t);
    double (*weighted_ssq)(const double*, const double*, const double*,
                           std::size_t);
};

constexpr Ops kScalarOps = {scalar::dot,  scalar::sum,
                            scalar::axpy, scalar::scal,
                            scalar::shift_scale, scalar::rot,
                            scalar::weighted_ssq};

#ifdef ESMDA_BUILD_AVX2
constexpr Ops kAvx2Ops = {avx2::dot,  avx2::sum,
                          avx2::axpy, avx2::scal,
                          avx2::shift_scale, avx2::rot,
                          avx2::weighted_ssq};

bool cpu_has_avx2() {
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}
#endif

struct Dispatch {
    const Ops* ops;
    Backend backend;

    Dispatch() {
#ifdef ESMDA_BUILD_AVX2
        if (cpu_has_avx2()) {
            ops = &kAvx2Ops;
            backend = Backend::avx2;
            return;
        }
#endif
        ops = &kScalarOps;
        backend = Backend::scalar;
    }
};

Dispatch& dispatch() {
    static Dispatch d;
    return d;
}

} // namespace

Backend active_backend() { return dispatch().backend; }

bool backend_available(Backend b) {
    switch (b) {
    case Backend::scalar:
        return true;
    case Backend::avx2:
#ifdef ESMDA_BUILD_AVX2
        return cpu_has_avx2();
#else
        return false;
#endif
    }
    return false;
}

void set_backend(Backend b) {
    if (!backend_available(b))
        throw std::invalid_argument("kernel backend not available on this CPU: " +
                                    std::string(backend_name(b)));
    switch (b) {
    case Backend::scalar:
        dispatch().ops = &kScalarOps;
        break;
    case Backend::avx2:
#ifdef ESMDA_BUILD_AVX2
        dispatch().ops = &kAvx2Ops;
#endif
        break;
    }
    dispatch().backend = b;
}

std::string_view backend_name(Backend b) {
    switch (b) {
    case Backend::scalar:
        return "scalar";
    case Backend::avx2:
        return "avx2";
    }
    return "unknown";
}

double dot(const double* x, const double* y, std::size_t n) {
    return dispatch().ops->dot(x, y, n);
}

double sum(const double* x, std::size_t n) { return dispatch().ops->sum(x, n); }

void axpy(double a, const double* x, double* y, std::size_t n) {
    dispatch().ops->axpy(a, x, y, n);
}

void scal(double a, double* x, std::size_t n) { dispatch().ops->scal(a, x, n); }

void shift_scale(const double* x, double shift, double factor, double* out,
                 std::size_t n) {
    dispatch().ops->shift_scale(x, shift, factor, out, n);
}

void rot(double* x, double* y, double c, double s, std::size_t n) {
    dispatch().ops->rot(x, y, c, s, n);
}

double weighted_ssq(const double* x, const double* ref, const double* w,
                    std::size_t n) {
    return dispatch().ops->weighted_ssq(x, ref, w, n);
}

} // namespace esmda::kernels
