#pragma once

#include <cstddef>

// Internal declarations shared between the dispatch unit and the
// backend translation units.

namespace esmda::kernels::scalar {

double dot(const double* x, const double* y, std::size_t n);
double sum(const double* x, std::size_t n);
void axpy(double a, const double* x, double* y, std::size_t n);
void scal(double a, double* x, std::size_t n);
void shift_scale(const double* x, double shift, double factor, double* out,
                 std::size_t n);
void rot(double* x, double* y, double c, double s, std::size_t n);
double weighted_ssq(const double* x, const double* ref, const double* w,
                    std::size_t n);

} // namespace esmda::kernels::scalar

#ifdef ESMDA_BUILD_AVX2
namespace esmda::kernels::avx2 {

double dot(const double* x, const double* y, std::size_t n);
double sum(const double* x, std::size_t n);
void axpy(double a, const double* x, double* y, std::size_t n);
void scal(double a, double* x, std::size_t n);
void shift_scale(const double* x, double shift, double factor, double* out,
                 std::size_t n);
void rot(double* x, double* y, double c, double s, std::size_t n);
double weighted_ssq(const double* x, const double* ref, const double* w,
                    std::size_t n);

} // namespace esmda::kernels::avx2
#endif
