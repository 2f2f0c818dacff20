#pragma once

// Shared basics: points, error taxonomy, small dense linear algebra and
// log-space helpers used across the library.

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace hpgrf {

// A location in the window; z is ignored (kept 0) for 2D windows.
using Point = std::array<double, 3>;

inline Point make_point(double x, double y, double z = 0.0) { return {x, y, z}; }

inline double sq_dist(const Point& a, const Point& b, int dim) {
    double s = 0.0;
    for (int k = 0; k < dim; ++k) {
        const double d = a[k] - b[k];
        s += d * d;
    }
    return s;
}

// Error taxonomy mapped to CLI exit codes: config=2, data=3, numeric=4.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

constexpr double kPi = 3.14159265358979323846;
constexpr double kEulerGamma = 0.57721566490153286061;

// Intensity floor (mm^-d) applied in likelihoods so that points in
// zero-intensity zones never produce -inf.
constexpr double kIntensityFloor = 1e-12;

inline double log_sum_exp(std::span<const double> v) {
    double m = -std::numeric_limits<double>::infinity();
    for (double x : v) m = std::max(m, x);
    if (!std::isfinite(m)) return m;
    double s = 0.0;
    for (double x : v) s += std::exp(x - m);
    return m + std::log(s);
}

// ----- tiny dense matrices (d <= 3), row-major ------------------------------

inline double det_small(const double* a, int d) {
    if (d == 1) return a[0];
    if (d == 2) return a[0] * a[3] - a[1] * a[2];
    return a[0] * (a[4] * a[8] - a[5] * a[7]) - a[1] * (a[3] * a[8] - a[5] * a[6]) +
           a[2] * (a[3] * a[7] - a[4] * a[6]);
}

// Inverse of a symmetric positive definite d x d matrix; throws on
// non-positive determinant.
inline void inv_spd_small(const double* a, int d, double* out) {
    const double det = det_small(a, d);
    if (!(det > 0.0)) throw NumericError("matrix not positive definite");
    if (d == 1) {
        out[0] = 1.0 / a[0];
    } else if (d == 2) {
        out[0] = a[3] / det;
        out[1] = -a[1] / det;
        out[2] = -a[2] / det;
        out[3] = a[0] / det;
    } else {
        out[0] = (a[4] * a[8] - a[5] * a[7]) / det;
        out[1] = (a[2] * a[7] - a[1] * a[8]) / det;
        out[2] = (a[1] * a[5] - a[2] * a[4]) / det;
        out[3] = (a[5] * a[6] - a[3] * a[8]) / det;
        out[4] = (a[0] * a[8] - a[2] * a[6]) / det;
        out[5] = (a[2] * a[3] - a[0] * a[5]) / det;
        out[6] = (a[3] * a[7] - a[4] * a[6]) / det;
        out[7] = (a[1] * a[6] - a[0] * a[7]) / det;
        out[8] = (a[0] * a[4] - a[1] * a[3]) / det;
    }
}

// Lower Cholesky factor of a symmetric positive definite d x d matrix.
inline void chol_small(const double* a, int d, double* L) {
    for (int i = 0; i < d * d; ++i) L[i] = 0.0;
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j <= i; ++j) {
            double s = a[i * d + j];
            for (int k = 0; k < j; ++k) s -= L[i * d + k] * L[j * d + k];
            if (i == j) {
                if (!(s > 0.0)) throw NumericError("matrix not positive definite");
                L[i * d + i] = std::sqrt(s);
            } else {
                L[i * d + j] = s / L[j * d + j];
            }
        }
    }
}

inline double quad_form_small(const double* q, int d, const double* v) {
    double s = 0.0;
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) s += v[i] * q[i * d + j] * v[j];
    return s;
}

// d-dimensional Gaussian density with mean mu and covariance given by its
// precomputed inverse `si` and determinant `det`.
inline double gauss_density(const Point& x, const Point& mu, const double* si, double det,
                            int dim) {
    double v[3] = {0, 0, 0};
    for (int k = 0; k < dim; ++k) v[k] = x[k] - mu[k];
    const double q = quad_form_small(si, dim, v);
    const double norm = std::pow(2.0 * kPi, -0.5 * dim) / std::sqrt(det);
    return norm * std::exp(-0.5 * q);
}

}  // namespace hpgrf
