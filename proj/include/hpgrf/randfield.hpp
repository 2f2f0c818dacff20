#pragma once

// Gamma random fields by the inverse-Levy construction: truncated parent
// fields, per-type child heights, the joint density of the truncated jumps
// and a truncation-error estimate.

#include <cmath>
#include <iostream>
#include <sstream>
#include <vector>

#include "hpgrf/geometry.hpp"
#include "hpgrf/rng.hpp"
#include "hpgrf/specfun.hpp"

namespace hpgrf {

// Uniform base measure over the window with free total mass alpha(B).
// alpha(B) = |B| recovers Lebesgue measure.
struct BaseMeasure {
    double total_mass = 0.0;  // alpha(B)
    double norm_density = 0.0;  // alphatilde'(x) = 1/|B|

    static BaseMeasure uniform(const Window& w, double total = -1.0) {
        BaseMeasure b;
        b.total_mass = total > 0.0 ? total : w.volume();
        if (!(b.total_mass > 0.0)) throw ConfigError("base measure mass must be positive");
        b.norm_density = 1.0 / w.volume();
        return b;
    }
};

// Truncated gamma random field: M jumps with strictly decreasing parent
// heights nu and per-type child heights mu[j][m].
struct JumpSet {
    int dim = 2;
    int M = 0;
    int J = 0;
    std::vector<double> theta;  // M * dim, jump locations
    std::vector<double> nu;     // M, strictly decreasing
    std::vector<double> mu;     // J * M, child heights (j-major)
    double beta = 1.0;          // parent inverse scale
    double tau = 1.0;           // child inverse scale

    Point location(int m) const {
        Point p{theta[m * dim], theta[m * dim + 1], 0.0};
        if (dim == 3) p[2] = theta[m * dim + 2];
        return p;
    }

    double child(int j, int m) const { return mu[static_cast<std::size_t>(j) * M + m]; }
    double& child(int j, int m) { return mu[static_cast<std::size_t>(j) * M + m]; }

    // G_j(B) under normalized kernels: Lambda_j(B) = sum_m mu[j][m].
    double type_mass(int j) const {
        double s = 0.0;
        for (int m = 0; m < M; ++m) s += child(j, m);
        return s;
    }

    double parent_mass() const {
        double s = 0.0;
        for (double v : nu) s += v;
        return s;
    }

    bool ordered() const {
        for (int m = 0; m + 1 < M; ++m)
            if (!(nu[m] > nu[m + 1])) return false;
        return M == 0 || nu[M - 1] > 0.0;
    }
};

// Parent field G0: theta_m iid uniform, zeta_m standard Poisson arrivals,
// nu_m = E1^{-1}(zeta_m / alpha(B)) / beta. Heights are strictly decreasing
// because E1^{-1} is decreasing.
inline JumpSet sample_parent_field(const BaseMeasure& base, const Window& w, double beta, int M,
                                   Rng& rng) {
    if (M < 1) throw ConfigError("truncation level M must be >= 1");
    if (!(beta > 0.0)) throw ConfigError("beta must be positive");
    JumpSet js;
    js.dim = w.dim();
    js.M = M;
    js.beta = beta;
    js.theta.resize(static_cast<std::size_t>(M) * w.dim());
    js.nu.resize(M);
    double zeta = 0.0;
    double prev = std::numeric_limits<double>::infinity();
    for (int m = 0; m < M; ++m) {
        // uniform location; masks use rejection over the bounding box
        for (;;) {
            Point p{0, 0, 0};
            for (int k = 0; k < w.dim(); ++k) p[k] = rng.uniform(w.lo()[k], w.hi()[k]);
            if (w.contains(p)) {
                for (int k = 0; k < w.dim(); ++k) js.theta[m * w.dim() + k] = p[k];
                break;
            }
        }
        zeta += rng.exponential();
        double nu = inv_e1(zeta / base.total_mass) / beta;
        if (!(nu < prev)) nu = prev * (1.0 - 1e-12);  // break underflow ties
        if (!(nu > 0.0))
            throw NumericError("parent heights underflow: M too large for base mass");
        js.nu[m] = nu;
        prev = nu;
    }
    return js;
}

// Child heights mu[j][m] ~ Gamma(nu_m, tau); draws that underflow are floored
// at 1e-300 to keep the heights strictly positive.
inline void sample_child_heights(JumpSet& js, double tau, int J, Rng& rng) {
    if (!(tau > 0.0)) throw ConfigError("tau must be positive");
    js.J = J;
    js.tau = tau;
    js.mu.assign(static_cast<std::size_t>(J) * js.M, 0.0);
    for (int j = 0; j < J; ++j)
        for (int m = 0; m < js.M; ++m)
            js.child(j, m) = std::max(rng.gamma(js.nu[m], tau), 1e-300);
}

// Log of the (unnormalized) joint density of the truncated parent jumps:
//   -alpha(B) E1(beta nu_M) + sum_m [ -ln nu_m - beta nu_m + ln alphatilde'(theta_m) ]
// on the ordered cone nu_1 > ... > nu_M > 0.
inline double levy_log_density(const JumpSet& js, const BaseMeasure& base, double beta) {
    if (!js.ordered()) throw DataError("invalid jump ordering");
    const double log_norm_density = std::log(base.norm_density);
    double s = -base.total_mass * exp_integral_e1(beta * js.nu[js.M - 1]);
    for (int m = 0; m < js.M; ++m) s += -std::log(js.nu[m]) - beta * js.nu[m] + log_norm_density;
    return s;
}

// Expected tail mass beyond the truncation, relative to the total expected
// mass: jumps below nu_M carry alpha(B)(1 - e^{-beta nu_M})/beta of the
// alpha(B)/beta total.
inline double truncation_error(const JumpSet& js, const BaseMeasure& base, double beta) {
    (void)base;
    if (js.M < 1) throw ConfigError("truncation_error: empty jump set");
    return -std::expm1(-beta * js.nu[js.M - 1]);
}

// ----- JUMPS serialization ----------------------------------------------------
// header `JUMPS M J`, then M rows `m  theta_x theta_y [theta_z]  nu  mu_1..mu_J`.

inline void write_jumps(std::ostream& out, const JumpSet& js) {
    out << "JUMPS " << js.M << ' ' << js.J << '\n';
    out.precision(17);
    for (int m = 0; m < js.M; ++m) {
        out << (m + 1);
        for (int k = 0; k < js.dim; ++k) out << ' ' << js.theta[m * js.dim + k];
        out << ' ' << js.nu[m];
        for (int j = 0; j < js.J; ++j) out << ' ' << js.child(j, m);
        out << '\n';
    }
}

inline JumpSet read_jumps(std::istream& in, int dim) {
    std::string tok;
    in >> tok;
    if (tok != "JUMPS") throw DataError("expected JUMPS header");
    JumpSet js;
    js.dim = dim;
    in >> js.M >> js.J;
    if (js.M < 1 || js.J < 0) throw DataError("bad JUMPS dimensions");
    js.theta.resize(static_cast<std::size_t>(js.M) * dim);
    js.nu.resize(js.M);
    js.mu.resize(static_cast<std::size_t>(js.J) * js.M);
    for (int m = 0; m < js.M; ++m) {
        long idx;
        if (!(in >> idx)) throw DataError("truncated JUMPS data");
        for (int k = 0; k < dim; ++k) in >> js.theta[m * dim + k];
        in >> js.nu[m];
        for (int j = 0; j < js.J; ++j) in >> js.child(j, m);
    }
    if (!js.ordered()) throw DataError("invalid jump ordering");
    return js;
}

}  // namespace hpgrf
