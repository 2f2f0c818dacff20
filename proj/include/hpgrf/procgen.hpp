#pragma once

// Generative sampling: Poisson processes from grid or jump-set intensities,
// the full hierarchical model, the modified Thomas processes of the 2D test
// bench, and point-pattern log-likelihoods.

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "hpgrf/kernel.hpp"
#include "hpgrf/randfield.hpp"

namespace hpgrf {

struct PointPattern {
    std::string study_id;
    std::string type;
    std::vector<Point> points;
    double weight = 1.0;  // optional per-study weight (MKDA averaging)
};

struct Dataset {
    std::vector<std::string> types;        // J labels, fixed order
    std::vector<PointPattern> patterns;    // grouped by (study, type)

    int J() const { return static_cast<int>(types.size()); }

    int type_index(const std::string& t) const {
        for (std::size_t j = 0; j < types.size(); ++j)
            if (types[j] == t) return static_cast<int>(j);
        throw DataError("unknown type label: " + t);
    }

    int studies_of_type(int j) const {
        int n = 0;
        for (const auto& p : patterns)
            if (p.type == types[j]) ++n;
        return n;
    }

    long total_points() const {
        long n = 0;
        for (const auto& p : patterns) n += static_cast<long>(p.points.size());
        return n;
    }
};

// ----- Poisson sampling -------------------------------------------------------

// Homogeneous-envelope thinning against a grid intensity. The envelope is
// the grid maximum (piecewise-constant interpolation) with a 1.001 safety.
inline PointPattern sample_poisson(const IntensityGrid& g, const Window& w, Rng& rng) {
    double vmax = 0.0;
    for (double v : g.values) vmax = std::max(vmax, v);
    if (!std::isfinite(vmax)) throw NumericError("sample_poisson: non-finite intensity");
    PointPattern out;
    if (vmax <= 0.0) return out;
    const double envelope = vmax * 1.001;
    const long n = rng.poisson(envelope * w.volume());
    out.points.reserve(n / 2);
    for (long i = 0; i < n; ++i) {
        Point p{0, 0, 0};
        do {
            for (int k = 0; k < w.dim(); ++k) p[k] = rng.uniform(w.lo()[k], w.hi()[k]);
        } while (!w.contains(p));
        if (rng.u01() * envelope < g.at(p)) out.points.push_back(p);
    }
    return out;
}

// Cox draw for type j given the jump set: N ~ Poisson(sum_m mu[j][m]), each
// point picks jump m with probability proportional to mu[j][m] (the kernel
// is window-normalized so kernel_mass(B, theta) = 1) and then draws from the
// truncated kernel at theta_m. Optionally records the generating jump of
// each point.
inline PointPattern sample_poisson(const JumpSet& js, int j, double sigma2, const Window& w,
                                   Rng& rng, std::vector<int>* labels = nullptr) {
    const double mass = js.type_mass(j);
    if (!std::isfinite(mass)) throw NumericError("sample_poisson: non-finite mass");
    PointPattern out;
    if (mass <= 0.0) return out;
    const long n = rng.poisson(mass);
    out.points.reserve(n);
    std::span<const double> wts(js.mu.data() + static_cast<std::size_t>(j) * js.M,
                                static_cast<std::size_t>(js.M));
    for (long i = 0; i < n; ++i) {
        const int m = static_cast<int>(rng.categorical(wts));
        out.points.push_back(sample_kernel_point(js.location(m), sigma2, w, rng));
        if (labels) labels->push_back(m);
    }
    return out;
}

// ----- hierarchical generative model -------------------------------------------

struct HpgrfHyper {
    double alpha_total;              // alpha(B)
    double beta;
    double tau;
    std::vector<double> sigma2;      // per type
};

struct HpgrfDraw {
    Dataset data;
    JumpSet jumps;
    std::vector<std::vector<int>> labels;  // per pattern, generating jump of each point
};

inline HpgrfDraw sample_hpgrf(const std::vector<std::string>& types,
                              const std::vector<int>& n_studies, const HpgrfHyper& hyper, int M,
                              const Window& w, Rng& rng) {
    const int J = static_cast<int>(types.size());
    if (static_cast<int>(n_studies.size()) != J || static_cast<int>(hyper.sigma2.size()) != J)
        throw ConfigError("sample_hpgrf: per-type sizes disagree");
    HpgrfDraw out;
    const BaseMeasure base = BaseMeasure::uniform(w, hyper.alpha_total);
    out.jumps = sample_parent_field(base, w, hyper.beta, M, rng);
    sample_child_heights(out.jumps, hyper.tau, J, rng);
    out.data.types = types;
    for (int j = 0; j < J; ++j) {
        for (int i = 0; i < n_studies[j]; ++i) {
            std::vector<int> lab;
            PointPattern p = sample_poisson(out.jumps, j, hyper.sigma2[j], w, rng, &lab);
            p.study_id = types[j] + "_s" + std::to_string(i + 1);
            p.type = types[j];
            out.data.patterns.push_back(std::move(p));
            out.labels.push_back(std::move(lab));
        }
    }
    return out;
}

// ----- modified Thomas processes ------------------------------------------------

struct ThomasComponent {
    double theta;                // mean count
    Point mu;                    // center (mm)
    std::array<double, 9> sigma;  // covariance (mm^2), row-major d x d
};

struct ThomasConfig {
    double epsilon = 0.0;                      // homogeneous background (mm^-d)
    std::vector<ThomasComponent> components;   // shared pool
    std::vector<std::vector<int>> type_components;  // per type, indices into pool
    std::vector<std::string> types;

    // Intensity of type j at x.
    double intensity(int j, const Point& x, int dim) const {
        double v = epsilon;
        for (int ci : type_components[j]) {
            const auto& c = components[ci];
            double si[9], det = det_small(c.sigma.data(), dim);
            inv_spd_small(c.sigma.data(), dim, si);
            v += c.theta * gauss_density(x, c.mu, si, det, dim);
        }
        return v;
    }
};

// The simulation bench: three point-pattern types aggregating on four
// Gaussian components over [0,100]^2 with background 0.001.
inline ThomasConfig thomas_table1() {
    ThomasConfig c;
    c.epsilon = 0.001;
    c.components = {
        {15.0, {10, 20, 0}, {30, 15, 0, 15, 15, 0, 0, 0, 0}},
        {10.0, {70, 30, 0}, {30, -10, 0, -10, 40, 0, 0, 0, 0}},
        {5.0, {40, 50, 0}, {20, -5, 0, -5, 10, 0, 0, 0, 0}},
        {10.0, {60, 75, 0}, {10, 5, 0, 5, 20, 0, 0, 0, 0}},
    };
    c.type_components = {{1, 2}, {1, 3}, {0, 1, 2}};
    c.types = {"t1", "t2", "t3"};
    return c;
}

// One pattern of type j: background Poisson plus per-component Gaussian
// clusters, points falling outside the window discarded (thinning), so the
// result is an exact inhomogeneous Poisson draw from the window-restricted
// intensity.
inline PointPattern sample_thomas(const ThomasConfig& cfg, int j, const Window& w, Rng& rng) {
    PointPattern out;
    out.type = cfg.types.empty() ? std::string("t") + std::to_string(j + 1) : cfg.types[j];
    const long nbg = rng.poisson(cfg.epsilon * w.volume());
    for (long i = 0; i < nbg; ++i) {
        Point p{0, 0, 0};
        do {
            for (int k = 0; k < w.dim(); ++k) p[k] = rng.uniform(w.lo()[k], w.hi()[k]);
        } while (!w.contains(p));
        out.points.push_back(p);
    }
    const int d = w.dim();
    for (int ci : cfg.type_components[j]) {
        const auto& c = cfg.components[ci];
        double L[9];
        chol_small(c.sigma.data(), d, L);
        const long n = rng.poisson(c.theta);
        for (long i = 0; i < n; ++i) {
            double z[3] = {rng.normal(), rng.normal(), d == 3 ? rng.normal() : 0.0};
            Point p = c.mu;
            for (int r = 0; r < d; ++r)
                for (int k = 0; k <= r; ++k) p[r] += L[r * d + k] * z[k];
            if (w.contains(p)) out.points.push_back(p);
        }
    }
    return out;
}

inline Dataset sample_thomas_dataset(const ThomasConfig& cfg, int studies_per_type,
                                     const Window& w, Rng& rng) {
    Dataset d;
    d.types = cfg.types;
    for (std::size_t j = 0; j < cfg.types.size(); ++j)
        for (int i = 0; i < studies_per_type; ++i) {
            PointPattern p = sample_thomas(cfg, static_cast<int>(j), w, rng);
            p.study_id = cfg.types[j] + "_s" + std::to_string(i + 1);
            d.patterns.push_back(std::move(p));
        }
    return d;
}

// ----- log-likelihoods -----------------------------------------------------------

// Poisson-process log-likelihood -Lambda(B) + sum_i ln lambda(y_i) for a grid
// intensity; lambda is floored at 1e-12 so empty zones stay finite.
inline double log_likelihood(const PointPattern& pat, const IntensityGrid& g, const Window& w) {
    double ll = -g.integral();
    for (const auto& y : pat.points) {
        if (!w.contains(y)) throw DataError("log_likelihood: point outside window");
        ll += std::log(std::max(g.at(y), kIntensityFloor));
    }
    return ll;
}

// Same for a jump-set intensity of type j: Lambda(B) = sum_m mu[j][m] exactly
// (normalized kernels); lambda(y) = sum_m mu[j][m] k(y, theta_m) evaluated in
// log space.
inline double log_likelihood(const PointPattern& pat, const JumpSet& js, int j, double sigma2,
                             const Window& w) {
    double ll = -js.type_mass(j);
    const int d = w.dim();
    const double lognorm_gauss = -0.5 * d * std::log(2.0 * kPi * sigma2);
    std::vector<double> log_terms(js.M);
    std::vector<double> log_z(js.M);
    for (int m = 0; m < js.M; ++m) log_z[m] = std::log(kernel_norm(js.location(m), sigma2, w));
    for (const auto& y : pat.points) {
        if (!w.contains(y)) throw DataError("log_likelihood: point outside window");
        for (int m = 0; m < js.M; ++m) {
            const double r2 = sq_dist(y, js.location(m), d);
            log_terms[m] =
                std::log(js.child(j, m)) + lognorm_gauss - 0.5 * r2 / sigma2 - log_z[m];
        }
        const double lam = log_sum_exp(log_terms);
        ll += std::max(lam, std::log(kIntensityFloor));
    }
    return ll;
}

}  // namespace hpgrf
