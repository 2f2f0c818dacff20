#pragma once

// The smoothing kernel k_sigma2(y, x): an isotropic Gaussian centered at x,
// renormalized to integrate to 1 over the window, plus its region masses and
// a sampler for window-truncated draws.

#include <cmath>
#include <vector>

#include "hpgrf/geometry.hpp"
#include "hpgrf/rng.hpp"
#include "hpgrf/specfun.hpp"

namespace hpgrf {

namespace detail {

// Phi((hi-x)/s) - Phi((lo-x)/s) per axis.
inline double axis_mass(double lo, double hi, double x, double sigma) {
    const double inv = 1.0 / (sigma * std::sqrt(2.0));
    return 0.5 * (std::erf((hi - x) * inv) - std::erf((lo - x) * inv));
}

}  // namespace detail

// Z(x) = untruncated-Gaussian mass of the window; the kernel normalizer.
inline double kernel_norm(const Point& x, double sigma2, const Window& w) {
    const double sigma = std::sqrt(sigma2);
    if (w.kind() == Window::Kind::box) {
        double z = 1.0;
        for (int k = 0; k < w.dim(); ++k)
            z *= detail::axis_mass(w.lo()[k], w.hi()[k], x[k], sigma);
        return z;
    }
    // mask: exact sum of per-voxel erf products over occupied voxels
    const auto& n = w.mask_dims();
    const auto& o = w.mask_origin();
    const auto& v = w.mask_voxel();
    // per-axis one-dimensional masses, then combine over occupied voxels
    std::vector<double> mx(n[0]), my(n[1]), mz(n[2], 1.0);
    for (long i = 0; i < n[0]; ++i)
        mx[i] = detail::axis_mass(o[0] + i * v[0], o[0] + (i + 1) * v[0], x[0], sigma);
    for (long i = 0; i < n[1]; ++i)
        my[i] = detail::axis_mass(o[1] + i * v[1], o[1] + (i + 1) * v[1], x[1], sigma);
    if (w.dim() == 3)
        for (long i = 0; i < n[2]; ++i)
            mz[i] = detail::axis_mass(o[2] + i * v[2], o[2] + (i + 1) * v[2], x[2], sigma);
    double z = 0.0;
    long idx = 0;
    for (long iz = 0; iz < n[2]; ++iz)
        for (long iy = 0; iy < n[1]; ++iy) {
            const double myz = my[iy] * mz[iz];
            for (long ix = 0; ix < n[0]; ++ix, ++idx)
                if (w.mask_occ()[idx]) z += mx[ix] * myz;
        }
    return z;
}

inline double log_kernel_density(const Point& y, const Point& x, double sigma2, const Window& w,
                                 double log_norm) {
    const double r2 = sq_dist(y, x, w.dim());
    return -0.5 * w.dim() * std::log(2.0 * kPi * sigma2) - 0.5 * r2 / sigma2 - log_norm;
}

// k_sigma2(y, x): integrates to exactly 1 over the window.
inline double kernel_density(const Point& y, const Point& x, double sigma2, const Window& w) {
    if (!w.contains(x) || !w.contains(y)) throw DataError("kernel_density: point outside window");
    const double z = kernel_norm(x, sigma2, w);
    return std::exp(log_kernel_density(y, x, sigma2, w, std::log(z)));
}

// K_sigma2(B, x) = kernel mass of a region, in [0,1]. Boxes are analytic;
// ellipsoid and voxel-set regions use midpoint quadrature at spacing
// `quad_h` (error O(h^2); defaults to sigma/8).
inline double kernel_mass(const Region& r, const Point& x, double sigma2, const Window& w,
                          double quad_h = 0.0) {
    if (!w.contains(x)) throw DataError("kernel_mass: center outside window");
    const double z = kernel_norm(x, sigma2, w);
    const double sigma = std::sqrt(sigma2);
    if (const auto* b = r.as_box(); b && w.kind() == Window::Kind::box) {
        double m = 1.0;
        for (int k = 0; k < w.dim(); ++k) {
            const double lo = std::max(b->lo[k], w.lo()[k]);
            const double hi = std::min(b->hi[k], w.hi()[k]);
            if (!(lo < hi)) return 0.0;
            m *= detail::axis_mass(lo, hi, x[k], sigma);
        }
        return m / z;
    }
    const int d = w.dim();
    const double h = quad_h > 0.0 ? quad_h : sigma / 8.0;
    Point lo, hi;
    r.bounds(w, lo, hi);
    const long nx = std::max(1L, static_cast<long>(std::ceil((hi[0] - lo[0]) / h)));
    const long ny = std::max(1L, static_cast<long>(std::ceil((hi[1] - lo[1]) / h)));
    const long nz = (d == 3) ? std::max(1L, static_cast<long>(std::ceil((hi[2] - lo[2]) / h))) : 1;
    const double hx = (hi[0] - lo[0]) / nx, hy = (hi[1] - lo[1]) / ny,
                 hz = (d == 3) ? (hi[2] - lo[2]) / nz : 1.0;
    const double norm = std::pow(2.0 * kPi * sigma2, -0.5 * d);
    double sum = 0.0;
    for (long iz = 0; iz < nz; ++iz)
        for (long iy = 0; iy < ny; ++iy)
            for (long ix = 0; ix < nx; ++ix) {
                Point p{lo[0] + (ix + 0.5) * hx, lo[1] + (iy + 0.5) * hy,
                        d == 3 ? lo[2] + (iz + 0.5) * hz : 0.0};
                if (!r.contains(p, w)) continue;
                sum += std::exp(-0.5 * sq_dist(p, x, d) / sigma2);
            }
    return sum * norm * hx * hy * (d == 3 ? hz : 1.0) / z;
}

// kernel_mass of the whole window is 1 by construction.
inline double kernel_mass(const Window& w, const Point& x, double sigma2) {
    if (!w.contains(x)) throw DataError("kernel_mass: center outside window");
    (void)sigma2;
    return 1.0;
}

// Draw from the window-truncated Gaussian at x. Rejection from the
// untruncated Gaussian (expected acceptance = Z(x)); box windows switch to
// exact per-axis inverse-CDF sampling when the acceptance rate would be
// below 1%, since the box truncation factorizes.
inline Point sample_kernel_point(const Point& x, double sigma2, const Window& w, Rng& rng) {
    const double z = kernel_norm(x, sigma2, w);
    if (z < 1e-12) throw NumericError("degenerate kernel");
    const double sigma = std::sqrt(sigma2);
    const int d = w.dim();
    if (w.kind() == Window::Kind::box && z < 1e-2) {
        Point p{0, 0, 0};
        for (int k = 0; k < d; ++k) {
            const double a = normal_cdf((w.lo()[k] - x[k]) / sigma);
            const double b = normal_cdf((w.hi()[k] - x[k]) / sigma);
            double u = a + rng.u01p() * (b - a);
            u = std::min(std::max(u, 1e-16), 1.0 - 1e-16);
            p[k] = x[k] + sigma * normal_quantile(u);
            p[k] = std::min(std::max(p[k], w.lo()[k]), std::nextafter(w.hi()[k], w.lo()[k]));
        }
        return p;
    }
    for (;;) {
        Point p{0, 0, 0};
        for (int k = 0; k < d; ++k) p[k] = x[k] + sigma * rng.normal();
        if (w.contains(p)) return p;
    }
}

// Per-slot cache of kernel normalizers for the sampler's hot loop. A slot is
// refreshed when its center moved more than 0.01*sigma or sigma changed by
// more than 1%; mask-window normalizations are the expensive case this
// exists for.
class KernelNormCache {
  public:
    void resize(std::size_t slots) {
        entries_.assign(slots, Entry{});
    }

    double log_norm(std::size_t slot, const Point& x, double sigma2, const Window& w) {
        Entry& e = entries_[slot];
        const double sigma = std::sqrt(sigma2);
        if (e.valid) {
            const double moved = std::sqrt(sq_dist(e.x, x, w.dim()));
            if (moved <= 0.01 * sigma && std::abs(std::sqrt(e.sigma2) - sigma) <= 0.01 * sigma)
                return e.log_z;
        }
        e.x = x;
        e.sigma2 = sigma2;
        e.log_z = std::log(kernel_norm(x, sigma2, w));
        e.valid = true;
        return e.log_z;
    }

    void invalidate(std::size_t slot) {
        if (slot < entries_.size()) entries_[slot].valid = false;
    }

  private:
    struct Entry {
        Point x{0, 0, 0};
        double sigma2 = 0.0;
        double log_z = 0.0;
        bool valid = false;
    };
    std::vector<Entry> entries_;
};

}  // namespace hpgrf
