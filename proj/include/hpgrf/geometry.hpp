#pragma once

// Observation windows (axis-aligned boxes or voxel masks), named sub-regions
// and evaluation lattices. Boxes are min-inclusive / max-exclusive and masks
// use half-open voxels, so partitions are exact.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "hpgrf/common.hpp"
#include "hpgrf/specfun.hpp"

namespace hpgrf {

class Window {
  public:
    enum class Kind { box, mask };

    static Window box2(double x0, double x1, double y0, double y1) {
        Window w;
        w.kind_ = Kind::box;
        w.dim_ = 2;
        w.lo_ = {x0, y0, 0.0};
        w.hi_ = {x1, y1, 0.0};
        w.validate_box();
        return w;
    }

    static Window box3(double x0, double x1, double y0, double y1, double z0, double z1) {
        Window w;
        w.kind_ = Kind::box;
        w.dim_ = 3;
        w.lo_ = {x0, y0, z0};
        w.hi_ = {x1, y1, z1};
        w.validate_box();
        return w;
    }

    // Mask window; occ is x-fastest (idx = ix + nx*(iy + ny*iz)), nz = 1 in 2D.
    static Window mask(int dim, std::array<long, 3> n, Point origin, Point voxel,
                       std::vector<uint8_t> occ) {
        Window w;
        w.kind_ = Kind::mask;
        w.dim_ = dim;
        w.n_ = n;
        if (dim == 2) w.n_[2] = 1;
        w.origin_ = origin;
        w.voxel_ = voxel;
        w.occ_ = std::move(occ);
        if (static_cast<long>(w.occ_.size()) != w.n_[0] * w.n_[1] * w.n_[2])
            throw DataError("mask occupancy size mismatch");
        w.occupied_ = std::accumulate(w.occ_.begin(), w.occ_.end(), 0L,
                                      [](long s, uint8_t v) { return s + (v ? 1 : 0); });
        if (w.occupied_ == 0) throw DataError("empty window");
        for (int k = 0; k < dim; ++k)
            if (!(voxel[k] > 0.0)) throw DataError("mask voxel size must be positive");
        w.lo_ = origin;
        for (int k = 0; k < dim; ++k) w.hi_[k] = origin[k] + w.n_[k] * voxel[k];
        return w;
    }

    Kind kind() const { return kind_; }
    int dim() const { return dim_; }
    const Point& lo() const { return lo_; }
    const Point& hi() const { return hi_; }
    const std::array<long, 3>& mask_dims() const { return n_; }
    const Point& mask_origin() const { return origin_; }
    const Point& mask_voxel() const { return voxel_; }
    const std::vector<uint8_t>& mask_occ() const { return occ_; }
    long mask_occupied() const { return occupied_; }

    double volume() const {
        if (kind_ == Kind::box) {
            double v = 1.0;
            for (int k = 0; k < dim_; ++k) v *= hi_[k] - lo_[k];
            return v;
        }
        double vv = 1.0;
        for (int k = 0; k < dim_; ++k) vv *= voxel_[k];
        return occupied_ * vv;
    }

    double voxel_volume() const {
        double vv = 1.0;
        for (int k = 0; k < dim_; ++k) vv *= voxel_[k];
        return vv;
    }

    bool contains(const Point& p) const {
        for (int k = 0; k < dim_; ++k)
            if (!(p[k] >= lo_[k] && p[k] < hi_[k])) return false;
        if (kind_ == Kind::box) return true;
        long idx[3] = {0, 0, 0};
        for (int k = 0; k < dim_; ++k) {
            idx[k] = static_cast<long>(std::floor((p[k] - origin_[k]) / voxel_[k]));
            if (idx[k] < 0 || idx[k] >= n_[k]) return false;
        }
        return occ_[idx[0] + n_[0] * (idx[1] + n_[1] * idx[2])] != 0;
    }

    // Center of the voxel holding linear index i (mask windows).
    Point voxel_center(long i) const {
        const long ix = i % n_[0];
        const long iy = (i / n_[0]) % n_[1];
        const long iz = i / (n_[0] * n_[1]);
        Point p{origin_[0] + (ix + 0.5) * voxel_[0], origin_[1] + (iy + 0.5) * voxel_[1], 0.0};
        if (dim_ == 3) p[2] = origin_[2] + (iz + 0.5) * voxel_[2];
        return p;
    }

    double diameter() const {
        double s = 0.0;
        for (int k = 0; k < dim_; ++k) {
            const double e = hi_[k] - lo_[k];
            s += e * e;
        }
        return std::sqrt(s);
    }

  private:
    void validate_box() const {
        for (int k = 0; k < dim_; ++k)
            if (!(lo_[k] < hi_[k])) throw DataError("window box min must be < max per axis");
    }

    Kind kind_ = Kind::box;
    int dim_ = 2;
    Point lo_{0, 0, 0}, hi_{1, 1, 0};
    std::array<long, 3> n_{0, 0, 1};
    Point origin_{0, 0, 0}, voxel_{1, 1, 1};
    std::vector<uint8_t> occ_;
    long occupied_ = 0;
};

// ----- regions ---------------------------------------------------------------

struct BoxRegion {
    Point lo, hi;
};

// {x : (x-c)' S^-1 (x-c) <= chi2_d(level)} for a coverage probability level.
struct EllipsoidRegion {
    Point center;
    std::array<double, 9> cov;  // row-major d x d in the top-left block
    double level = 0.95;
    // derived
    std::array<double, 9> cov_inv;
    double threshold = 0.0;  // chi2 quantile
    double cov_det = 0.0;
};

struct VoxelSetRegion {
    std::vector<long> indices;  // linear voxel indices into a mask window
};

class Region {
  public:
    std::string label;

    static Region box(std::string label, Point lo, Point hi) {
        Region r;
        r.label = std::move(label);
        r.body_ = BoxRegion{lo, hi};
        return r;
    }

    static Region ellipsoid(std::string label, int dim, Point center,
                            std::array<double, 9> cov, double level) {
        EllipsoidRegion e;
        e.center = center;
        e.cov = cov;
        e.level = level;
        inv_spd_small(cov.data(), dim, e.cov_inv.data());
        e.cov_det = det_small(cov.data(), dim);
        e.threshold = chi2_quantile(level, dim);
        Region r;
        r.label = std::move(label);
        r.body_ = e;
        return r;
    }

    static Region voxel_set(std::string label, std::vector<long> indices) {
        Region r;
        r.label = std::move(label);
        r.body_ = VoxelSetRegion{std::move(indices)};
        return r;
    }

    bool contains(const Point& p, const Window& w) const {
        if (!w.contains(p)) return false;
        if (const auto* b = std::get_if<BoxRegion>(&body_)) {
            for (int k = 0; k < w.dim(); ++k)
                if (!(p[k] >= b->lo[k] && p[k] < b->hi[k])) return false;
            return true;
        }
        if (const auto* e = std::get_if<EllipsoidRegion>(&body_)) {
            double v[3] = {0, 0, 0};
            for (int k = 0; k < w.dim(); ++k) v[k] = p[k] - e->center[k];
            return quad_form_small(e->cov_inv.data(), w.dim(), v) <= e->threshold;
        }
        const auto& vs = std::get<VoxelSetRegion>(body_);
        // membership = containing voxel is in the set
        const auto& n = w.mask_dims();
        long idx[3] = {0, 0, 0};
        for (int k = 0; k < w.dim(); ++k)
            idx[k] = static_cast<long>(std::floor((p[k] - w.mask_origin()[k]) / w.mask_voxel()[k]));
        const long lin = idx[0] + n[0] * (idx[1] + n[1] * idx[2]);
        return std::binary_search(vs.indices.begin(), vs.indices.end(), lin);
    }

    bool is_box() const { return std::holds_alternative<BoxRegion>(body_); }
    const BoxRegion* as_box() const { return std::get_if<BoxRegion>(&body_); }
    const EllipsoidRegion* as_ellipsoid() const { return std::get_if<EllipsoidRegion>(&body_); }
    const VoxelSetRegion* as_voxel_set() const { return std::get_if<VoxelSetRegion>(&body_); }

    // Axis-aligned bounding box (clipped to the window for quadrature loops).
    void bounds(const Window& w, Point& lo, Point& hi) const {
        lo = w.lo();
        hi = w.hi();
        if (const auto* b = as_box()) {
            for (int k = 0; k < w.dim(); ++k) {
                lo[k] = std::max(lo[k], b->lo[k]);
                hi[k] = std::min(hi[k], b->hi[k]);
            }
        } else if (const auto* e = as_ellipsoid()) {
            for (int k = 0; k < w.dim(); ++k) {
                const double half = std::sqrt(e->threshold * e->cov[k * w.dim() + k]);
                lo[k] = std::max(lo[k], e->center[k] - half);
                hi[k] = std::min(hi[k], e->center[k] + half);
            }
        }
    }

  private:
    std::variant<BoxRegion, EllipsoidRegion, VoxelSetRegion> body_;
};

inline double volume(const Window& w) { return w.volume(); }

// Region volume. Boxes and interior ellipsoids are analytic; ellipsoids that
// touch the window boundary (and masks) fall back to grid quadrature at
// spacing h.
inline double volume(const Region& r, const Window& w, double h = 0.1) {
    const int d = w.dim();
    if (const auto* b = r.as_box()) {
        double v = 1.0;
        for (int k = 0; k < d; ++k) {
            const double lo = std::max(b->lo[k], w.lo()[k]);
            const double hi = std::min(b->hi[k], w.hi()[k]);
            v *= std::max(0.0, hi - lo);
        }
        if (w.kind() == Window::Kind::box) return v;
        // clip to mask occupancy by voxel counting
        long cnt = 0;
        const auto& n = w.mask_dims();
        for (long i = 0; i < n[0] * n[1] * n[2]; ++i) {
            if (!w.mask_occ()[i]) continue;
            if (r.contains(w.voxel_center(i), w)) ++cnt;
        }
        return cnt * w.voxel_volume();
    }
    if (const auto* vs = r.as_voxel_set()) return vs->indices.size() * w.voxel_volume();
    const auto* e = r.as_ellipsoid();
    bool interior = (w.kind() == Window::Kind::box);
    if (interior) {
        for (int k = 0; k < d; ++k) {
            const double half = std::sqrt(e->threshold * e->cov[k * d + k]);
            if (e->center[k] - half < w.lo()[k] || e->center[k] + half > w.hi()[k])
                interior = false;
        }
    }
    if (interior) {
        const double unit = (d == 2) ? kPi : 4.0 * kPi / 3.0;
        return unit * std::pow(e->threshold, 0.5 * d) * std::sqrt(e->cov_det);
    }
    // grid quadrature over the bounding box
    Point lo, hi;
    r.bounds(w, lo, hi);
    double sum = 0.0;
    const long nx = std::max(1L, static_cast<long>(std::ceil((hi[0] - lo[0]) / h)));
    const long ny = std::max(1L, static_cast<long>(std::ceil((hi[1] - lo[1]) / h)));
    const long nz = (d == 3) ? std::max(1L, static_cast<long>(std::ceil((hi[2] - lo[2]) / h))) : 1;
    for (long iz = 0; iz < nz; ++iz)
        for (long iy = 0; iy < ny; ++iy)
            for (long ix = 0; ix < nx; ++ix) {
                Point p{lo[0] + (ix + 0.5) * h, lo[1] + (iy + 0.5) * h,
                        d == 3 ? lo[2] + (iz + 0.5) * h : 0.0};
                if (r.contains(p, w)) sum += 1.0;
            }
    return sum * std::pow(h, d);
}

inline bool contains(const Window& w, const Point& p) { return w.contains(p); }
inline bool contains(const Region& r, const Point& p, const Window& w) {
    return r.contains(p, w);
}

// ----- evaluation lattice / intensity grid -----------------------------------

// Values on a regular lattice of cell centers covering the window's bounding
// box; cells outside the window carry value 0 and inside[] = false.
struct IntensityGrid {
    int dim = 2;
    std::array<long, 3> n{0, 0, 1};
    Point origin{0, 0, 0};
    Point voxel{1, 1, 1};
    std::vector<double> values;
    std::vector<uint8_t> inside;

    long size() const { return n[0] * n[1] * n[2]; }

    Point center(long i) const {
        const long ix = i % n[0];
        const long iy = (i / n[0]) % n[1];
        const long iz = i / (n[0] * n[1]);
        Point p{origin[0] + (ix + 0.5) * voxel[0], origin[1] + (iy + 0.5) * voxel[1], 0.0};
        if (dim == 3) p[2] = origin[2] + (iz + 0.5) * voxel[2];
        return p;
    }

    double cell_volume() const {
        double v = 1.0;
        for (int k = 0; k < dim; ++k) v *= voxel[k];
        return v;
    }

    // Value at the cell containing p (0 outside).
    double at(const Point& p) const {
        long idx[3] = {0, 0, 0};
        for (int k = 0; k < dim; ++k) {
            idx[k] = static_cast<long>(std::floor((p[k] - origin[k]) / voxel[k]));
            if (idx[k] < 0 || idx[k] >= n[k]) return 0.0;
        }
        return values[idx[0] + n[0] * (idx[1] + n[1] * idx[2])];
    }

    double integral() const {
        double s = 0.0;
        for (double v : values) s += v;
        return s * cell_volume();
    }
};

inline IntensityGrid make_grid(const Window& w, double spacing) {
    if (!(spacing > 0.0)) throw ConfigError("grid spacing must be positive");
    IntensityGrid g;
    g.dim = w.dim();
    for (int k = 0; k < w.dim(); ++k) {
        g.origin[k] = w.lo()[k];
        g.n[k] = std::max(1L, static_cast<long>(std::llround((w.hi()[k] - w.lo()[k]) / spacing)));
        g.voxel[k] = (w.hi()[k] - w.lo()[k]) / g.n[k];
    }
    if (w.dim() == 2) g.n[2] = 1;
    g.values.assign(g.size(), 0.0);
    g.inside.assign(g.size(), 0);
    for (long i = 0; i < g.size(); ++i) g.inside[i] = w.contains(g.center(i)) ? 1 : 0;
    return g;
}

// ----- mask file format -------------------------------------------------------
// line 1: MASK3D nx ny nz   (or MASK2D nx ny)
// line 2: ORIGIN ox oy oz   (ox oy in 2D)
// line 3: VOXEL vx vy vz    (vx vy in 2D)
// then nx*ny*nz whitespace-separated 0/1 values, x-fastest.

inline Window read_mask(std::istream& in) {
    std::string tok;
    // skip comment lines
    std::string line;
    std::streampos pos = in.tellg();
    while (std::getline(in, line)) {
        if (!line.empty() && line[0] != '#') break;
        pos = in.tellg();
    }
    std::istringstream head(line);
    head >> tok;
    int dim = 0;
    if (tok == "MASK2D")
        dim = 2;
    else if (tok == "MASK3D")
        dim = 3;
    else
        throw DataError("mask file: expected MASK2D/MASK3D header");
    std::array<long, 3> n{1, 1, 1};
    for (int k = 0; k < dim; ++k)
        if (!(head >> n[k])) throw DataError("mask file: bad dimensions");
    Point origin{0, 0, 0}, voxel{1, 1, 1};
    in >> tok;
    if (tok != "ORIGIN") throw DataError("mask file: expected ORIGIN");
    for (int k = 0; k < dim; ++k) in >> origin[k];
    in >> tok;
    if (tok != "VOXEL") throw DataError("mask file: expected VOXEL");
    for (int k = 0; k < dim; ++k) in >> voxel[k];
    const long total = n[0] * n[1] * (dim == 3 ? n[2] : 1);
    std::vector<uint8_t> occ(total);
    for (long i = 0; i < total; ++i) {
        int v;
        if (!(in >> v)) throw DataError("mask file: truncated occupancy data");
        occ[i] = v ? 1 : 0;
    }
    return Window::mask(dim, n, origin, voxel, std::move(occ));
}

inline Window read_mask_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open mask file: " + path);
    return read_mask(in);
}

inline void write_mask(std::ostream& out, const Window& w) {
    if (w.kind() != Window::Kind::mask) throw DataError("write_mask: window is not a mask");
    const int d = w.dim();
    out << (d == 2 ? "MASK2D" : "MASK3D");
    for (int k = 0; k < d; ++k) out << ' ' << w.mask_dims()[k];
    out << "\nORIGIN";
    for (int k = 0; k < d; ++k) out << ' ' << w.mask_origin()[k];
    out << "\nVOXEL";
    for (int k = 0; k < d; ++k) out << ' ' << w.mask_voxel()[k];
    out << '\n';
    const auto& n = w.mask_dims();
    long i = 0;
    for (long iz = 0; iz < n[2]; ++iz)
        for (long iy = 0; iy < n[1]; ++iy) {
            for (long ix = 0; ix < n[0]; ++ix, ++i)
                out << (w.mask_occ()[i] ? '1' : '0') << (ix + 1 < n[0] ? ' ' : '\n');
        }
}

}  // namespace hpgrf
