#pragma once

// Posterior simulation by data augmentation on the truncated inverse-Levy
// representation. One Sampler owns one chain's state; sweep order is
// assignments -> mu -> tau -> (nu, theta) -> (sigma, beta).

#include <cstring>
#include <iostream>
#include <sstream>
#include <vector>

#include "hpgrf/procgen.hpp"

namespace hpgrf {

enum class Model { hpgrf, ipgrf };

struct ChainConfig {
    int M = 2000;
    long burnin = 2000;
    long total = 6000;   // total iterations including burn-in
    int thin = 20;       // save every thin-th post-burn-in iteration
    double alpha_total = -1.0;  // alpha(B); <= 0 means window volume (Lebesgue)
    double prior_shape = 2.0, prior_rate = 2.0;  // beta, tau ~ Gamma(2,2)
    double sigma_inv2_max = 10.0;                // sigma_j^-2 ~ U[0, 10]
    double step_lognu = 0.5;
    double step_theta = 2.0;
    double step_logsigma2 = 0.2;
    double step_logbeta = 0.3;
    bool adapt = true;
    int adapt_batch = 50;
    double adapt_target = 0.3;
    uint64_t seed = 1;
    Model model = Model::hpgrf;

    void validate() const {
        if (M < 1) throw ConfigError("chain config: M must be >= 1");
        if (burnin < 0 || burnin >= total) throw ConfigError("chain config: need burn-in < total");
        if (thin < 1) throw ConfigError("chain config: thinning must be >= 1");
    }
};

// Dataset flattened for the sampler's hot loops.
struct FlatData {
    int J = 0;
    std::vector<std::string> types;
    std::vector<std::vector<Point>> pts;  // per type, all studies concatenated
    std::vector<int> n_studies;           // per type

    static FlatData from(const Dataset& d) {
        FlatData f;
        f.J = d.J();
        f.types = d.types;
        f.pts.resize(f.J);
        f.n_studies.assign(f.J, 0);
        for (const auto& p : d.patterns) {
            const int j = d.type_index(p.type);
            ++f.n_studies[j];
            f.pts[j].insert(f.pts[j].end(), p.points.begin(), p.points.end());
        }
        return f;
    }

    long total_points() const {
        long n = 0;
        for (const auto& v : pts) n += static_cast<long>(v.size());
        return n;
    }
};

struct Snapshot {
    long iter = 0;
    JumpSet field;
    std::vector<double> sigma2;
    std::vector<uint32_t> counts;  // J x M assignment counts
};

struct Chain {
    int dim = 2;
    int J = 0;
    int M = 0;
    std::vector<std::string> types;
    double alpha_total = 0.0;
    std::vector<Snapshot> snaps;
    // scalar traces, one entry per saved iteration
    std::vector<long> iters;
    std::vector<double> tau, beta, logpost, trunc;
    std::vector<std::vector<double>> sigma2;  // per type
    std::vector<std::vector<double>> mass;    // per type, Lambda_j(B)
    uint64_t seed = 0;

    std::size_t size() const { return snaps.size(); }
};

// Output of a fit: one chain for the hierarchical model, one chain per type
// for the independent baseline.
struct FitResult {
    Model model = Model::hpgrf;
    std::vector<Chain> chains;

    const Chain& chain_for_type(int j) const {
        return model == Model::hpgrf ? chains[0] : chains[j];
    }
    int type_count() const {
        if (model == Model::hpgrf) return chains[0].J;
        return static_cast<int>(chains.size());
    }
};

class Sampler {
  public:
    Sampler(const Window& w, FlatData data, const ChainConfig& cfg, uint64_t stream_seed)
        : win_(w),
          cfg_(cfg),
          data_(std::move(data)),
          rng_(stream_seed),
          base_(BaseMeasure::uniform(w, cfg.alpha_total)) {
        cfg_.validate();
        J_ = data_.J;
        init_from_prior();
        lognu_step_.assign(cfg_.M, cfg_.step_lognu);
        theta_step_.assign(cfg_.M, cfg_.step_theta);
        logsig_step_.assign(J_, cfg_.step_logsigma2);
        logbeta_step_ = cfg_.step_logbeta;
        acc_nu_.assign(cfg_.M, 0);
        try_nu_.assign(cfg_.M, 0);
        acc_theta_.assign(cfg_.M, 0);
        try_theta_.assign(cfg_.M, 0);
        acc_sig_.assign(J_, 0);
        try_sig_.assign(J_, 0);
        logz_.assign(static_cast<std::size_t>(J_) * cfg_.M, 0.0);
        logz_valid_.assign(static_cast<std::size_t>(J_) * cfg_.M, 0);
        gibbs_assignments();
    }

    // -- state access ---------------------------------------------------------

    const JumpSet& field() const { return field_; }
    JumpSet& field() { return field_; }
    const std::vector<double>& sigma2() const { return sigma2_; }
    std::vector<double>& sigma2() { return sigma2_; }
    double tau() const { return field_.tau; }
    double beta() const { return field_.beta; }
    const std::vector<uint32_t>& counts() const { return counts_; }
    const std::vector<std::vector<int>>& assignments() const { return asg_; }
    const BaseMeasure& base() const { return base_; }
    Rng& rng() { return rng_; }
    long warnings() const { return warnings_; }

    // Replace the data (and optionally the point->jump labels) while keeping
    // the parameter state; used by joint-distribution (prior invariance)
    // checks where data is re-simulated between sweeps.
    void set_data(FlatData data, const std::vector<std::vector<int>>* labels = nullptr) {
        data_ = std::move(data);
        if (labels) {
            asg_ = *labels;
            rebuild_counts();
        } else {
            gibbs_assignments();
        }
    }

    // -- individual updates (exposed for unit tests) ---------------------------

    // Each focus is reassigned to jump m with probability proportional to
    // mu[j][m] k_sigma_j(y, theta_m).
    void gibbs_assignments() {
        asg_.assign(J_, {});
        const int M = cfg_.M;
        std::vector<double> w(M);
        std::vector<double> a(M);
        for (int j = 0; j < J_; ++j) {
            const double s2 = sigma2_[j];
            const double q = 0.5 / s2;
            for (int m = 0; m < M; ++m)
                a[m] = std::log(field_.child(j, m)) - log_norm(j, m);
            asg_[j].resize(data_.pts[j].size());
            for (std::size_t p = 0; p < data_.pts[j].size(); ++p) {
                const Point& y = data_.pts[j][p];
                double best = -std::numeric_limits<double>::infinity();
                for (int m = 0; m < M; ++m) {
                    const double r2 = sq_dist(y, field_.location(m), field_.dim);
                    w[m] = a[m] - q * r2;
                    if (w[m] > best) best = w[m];
                }
                int chosen = -1;
                if (!std::isfinite(best)) {
                    // all probabilities underflow: fall back to nearest jump
                    double rbest = std::numeric_limits<double>::infinity();
                    for (int m = 0; m < M; ++m) {
                        const double r2 = sq_dist(y, field_.location(m), field_.dim);
                        if (r2 < rbest) {
                            rbest = r2;
                            chosen = m;
                        }
                    }
                    ++warnings_;
                } else {
                    double total = 0.0;
                    const double cut = best - 34.0;  // exp(-34) ~ 1.7e-15
                    for (int m = 0; m < M; ++m)
                        if (w[m] > cut) total += std::exp(w[m] - best);
                    double u = rng_.u01() * total;
                    for (int m = 0; m < M; ++m) {
                        if (w[m] <= cut) continue;
                        u -= std::exp(w[m] - best);
                        if (u < 0.0) {
                            chosen = m;
                            break;
                        }
                    }
                    if (chosen < 0) {
                        for (int m = M - 1; m >= 0; --m)
                            if (w[m] > cut) {
                                chosen = m;
                                break;
                            }
                    }
                }
                asg_[j][p] = chosen;
            }
        }
        rebuild_counts();
    }

    // mu[j][m] | ... ~ Gamma(nu_m + n_jm, tau + n_j): the kernel is
    // window-normalized so each study contributes mass exactly mu[j][m].
    void gibbs_mu() {
        for (int j = 0; j < J_; ++j)
            for (int m = 0; m < cfg_.M; ++m) {
                const double shape = field_.nu[m] + counts_[idx(j, m)];
                const double rate = field_.tau + data_.n_studies[j];
                field_.child(j, m) = std::max(rng_.gamma(shape, rate), 1e-300);
            }
    }

    // tau | ... ~ Gamma(a0 + J sum_m nu_m, b0 + sum_jm mu_jm).
    void gibbs_tau() {
        double sum_nu = field_.parent_mass();
        double sum_mu = 0.0;
        for (double v : field_.mu) sum_mu += v;
        field_.tau = rng_.gamma(cfg_.prior_shape + J_ * sum_nu, cfg_.prior_rate + sum_mu);
    }

    // Per-jump Metropolis for (nu_m, theta_m). Log-nu random walks are
    // constrained to the (nu_{m+1}, nu_{m-1}) bracket so the ordering is
    // preserved; theta random walks reflect at box boundaries.
    void mh_nu_theta() {
        build_jump_lists();
        const int M = cfg_.M;
        for (int m = 0; m < M; ++m) {
            // --- nu ---
            ++try_nu_[m];
            const double nu = field_.nu[m];
            const double lo = (m + 1 < M) ? field_.nu[m + 1] : 0.0;
            const double hi = (m > 0) ? field_.nu[m - 1]
                                      : std::numeric_limits<double>::infinity();
            const double prop = nu * std::exp(lognu_step_[m] * rng_.normal());
            if (prop > lo && prop < hi) {
                const double delta = nu_log_target(m, prop) - nu_log_target(m, nu) +
                                     std::log(prop) - std::log(nu);
                if (delta >= 0.0 || rng_.u01p() < std::exp(delta)) {
                    field_.nu[m] = prop;
                    ++acc_nu_[m];
                }
            }
            // --- theta ---
            ++try_theta_[m];
            const Point cur = field_.location(m);
            Point prop_pt = cur;
            for (int k = 0; k < field_.dim; ++k)
                prop_pt[k] = reflect(cur[k] + theta_step_[m] * rng_.normal(), win_.lo()[k],
                                     win_.hi()[k]);
            bool ok = win_.contains(prop_pt);
            if (ok) {
                const double delta = theta_log_target(m, prop_pt) - theta_log_target(m, cur);
                if (delta >= 0.0 || rng_.u01p() < std::exp(delta)) {
                    for (int k = 0; k < field_.dim; ++k)
                        field_.theta[m * field_.dim + k] = prop_pt[k];
                    for (int j = 0; j < J_; ++j) logz_valid_[idx(j, m)] = 0;
                    ++acc_theta_[m];
                }
            }
        }
    }

    // sigma_j^2 by log random walk against the assigned-foci kernel product
    // (prior sigma_j^-2 ~ U[0,10] contributes e^{-x} in x = ln sigma^2);
    // beta by log random walk against the Levy terms and its Gamma prior.
    void mh_sigma_beta() {
        for (int j = 0; j < J_; ++j) {
            ++try_sig_[j];
            double ssr = 0.0;
            for (std::size_t p = 0; p < data_.pts[j].size(); ++p)
                ssr += sq_dist(data_.pts[j][p], field_.location(asg_[j][p]), field_.dim);
            const double x = std::log(sigma2_[j]);
            const double xp = x + logsig_step_[j] * rng_.normal();
            const double s2p = std::exp(xp);
            if (1.0 / s2p > cfg_.sigma_inv2_max) continue;  // outside prior support
            const double delta = sigma_log_target(j, s2p, ssr) - sigma_log_target(j, sigma2_[j], ssr);
            if (delta >= 0.0 || rng_.u01p() < std::exp(delta)) {
                sigma2_[j] = s2p;
                for (int m = 0; m < cfg_.M; ++m) logz_valid_[idx(j, m)] = 0;
                ++acc_sig_[j];
            }
        }
        ++try_beta_;
        const double x = std::log(field_.beta);
        const double xp = x + logbeta_step_ * rng_.normal();
        const double delta = beta_log_target(xp) - beta_log_target(x);
        if (delta >= 0.0 || rng_.u01p() < std::exp(delta)) {
            field_.beta = std::exp(xp);
            ++acc_beta_;
        }
    }

    void sweep() {
        gibbs_assignments();
        gibbs_mu();
        gibbs_tau();
        mh_nu_theta();
        mh_sigma_beta();
        ++iter_;
        if (cfg_.adapt && iter_ <= cfg_.burnin && iter_ % cfg_.adapt_batch == 0) adapt();
        check_finite();
    }

    long iteration() const { return iter_; }
    void freeze_adaptation() { cfg_.adapt = false; }

    // Full augmented log joint (unnormalized); the trace's logpost column.
    double log_joint() const {
        double s = levy_log_density(field_, base_, field_.beta);
        const double a0 = cfg_.prior_shape, b0 = cfg_.prior_rate;
        s += (a0 - 1.0) * std::log(field_.tau) - b0 * field_.tau;
        s += (a0 - 1.0) * std::log(field_.beta) - b0 * field_.beta;
        for (int j = 0; j < J_; ++j)
            for (int m = 0; m < cfg_.M; ++m) {
                const double nu = field_.nu[m], mu = field_.child(j, m);
                s += nu * std::log(field_.tau) - std::lgamma(nu) + (nu - 1.0) * std::log(mu) -
                     field_.tau * mu;
            }
        for (int j = 0; j < J_; ++j) {
            const double s2 = sigma2_[j];
            s += -data_.n_studies[j] * field_.type_mass(j);
            const double lognorm = -0.5 * field_.dim * std::log(2.0 * kPi * s2);
            for (std::size_t p = 0; p < data_.pts[j].size(); ++p) {
                const int m = asg_[j][p];
                const double r2 = sq_dist(data_.pts[j][p], field_.location(m), field_.dim);
                s += std::log(field_.child(j, m)) + lognorm - 0.5 * r2 / s2 -
                     log_norm_const(j, m);
            }
        }
        return s;
    }

    double acceptance_rate_nu() const { return ratio(acc_nu_, try_nu_); }
    double acceptance_rate_theta() const { return ratio(acc_theta_, try_theta_); }

    // Conditional target for beta at x = ln beta, optionally without the
    // truncation boundary term (the boundary-free conditional is exactly
    // Gamma(a0, b0 + sum nu), which unit tests exploit).
    double beta_log_target(double x, bool include_boundary = true) const {
        const double b = std::exp(x);
        double s = cfg_.prior_shape * x - cfg_.prior_rate * b - b * field_.parent_mass();
        if (include_boundary)
            s -= base_.total_mass * exp_integral_e1(b * field_.nu[cfg_.M - 1]);
        return s;
    }

  private:
    static double ratio(const std::vector<long>& a, const std::vector<long>& t) {
        long sa = 0, st = 0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            sa += a[i];
            st += t[i];
        }
        return st > 0 ? static_cast<double>(sa) / st : 0.0;
    }

    std::size_t idx(int j, int m) const { return static_cast<std::size_t>(j) * cfg_.M + m; }

    void init_from_prior() {
        const double beta = rng_.gamma(cfg_.prior_shape, cfg_.prior_rate);
        field_ = sample_parent_field(base_, win_, beta, cfg_.M, rng_);
        const double tau = rng_.gamma(cfg_.prior_shape, cfg_.prior_rate);
        sample_child_heights(field_, tau, J_, rng_);
        sigma2_.resize(J_);
        for (int j = 0; j < J_; ++j) sigma2_[j] = 1.0 / (rng_.u01p() * cfg_.sigma_inv2_max);
    }

    void rebuild_counts() {
        counts_.assign(static_cast<std::size_t>(J_) * cfg_.M, 0);
        for (int j = 0; j < J_; ++j)
            for (int m : asg_[j]) ++counts_[idx(j, m)];
    }

    double log_norm(int j, int m) {
        const std::size_t s = idx(j, m);
        if (!logz_valid_[s]) {
            logz_[s] = std::log(kernel_norm(field_.location(m), sigma2_[j], win_));
            logz_valid_[s] = 1;
        }
        return logz_[s];
    }

    double log_norm_const(int j, int m) const {
        return std::log(kernel_norm(field_.location(m), sigma2_[j], win_));
    }

    static double reflect(double x, double lo, double hi) {
        const double period = 2.0 * (hi - lo);
        double t = std::fmod(x - lo, period);
        if (t < 0.0) t += period;
        t = std::min(t, period - t);
        // keep strictly inside the half-open box
        const double r = lo + t;
        return std::min(r, std::nextafter(hi, lo));
    }

    double nu_log_target(int m, double nu) const {
        double s = -std::log(nu) - field_.beta * nu;
        for (int j = 0; j < J_; ++j) {
            const double mu = field_.child(j, m);
            s += nu * std::log(field_.tau) - std::lgamma(nu) + nu * std::log(mu);
        }
        if (m == cfg_.M - 1) s -= base_.total_mass * exp_integral_e1(field_.beta * nu);
        return s;
    }

    double theta_log_target(int m, const Point& pos) {
        double s = 0.0;
        for (int j = 0; j < J_; ++j) {
            if (counts_[idx(j, m)] == 0) continue;
            s -= counts_[idx(j, m)] * std::log(kernel_norm(pos, sigma2_[j], win_));
        }
        const auto& lst = jump_pts_[m];
        for (const auto& [j, p] : lst)
            s -= 0.5 * sq_dist(data_.pts[j][p], pos, field_.dim) / sigma2_[j];
        return s;
    }

    double sigma_log_target(int j, double s2, double ssr) {
        double s = -std::log(s2);  // prior in x-space
        const long n = static_cast<long>(data_.pts[j].size());
        s += -0.5 * field_.dim * n * std::log(2.0 * kPi * s2) - 0.5 * ssr / s2;
        for (int m = 0; m < cfg_.M; ++m) {
            if (counts_[idx(j, m)] == 0) continue;
            s -= counts_[idx(j, m)] * std::log(kernel_norm(field_.location(m), s2, win_));
        }
        return s;
    }

    void build_jump_lists() {
        jump_pts_.assign(cfg_.M, {});
        for (int j = 0; j < J_; ++j)
            for (std::size_t p = 0; p < asg_[j].size(); ++p)
                jump_pts_[asg_[j][p]].push_back({j, p});
    }

    void adapt() {
        auto tune = [&](double& step, long& acc, long& tries, double lo, double hi) {
            if (tries == 0) return;
            const double rate = static_cast<double>(acc) / tries;
            step *= std::exp(0.66 * (rate - cfg_.adapt_target));
            step = std::min(std::max(step, lo), hi);
            acc = 0;
            tries = 0;
        };
        for (int m = 0; m < cfg_.M; ++m) {
            tune(lognu_step_[m], acc_nu_[m], try_nu_[m], 1e-3, 6.0);
            tune(theta_step_[m], acc_theta_[m], try_theta_[m], 1e-3, win_.diameter());
        }
        for (int j = 0; j < J_; ++j) tune(logsig_step_[j], acc_sig_[j], try_sig_[j], 1e-3, 4.0);
        tune(logbeta_step_, acc_beta_, try_beta_, 1e-3, 4.0);
    }

    void check_finite() const {
        double sum_nu = field_.parent_mass();
        double sum_mu = 0.0;
        for (double v : field_.mu) sum_mu += v;
        bool ok = std::isfinite(field_.tau) && std::isfinite(field_.beta) &&
                  std::isfinite(sum_nu) && std::isfinite(sum_mu);
        for (int j = 0; j < J_; ++j) ok = ok && std::isfinite(sigma2_[j]);
        if (!ok) {
            std::ostringstream msg;
            msg << "numeric overflow in sampler target; state dump: iter=" << iter_
                << " tau=" << field_.tau << " beta=" << field_.beta << " sum_nu=" << sum_nu
                << " sum_mu=" << sum_mu;
            throw NumericError(msg.str());
        }
    }

    const Window& win_;
    ChainConfig cfg_;
    FlatData data_;
    Rng rng_;
    BaseMeasure base_;
    int J_ = 0;
    JumpSet field_;
    std::vector<double> sigma2_;
    std::vector<std::vector<int>> asg_;
    std::vector<uint32_t> counts_;
    std::vector<std::vector<std::pair<int, std::size_t>>> jump_pts_;
    std::vector<double> logz_;
    std::vector<uint8_t> logz_valid_;
    std::vector<double> lognu_step_, theta_step_, logsig_step_;
    double logbeta_step_ = 0.3;
    std::vector<long> acc_nu_, try_nu_, acc_theta_, try_theta_, acc_sig_, try_sig_;
    long acc_beta_ = 0, try_beta_ = 0;
    long iter_ = 0;
    long warnings_ = 0;
};

// Run one sampler to completion and package the saved states.
inline Chain run_single_chain(const Dataset& data, const Window& w, const ChainConfig& cfg,
                              uint64_t stream_seed) {
    Sampler s(w, FlatData::from(data), cfg, stream_seed);
    Chain chain;
    chain.dim = w.dim();
    chain.J = data.J();
    chain.M = cfg.M;
    chain.types = data.types;
    chain.alpha_total = s.base().total_mass;
    chain.seed = cfg.seed;
    chain.sigma2.resize(chain.J);
    chain.mass.resize(chain.J);
    for (long it = 1; it <= cfg.total; ++it) {
        s.sweep();
        if (it > cfg.burnin && (it - cfg.burnin) % cfg.thin == 0) {
            Snapshot snap;
            snap.iter = it;
            snap.field = s.field();
            snap.sigma2 = s.sigma2();
            snap.counts = s.counts();
            chain.snaps.push_back(std::move(snap));
            chain.iters.push_back(it);
            chain.tau.push_back(s.tau());
            chain.beta.push_back(s.beta());
            chain.logpost.push_back(s.log_joint());
            chain.trunc.push_back(truncation_error(s.field(), s.base(), s.beta()));
            for (int j = 0; j < chain.J; ++j) {
                chain.sigma2[j].push_back(s.sigma2()[j]);
                chain.mass[j].push_back(s.field().type_mass(j));
            }
        }
    }
    if (s.warnings() > 0)
        std::cerr << "warning: " << s.warnings()
                  << " foci had fully-underflowed assignment weights (nearest jump used)\n";
    return chain;
}

// HPGRF: one joint sampler on stream (seed, 0). IPGRF: J decoupled samplers,
// type j on stream (seed, j), so a one-type dataset gives bit-identical
// output under either model.
inline FitResult run_chain(const Dataset& data, const Window& w, const ChainConfig& cfg) {
    if (data.J() == 0) throw DataError("run_chain: dataset has no types");
    FitResult out;
    out.model = cfg.model;
    if (cfg.model == Model::hpgrf) {
        out.chains.push_back(run_single_chain(data, w, cfg, substream_seed(cfg.seed, 0)));
    } else {
        for (int j = 0; j < data.J(); ++j) {
            Dataset sub;
            sub.types = {data.types[j]};
            for (const auto& p : data.patterns)
                if (p.type == data.types[j]) sub.patterns.push_back(p);
            out.chains.push_back(run_single_chain(sub, w, cfg, substream_seed(cfg.seed, j)));
        }
    }
    return out;
}

inline void accumulate_kernel(IntensityGrid& g, const Point& c, double wgt, double q,
                              double cut);

// Posterior mean intensity of type j on a lattice (expected foci per mm^d per
// study): the snapshot average of sum_m mu[j][m] k_sigma_j(., theta_m).
// Kernel contributions are accumulated within 6 sigma of each jump.
inline IntensityGrid posterior_intensity(const Chain& chain, const Window& w, double spacing,
                                         int j) {
    if (chain.snaps.empty()) throw DataError("posterior_intensity: empty chain");
    IntensityGrid g = make_grid(w, spacing);
    for (const auto& snap : chain.snaps) {
        const double s2 = snap.sigma2[j];
        const double sigma = std::sqrt(s2);
        const double cut = 6.0 * sigma;
        const double norm = std::pow(2.0 * kPi * s2, -0.5 * g.dim);
        for (int m = 0; m < snap.field.M; ++m) {
            const double mu = snap.field.child(j, m);
            if (mu <= 0.0) continue;
            const Point c = snap.field.location(m);
            const double wgt = mu * norm / kernel_norm(c, s2, w);
            accumulate_kernel(g, c, wgt, 0.5 / s2, cut);
        }
    }
    const double inv = 1.0 / static_cast<double>(chain.snaps.size());
    for (long i = 0; i < g.size(); ++i) g.values[i] = g.inside[i] ? g.values[i] * inv : 0.0;
    return g;
}

inline void accumulate_kernel(IntensityGrid& g, const Point& c, double wgt, double q,
                              double cut) {
    long lo[3] = {0, 0, 0}, hi[3] = {0, 0, 0};
    for (int k = 0; k < g.dim; ++k) {
        lo[k] = std::max(0L, static_cast<long>(std::floor((c[k] - cut - g.origin[k]) / g.voxel[k])));
        hi[k] = std::min(g.n[k] - 1,
                         static_cast<long>(std::floor((c[k] + cut - g.origin[k]) / g.voxel[k])));
    }
    if (g.dim == 2) {
        for (long iy = lo[1]; iy <= hi[1]; ++iy) {
            const double dy = g.origin[1] + (iy + 0.5) * g.voxel[1] - c[1];
            for (long ix = lo[0]; ix <= hi[0]; ++ix) {
                const double dx = g.origin[0] + (ix + 0.5) * g.voxel[0] - c[0];
                g.values[ix + g.n[0] * iy] += wgt * std::exp(-q * (dx * dx + dy * dy));
            }
        }
    } else {
        for (long iz = lo[2]; iz <= hi[2]; ++iz) {
            const double dz = g.origin[2] + (iz + 0.5) * g.voxel[2] - c[2];
            for (long iy = lo[1]; iy <= hi[1]; ++iy) {
                const double dy = g.origin[1] + (iy + 0.5) * g.voxel[1] - c[1];
                for (long ix = lo[0]; ix <= hi[0]; ++ix) {
                    const double dx = g.origin[0] + (ix + 0.5) * g.voxel[0] - c[0];
                    g.values[ix + g.n[0] * (iy + g.n[1] * iz)] +=
                        wgt * std::exp(-q * (dx * dx + dy * dy + dz * dz));
                }
            }
        }
    }
}

}  // namespace hpgrf
