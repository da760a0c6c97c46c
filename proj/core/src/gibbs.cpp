#include "mflab/gibbs.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mflab/landscape.hpp"
#include "mflab/numerics.hpp"

namespace mflab {

namespace {

void require_open_field(const FieldTrajectory& traj, const char* where) {
    for (size_t i = 0; i < traj.p.size(); ++i)
        if (traj.p[i] <= 0.0 || traj.p[i] >= 1.0)
            throw InfiniteFieldError(std::string(where) +
                                         ": field value outside (0,1) at step " +
                                         std::to_string(i + 1),
                                     static_cast<long>(i));
}

}  // namespace

ModelParams::ModelParams(double beta_, double J_, long n_) : beta(beta_), J(J_), n(n_) {
    if (!(beta > 0.0)) throw DomainError("ModelParams: beta must be positive");
    if (!(J > 0.0)) throw DomainError("ModelParams: J must be positive");
    if (n < 1) throw DomainError("ModelParams: n must be at least 1");
}

double hamiltonian_energy(const SpinConfiguration& sigma, const FieldTrajectory& traj,
                          const ModelParams& params) {
    long n = params.n;
    if (static_cast<long>(sigma.size()) != n ||
        static_cast<long>(traj.p.size()) != n)
        throw DomainError("hamiltonian_energy: length mismatch");
    require_open_field(traj, "hamiltonian_energy");
    long total = 0;
    NeumaierSum field_term;
    for (long i = 0; i < n; ++i) {
        int s = sigma[static_cast<size_t>(i)];
        if (s != 1 && s != -1)
            throw DomainError("hamiltonian_energy: spin entries must be +1 or -1");
        total += s;
        double p = traj.p[static_cast<size_t>(i)];
        field_term.add(double(s) * (std::log(p) - std::log1p(-p)));
    }
    double interaction =
        -params.beta_J() / (2.0 * double(n)) * double(total) * double(total);
    return interaction - 0.5 * field_term.value();
}

LatticeDistribution magnetization_distribution(const FieldTrajectory& traj,
                                               const ModelParams& params) {
    if (static_cast<long>(traj.p.size()) != params.n)
        throw DomainError("magnetization_distribution: length mismatch");
    LatticeDistribution walk = walk_distribution(traj);
    long n = params.n;
    double tilt = params.beta_J() / (2.0 * double(n));
    std::vector<double> lm(walk.log_masses().begin(), walk.log_masses().end());
    for (size_t j = 0; j < lm.size(); ++j) {
        if (is_log_zero(lm[j])) continue;
        double k = double(walk.support_point(static_cast<long>(j)));
        lm[j] += tilt * k * k;
    }
    return LatticeDistribution(n, LawKind::Magnetization, std::move(lm));
}

double log_partition(const FieldTrajectory& traj, const ModelParams& params) {
    long n = params.n;
    if (static_cast<long>(traj.p.size()) != n)
        throw DomainError("log_partition: length mismatch");
    require_open_field(traj, "log_partition");
    LatticeDistribution walk = walk_distribution(traj);
    double tilt = params.beta_J() / (2.0 * double(n));
    std::vector<double> terms;
    terms.reserve(walk.log_masses().size());
    for (size_t j = 0; j < walk.log_masses().size(); ++j) {
        double lm = walk.log_masses()[j];
        if (is_log_zero(lm)) continue;
        double k = double(walk.support_point(static_cast<long>(j)));
        terms.push_back(lm + tilt * k * k);
    }
    NeumaierSum norm;
    for (double p : traj.p) norm.add(std::log(p) + std::log1p(-p));
    return logsumexp(terms) - 0.5 * norm.value();
}

WalkDpTable::WalkDpTable(const FieldTrajectory& traj) {
    n_ = traj.n();
    if (n_ < 1) throw DomainError("WalkDpTable: empty trajectory");
    if (n_ > 4096)
        throw DomainError(
            "WalkDpTable: n > 4096; the conditioned sampler stores a quadratic "
            "table");
    log_up_.resize(static_cast<size_t>(n_));
    log_down_.resize(static_cast<size_t>(n_));
    for (long i = 0; i < n_; ++i) {
        double p = traj.p[static_cast<size_t>(i)];
        if (p < 0.0 || p > 1.0)
            throw DomainError("WalkDpTable: field value outside [0,1]");
        log_up_[static_cast<size_t>(i)] = p > 0.0 ? std::log(p) : log_zero;
        log_down_[static_cast<size_t>(i)] = p < 1.0 ? std::log1p(-p) : log_zero;
    }
    rows_.resize(static_cast<size_t>(n_) + 1);
    rows_[0] = {0.0};
    for (long i = 1; i <= n_; ++i) {
        const std::vector<double>& prev = rows_[static_cast<size_t>(i - 1)];
        std::vector<double> cur(static_cast<size_t>(i) + 1, log_zero);
        double lu = log_up_[static_cast<size_t>(i - 1)];
        double ld = log_down_[static_cast<size_t>(i - 1)];
        for (long j = 0; j <= i; ++j) {
            double up = (j >= 1 && !is_log_zero(prev[static_cast<size_t>(j - 1)]) &&
                         !is_log_zero(lu))
                            ? prev[static_cast<size_t>(j - 1)] + lu
                            : log_zero;
            double down = (j <= i - 1 && !is_log_zero(prev[static_cast<size_t>(j)]) &&
                           !is_log_zero(ld))
                              ? prev[static_cast<size_t>(j)] + ld
                              : log_zero;
            cur[static_cast<size_t>(j)] = logaddexp(up, down);
        }
        rows_[static_cast<size_t>(i)] = std::move(cur);
    }
}

double WalkDpTable::log_prob(long level, long k) const {
    if (level < 0 || level > n_) throw DomainError("WalkDpTable: level out of range");
    if ((k + level) % 2 != 0 || k < -level || k > level) return log_zero;
    return rows_[static_cast<size_t>(level)][static_cast<size_t>((k + level) / 2)];
}

SpinConfiguration WalkDpTable::sample_conditioned(long k, std::mt19937_64& rng) const {
    if (is_log_zero(log_prob(n_, k)))
        throw DomainError("WalkDpTable: conditioning on a zero-probability endpoint");
    SpinConfiguration sigma(static_cast<size_t>(n_));
    long cur = k;
    for (long i = n_; i >= 1; --i) {
        double lp_cur = log_prob(i, cur);
        double lp_up_prev = log_prob(i - 1, cur - 1);
        double lu = log_up_[static_cast<size_t>(i - 1)];
        double p_up = 0.0;
        if (!is_log_zero(lp_up_prev) && !is_log_zero(lu))
            p_up = std::exp(lu + lp_up_prev - lp_cur);
        if (uniform01(rng) < p_up) {
            sigma[static_cast<size_t>(i - 1)] = 1;
            cur -= 1;
        } else {
            sigma[static_cast<size_t>(i - 1)] = -1;
            cur += 1;
        }
    }
    return sigma;
}

GibbsSampler::GibbsSampler(const FieldTrajectory& traj, const ModelParams& params)
    : table_(traj), law_(magnetization_distribution(traj, params)) {
    cdf_.resize(law_.log_masses().size());
    NeumaierSum acc;
    for (size_t j = 0; j < cdf_.size(); ++j) {
        double lm = law_.log_masses()[j];
        if (!is_log_zero(lm)) acc.add(std::exp(lm));
        cdf_[j] = acc.value();
    }
    if (!cdf_.empty()) cdf_.back() = 1.0;
}

SpinConfiguration GibbsSampler::sample(std::mt19937_64& rng) const {
    double u = uniform01(rng);
    size_t j = static_cast<size_t>(
        std::lower_bound(cdf_.begin(), cdf_.end(), u) - cdf_.begin());
    if (j >= cdf_.size()) j = cdf_.size() - 1;
    long k = law_.support_point(static_cast<long>(j));
    return table_.sample_conditioned(k, rng);
}

SpinConfiguration sample_configuration(const FieldTrajectory& traj,
                                       const ModelParams& params,
                                       std::mt19937_64& rng) {
    GibbsSampler sampler(traj, params);
    return sampler.sample(rng);
}

HsDensity::HsDensity(const FieldTrajectory& traj, const ModelParams& params, double m,
                     double alpha)
    : traj_(traj), beta_J_(params.beta_J()), n_(params.n), m_(m) {
    if (static_cast<long>(traj.p.size()) != params.n)
        throw DomainError("HsDensity: length mismatch");
    if (!(alpha > 0.5 && alpha <= 1.0))
        throw DomainError("HsDensity: alpha must lie in (1/2, 1]");
    scale_ = std::pow(double(n_), -(1.0 - alpha));
    auto logf = [this](double u) {
        return -double(n_) * eval_Gn(traj_, beta_J_, m_ + u * scale_, 0);
    };
    // The peak sits within O(1) of the origin in s units once m is near a
    // minimizer; a unit halfwidth is a safe seed for the expanding scan.
    LogIntegralResult r = log_integrate_exp(logf, 0.0, 1.0, 1e-10, 60.0);
    log_norm_ = r.log_value;
    argmax_ = r.argmax;
}

double HsDensity::log_value(double s) const {
    return -double(n_) * eval_Gn(traj_, beta_J_, m_ + s * scale_, 0) - log_norm_;
}

double hs_density(const FieldTrajectory& traj, const ModelParams& params, double m,
                  double alpha, double s) {
    HsDensity d(traj, params, m, alpha);
    return d(s);
}

}  // namespace mflab
