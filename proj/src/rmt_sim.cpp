#include "mpclt/rmt_sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <random>

#include "mpclt/stats.hpp"

#ifdef MPCLT_HAVE_OPENMP
#include <omp.h>
#endif

namespace mpclt {

namespace {
constexpr double kSqrt3 = 1.7320508075688772;
}

EntryKind entry_kind_from_string(const std::string& s) {
    if (s == "real_gaussian") return EntryKind::real_gaussian;
    if (s == "complex_gaussian") return EntryKind::complex_gaussian;
    if (s == "rademacher") return EntryKind::rademacher;
    if (s == "uniform_scaled") return EntryKind::uniform_scaled;
    throw DomainError("unknown entry distribution '" + s + "'");
}

std::string to_string(EntryKind k) {
    switch (k) {
        case EntryKind::real_gaussian: return "real_gaussian";
        case EntryKind::complex_gaussian: return "complex_gaussian";
        case EntryKind::rademacher: return "rademacher";
        case EntryKind::uniform_scaled: return "uniform_scaled";
    }
    return "?";
}

MomentParams EntryDistribution::moments() const {
    switch (kind) {
        case EntryKind::real_gaussian: return {1.0, 0.0};
        case EntryKind::complex_gaussian: return {0.0, 0.0};
        case EntryKind::rademacher: return {1.0, -2.0};
        // E x^4 = 9/5 for uniform on [-sqrt(3), sqrt(3)]
        case EntryKind::uniform_scaled: return {1.0, 9.0 / 5.0 - 3.0};
    }
    throw DomainError("moments: bad kind");
}

double EntryDistribution::abs_fourth_moment() const {
    const MomentParams m = moments();
    return m.kappa2 + m.kappa1 + 2.0;
}

void SimConfig::validate() const {
    if (p < 1 || n < 1) throw DomainError("SimConfig: p and n must be positive");
    if (p >= n) throw DomainError("SimConfig: requires p < n (y_n < 1)");
    if (replicates < 1) throw DomainError("SimConfig: replicates must be >= 1");
    if (functions.empty()) throw DomainError("SimConfig: needs at least one test function");
    if (truncate && !(delta_exponent > 0.0))
        throw DomainError("SimConfig: delta_exponent must be positive");
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
    // splitmix64 step: seed advanced by the golden-ratio increment per index,
    // then finalized through the avalanche permutation
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

namespace {

// mt19937_64 stream with an explicit Box-Muller transform, so normal draws do
// not depend on the standard library's distribution implementation.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}
    double uniform() {  // (0, 1]
        return (static_cast<double>(gen_() >> 11) + 1.0) * 0x1.0p-53;
    }
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double r = std::sqrt(-2.0 * std::log(uniform()));
        const double t = 2.0 * 3.14159265358979323846 * uniform();
        spare_ = r * std::sin(t);
        have_spare_ = true;
        return r * std::cos(t);
    }
    double rademacher() { return (gen_() & 1u) ? 1.0 : -1.0; }
    double uniform_scaled() { return (2.0 * uniform() - 1.0) * kSqrt3; }

private:
    std::mt19937_64 gen_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

double draw_real(Rng& rng, EntryKind kind) {
    switch (kind) {
        case EntryKind::real_gaussian: return rng.normal();
        case EntryKind::rademacher: return rng.rademacher();
        case EntryKind::uniform_scaled: return rng.uniform_scaled();
        default: throw DomainError("draw_real: complex kind in real sampler");
    }
}

}  // namespace

Eigen::MatrixXd sample_matrix_real(const SimConfig& cfg, int replicate_index) {
    if (cfg.dist.is_complex())
        throw DomainError("sample_matrix_real: distribution is complex");
    Rng rng(mix_seed(cfg.seed, static_cast<std::uint64_t>(replicate_index)));
    Eigen::MatrixXd x(cfg.p, cfg.n);
    for (int i = 0; i < cfg.p; ++i)
        for (int j = 0; j < cfg.n; ++j) x(i, j) = draw_real(rng, cfg.dist.kind);
    return x;
}

Eigen::MatrixXcd sample_matrix_complex(const SimConfig& cfg, int replicate_index) {
    if (!cfg.dist.is_complex())
        throw DomainError("sample_matrix_complex: distribution is real");
    Rng rng(mix_seed(cfg.seed, static_cast<std::uint64_t>(replicate_index)));
    Eigen::MatrixXcd x(cfg.p, cfg.n);
    const double s = 1.0 / std::sqrt(2.0);  // Re, Im independent N(0, 1/2)
    for (int i = 0; i < cfg.p; ++i)
        for (int j = 0; j < cfg.n; ++j) {
            const double re = rng.normal(), im = rng.normal();
            x(i, j) = cplx(s * re, s * im);
        }
    return x;
}

namespace {

// Analytic (mean, sigma) of the entry law truncated at |x| <= thr. All four
// registry laws admit closed forms, so no auxiliary sampling is needed.
struct TruncatedMoments {
    double mean;
    double sigma;
};

TruncatedMoments truncated_moments(EntryKind kind, double thr) {
    switch (kind) {
        case EntryKind::real_gaussian: {
            const double phi = std::exp(-0.5 * thr * thr) / std::sqrt(2.0 * 3.14159265358979323846);
            const double tail = 1.0 - normal_cdf(thr);
            const double var = 1.0 - 2.0 * (thr * phi + tail);
            return {0.0, std::sqrt(std::max(0.0, var))};
        }
        case EntryKind::complex_gaussian: {
            // |x|^2 ~ Exp(1): E[|x|^2; |x| <= T] = 1 - (1 + T^2) exp(-T^2)
            const double var = 1.0 - (1.0 + thr * thr) * std::exp(-thr * thr);
            return {0.0, std::sqrt(std::max(0.0, var))};
        }
        case EntryKind::rademacher:
            return {0.0, thr >= 1.0 ? 1.0 : 0.0};
        case EntryKind::uniform_scaled: {
            if (thr >= kSqrt3) return {0.0, 1.0};
            const double var = thr * thr * thr / (3.0 * kSqrt3);
            return {0.0, std::sqrt(var)};
        }
    }
    throw DomainError("truncated_moments: bad kind");
}

template <class Matrix>
void truncate_impl(Matrix& x, int n, double delta_exponent, EntryKind kind) {
    if (!(delta_exponent > 0.0) || n < 1)
        throw DomainError("truncate_renormalize: bad n or delta_exponent");
    const double thr = std::sqrt(static_cast<double>(n)) * std::pow(n, -delta_exponent);
    const TruncatedMoments tm = truncated_moments(kind, thr);
    if (!(tm.sigma > 0.0))
        throw DomainError("truncate_renormalize: threshold truncates every entry (sigma_n = 0)");
    for (Eigen::Index j = 0; j < x.cols(); ++j)
        for (Eigen::Index i = 0; i < x.rows(); ++i) {
            auto v = x(i, j);
            if (std::abs(v) > thr) v = decltype(v)(0);
            x(i, j) = (v - decltype(v)(tm.mean)) / tm.sigma;
        }
}

template <class Matrix>
std::vector<double> eigenvalues_impl(const Matrix& x) {
    const Eigen::Index p = x.rows(), n = x.cols();
    if (p > n) throw DomainError("eigenvalues: requires p <= n");
    Matrix b = Matrix::Zero(p, p);
    b.template selfadjointView<Eigen::Lower>().rankUpdate(x, 1.0 / static_cast<double>(n));
    Eigen::SelfAdjointEigenSolver<Matrix> solver;
    solver.compute(b, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("eigenvalues: eigensolver did not converge");
    std::vector<double> ev(solver.eigenvalues().data(), solver.eigenvalues().data() + p);
    const double scale = std::max(1.0, std::fabs(ev.back()));
    for (double& v : ev) {
        if (v < 0.0) {
            if (v < -1e-10 * scale)
                throw std::runtime_error("eigenvalues: negative eigenvalue beyond roundoff");
            v = 0.0;
        }
    }
    return ev;  // SelfAdjointEigenSolver returns ascending order
}

}  // namespace

void truncate_renormalize(Eigen::MatrixXd& x, int n, double delta_exponent, EntryKind kind) {
    if (kind == EntryKind::complex_gaussian)
        throw DomainError("truncate_renormalize: complex kind on a real matrix");
    truncate_impl(x, n, delta_exponent, kind);
}

void truncate_renormalize(Eigen::MatrixXcd& x, int n, double delta_exponent, EntryKind kind) {
    truncate_impl(x, n, delta_exponent, kind);
}

std::vector<double> eigenvalues(const Eigen::MatrixXd& x) { return eigenvalues_impl(x); }
std::vector<double> eigenvalues(const Eigen::MatrixXcd& x) { return eigenvalues_impl(x); }

double lss_with_centering(const std::vector<double>& eigs, const TestFunction& f,
                          double centering) {
    double acc = 0.0;
    for (double lambda : eigs) {
        if (!f.contains(lambda))
            throw DomainError("lss: eigenvalue " + std::to_string(lambda) +
                              " outside the domain of '" + f.name + "'");
        acc += f(lambda);
    }
    return acc - static_cast<double>(eigs.size()) * centering;
}

double lss(const std::vector<double>& eigs, const TestFunction& f, double y_n,
           const QuadConfig& quad) {
    return lss_with_centering(eigs, f, centering_integral(f, y_n, quad));
}

double esd_distance(const std::vector<double>& eigs, const MPModel& model) {
    std::vector<double> sorted(eigs);
    std::sort(sorted.begin(), sorted.end());
    const double p = static_cast<double>(sorted.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const double cdf = model.cdf(sorted[i]);
        d = std::max(d, std::fabs((i + 1) / p - cdf));
        d = std::max(d, std::fabs(i / p - cdf));
    }
    return d;
}

ReplicateResult run_replicate(const SimConfig& cfg, int replicate_index,
                              const std::vector<TestFunction>& funcs,
                              const std::vector<double>& centerings, const MPModel& model) {
    ReplicateResult res;
    if (cfg.dist.is_complex()) {
        Eigen::MatrixXcd x = sample_matrix_complex(cfg, replicate_index);
        if (cfg.truncate) truncate_renormalize(x, cfg.n, cfg.delta_exponent, cfg.dist.kind);
        res.eigenvalues = eigenvalues(x);
    } else {
        Eigen::MatrixXd x = sample_matrix_real(cfg, replicate_index);
        if (cfg.truncate) truncate_renormalize(x, cfg.n, cfg.delta_exponent, cfg.dist.kind);
        res.eigenvalues = eigenvalues(x);
    }
    res.gn_values.resize(funcs.size(), 0.0);
    try {
        for (std::size_t i = 0; i < funcs.size(); ++i)
            res.gn_values[i] = lss_with_centering(res.eigenvalues, funcs[i], centerings[i]);
    } catch (const DomainError& e) {
        res.rejected = true;
        res.reject_reason = e.what();
    }
    res.ks_to_mp = esd_distance(res.eigenvalues, model);
    return res;
}

int thread_budget(int requested) {
    int budget = 1;
#ifdef MPCLT_HAVE_OPENMP
    budget = omp_get_max_threads();
#endif
    if (const char* env = std::getenv("MPCLT_THREADS")) {
        const int cap = std::atoi(env);
        if (cap > 0) budget = std::min(budget, cap);
    }
    if (requested > 0) budget = std::min(budget, requested);
    return std::max(1, budget);
}

namespace {

SimSummary summarize(const SimConfig& cfg, const std::vector<TestFunction>& funcs,
                     const std::vector<double>& centerings,
                     const std::vector<double>& pred_mean,
                     const std::vector<std::vector<double>>& pred_cov,
                     const std::vector<ReplicateResult>& reps) {
    SimSummary s;
    s.replicates_requested = cfg.replicates;
    s.y_n = cfg.y_n();
    s.seed = cfg.seed;
    s.kind = cfg.dist.kind;
    s.truncated = cfg.truncate;

    const std::size_t nf = funcs.size();
    std::vector<std::vector<double>> values(nf);
    std::vector<double> ks_diag;
    for (const ReplicateResult& r : reps) {  // replicate order: deterministic reduction
        if (r.rejected) {
            ++s.rejected;
            continue;
        }
        for (std::size_t i = 0; i < nf; ++i) values[i].push_back(r.gn_values[i]);
        ks_diag.push_back(r.ks_to_mp);
    }
    s.replicates_used = static_cast<int>(ks_diag.size());
    if (s.replicates_used == 0) throw std::runtime_error("run: every replicate was rejected");

    s.functions.resize(nf);
    for (std::size_t i = 0; i < nf; ++i) {
        FunctionSummary& fs = s.functions[i];
        fs.name = funcs[i].name;
        fs.centering = centerings[i];
        fs.predicted_mean = pred_mean[i];
        fs.predicted_variance = pred_cov[i][i];
        fs.empirical_mean = sample_mean(values[i]);
        fs.empirical_variance = sample_variance(values[i]);
        if (fs.predicted_variance > 0.0 && values[i].size() > 1) {
            std::vector<double> standardized(values[i]);
            const double sd = std::sqrt(fs.predicted_variance);
            for (double& v : standardized) v = (v - fs.predicted_mean) / sd;
            fs.ks_statistic = ks_statistic_normal(standardized);
            fs.ks_pvalue = ks_pvalue(fs.ks_statistic, standardized.size());
        } else {
            fs.ks_statistic = std::numeric_limits<double>::quiet_NaN();
            fs.ks_pvalue = std::numeric_limits<double>::quiet_NaN();
        }
    }
    s.empirical_covariance.assign(nf, std::vector<double>(nf, 0.0));
    for (std::size_t i = 0; i < nf; ++i)
        for (std::size_t j = 0; j < nf; ++j)
            s.empirical_covariance[i][j] =
                i <= j ? sample_covariance(values[i], values[j]) : s.empirical_covariance[j][i];
    s.predicted_covariance = pred_cov;
    s.median_diagnostics = {median(ks_diag)};
    return s;
}

SimSummary run_impl(const SimConfig& cfg, bool parallel) {
    cfg.validate();
    const MPModel model(cfg.y_n());
    std::vector<TestFunction> funcs;
    funcs.reserve(cfg.functions.size());
    for (const std::string& name : cfg.functions) {
        TestFunction f = builtin(name);
        f.require_interval(model.edge_low(), model.edge_high(), "run");
        funcs.push_back(std::move(f));
    }
    const MomentParams mom = cfg.dist.moments();
    std::vector<double> centerings(funcs.size());
    std::vector<double> pred_mean(funcs.size());
    std::vector<std::vector<double>> pred_cov(funcs.size(), std::vector<double>(funcs.size()));
    for (std::size_t i = 0; i < funcs.size(); ++i) {
        centerings[i] = centering_integral(funcs[i], cfg.y_n(), cfg.quad);
        pred_mean[i] = limiting_mean(funcs[i], model, mom, cfg.quad);
        for (std::size_t j = 0; j <= i; ++j) {
            pred_cov[i][j] = limiting_cov(funcs[i], funcs[j], model, mom, cfg.quad);
            pred_cov[j][i] = pred_cov[i][j];
        }
    }

    std::vector<ReplicateResult> reps(cfg.replicates);
#ifdef MPCLT_HAVE_OPENMP
    if (parallel) {
        const int threads = thread_budget(cfg.max_threads);
        std::atomic<bool> failed{false};
        std::string failure;
#pragma omp parallel for schedule(dynamic) num_threads(threads)
        for (int r = 0; r < cfg.replicates; ++r) {
            if (failed.load(std::memory_order_relaxed)) continue;
            try {
                reps[r] = run_replicate(cfg, r, funcs, centerings, model);
            } catch (const std::exception& e) {
                bool expected = false;
                if (failed.compare_exchange_strong(expected, true)) {
#pragma omp critical(mpclt_run_failure)
                    failure = e.what();
                }
            }
        }
        if (failed.load()) throw std::runtime_error("run: replicate failed: " + failure);
        return summarize(cfg, funcs, centerings, pred_mean, pred_cov, reps);
    }
#else
    (void)parallel;
#endif
    for (int r = 0; r < cfg.replicates; ++r)
        reps[r] = run_replicate(cfg, r, funcs, centerings, model);
    return summarize(cfg, funcs, centerings, pred_mean, pred_cov, reps);
}

}  // namespace

SimSummary run(const SimConfig& cfg) { return run_impl(cfg, true); }

SimSummary run_serial(const SimConfig& cfg) { return run_impl(cfg, false); }

QuadformReport quadform_concentration(EntryKind kind, const Eigen::MatrixXcd& c, int replicates,
                                      std::uint64_t seed) {
    if (c.rows() != c.cols()) throw DomainError("quadform_concentration: C must be square");
    if (replicates < 1) throw DomainError("quadform_concentration: replicates must be >= 1");
    const Eigen::Index p = c.rows();
    const double tr_c = c.trace().real();
    const bool is_complex = kind == EntryKind::complex_gaussian;
    const double s = 1.0 / std::sqrt(2.0);
    double msd = 0.0;
    for (int r = 0; r < replicates; ++r) {
        Rng rng(mix_seed(seed, static_cast<std::uint64_t>(r)));
        Eigen::VectorXcd x(p);
        for (Eigen::Index i = 0; i < p; ++i)
            x(i) = is_complex ? cplx(s * rng.normal(), s * rng.normal())
                              : cplx(draw_real(rng, kind), 0.0);
        const cplx q = x.dot(c * x);  // x^* C x
        msd += std::norm(q - tr_c);
    }
    msd /= replicates;
    EntryDistribution d{kind};
    const double scale = d.abs_fourth_moment() * (c * c.adjoint()).trace().real();
    return {msd, scale, scale > 0.0 ? msd / scale : 0.0};
}

}  // namespace mpclt
