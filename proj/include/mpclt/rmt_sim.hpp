#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "mpclt/clt_limits.hpp"
#include "mpclt/common.hpp"
#include "mpclt/mp_model.hpp"
#include "mpclt/quadrature.hpp"
#include "mpclt/test_functions.hpp"

namespace mpclt {

enum class EntryKind { real_gaussian, complex_gaussian, rademacher, uniform_scaled };

EntryKind entry_kind_from_string(const std::string& s);
std::string to_string(EntryKind k);

/// Entry law of the data matrix: standardized (mean 0, E|x|^2 = 1) with all
/// moments finite. uniform_scaled is the uniform law on [-sqrt(3), sqrt(3)].
struct EntryDistribution {
    EntryKind kind = EntryKind::real_gaussian;
    bool is_complex() const { return kind == EntryKind::complex_gaussian; }
    MomentParams moments() const;      // (kappa1, kappa2)
    double abs_fourth_moment() const;  // E|x|^4
};

struct SimConfig {
    int p = 0;
    int n = 0;
    EntryDistribution dist;
    int replicates = 1;
    std::uint64_t seed = 0;
    std::vector<std::string> functions;  // registry names
    bool truncate = false;
    double delta_exponent = 0.125;  // delta_n = n^{-delta_exponent}
    QuadConfig quad;
    int max_threads = 0;  // 0 = library default / MPCLT_THREADS

    double y_n() const { return static_cast<double>(p) / n; }
    void validate() const;
};

struct ReplicateResult {
    std::vector<double> eigenvalues;  // ascending, length p
    std::vector<double> gn_values;    // aligned with SimConfig::functions
    double ks_to_mp = 0.0;
    bool rejected = false;
    std::string reject_reason;
};

struct FunctionSummary {
    std::string name;
    double centering;  // Int f dF_{y_n}
    double predicted_mean;
    double predicted_variance;
    double empirical_mean;
    double empirical_variance;  // NaN for a single replicate
    double ks_statistic;        // standardized G_n(f) against N(0,1)
    double ks_pvalue;
};

struct SimSummary {
    int replicates_requested = 0;
    int replicates_used = 0;
    int rejected = 0;
    double y_n = 0.0;
    std::uint64_t seed = 0;
    EntryKind kind = EntryKind::real_gaussian;
    bool truncated = false;
    std::vector<FunctionSummary> functions;
    std::vector<std::vector<double>> empirical_covariance;
    std::vector<std::vector<double>> predicted_covariance;
    std::vector<double> median_diagnostics;  // median KS distance to F_{y_n}
};

/// Replicate seed derivation: the 64-bit run seed is mixed with the replicate
/// index through the splitmix64 avalanche function, so replicate streams are
/// independent of execution order.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index);

Eigen::MatrixXd sample_matrix_real(const SimConfig& cfg, int replicate_index);
Eigen::MatrixXcd sample_matrix_complex(const SimConfig& cfg, int replicate_index);

/// Entrywise truncation at sqrt(n) * n^{-delta_exponent} followed by
/// recentering/rescaling with the truncated law's analytic moments. Throws if
/// the threshold truncates everything (sigma_n = 0).
void truncate_renormalize(Eigen::MatrixXd& x, int n, double delta_exponent, EntryKind kind);
void truncate_renormalize(Eigen::MatrixXcd& x, int n, double delta_exponent, EntryKind kind);

/// Ascending eigenvalues of B = (1/n) X X^*, n = X.cols(); tiny negative
/// roundoff is clamped to zero.
std::vector<double> eigenvalues(const Eigen::MatrixXd& x);
std::vector<double> eigenvalues(const Eigen::MatrixXcd& x);

/// Centered linear spectral statistic G_n(f) = sum f(lambda_i) - p Int f dF_{y_n}.
/// Throws DomainError naming the first eigenvalue outside f's domain.
double lss(const std::vector<double>& eigs, const TestFunction& f, double y_n,
           const QuadConfig& quad = {});
double lss_with_centering(const std::vector<double>& eigs, const TestFunction& f,
                          double centering);

/// Kolmogorov distance between the ESD of the eigenvalue list and F_{y_n},
/// evaluated over the eigenvalue jump points.
double esd_distance(const std::vector<double>& eigs, const MPModel& model);

ReplicateResult run_replicate(const SimConfig& cfg, int replicate_index,
                              const std::vector<TestFunction>& funcs,
                              const std::vector<double>& centerings, const MPModel& model);

/// Full Monte Carlo pass: OpenMP fan-out over replicates with a reduction in
/// replicate order, so the summary is bit-identical for any thread count.
SimSummary run(const SimConfig& cfg);
/// Serial reference implementation; must produce bit-identical summaries.
SimSummary run_serial(const SimConfig& cfg);

struct QuadformReport {
    double empirical_msd;  // E |x* C x - tr C|^2
    double trace_scale;    // E|x_1|^4 * tr(C C*)
    double ratio;
};

/// Concentration of quadratic forms: empirical E|x*Cx - tr C|^2 against the
/// moment-bound scale E|x_1|^4 tr(CC*).
QuadformReport quadform_concentration(EntryKind kind, const Eigen::MatrixXcd& c, int replicates,
                                      std::uint64_t seed);

/// Worker cap: min(OpenMP default, MPCLT_THREADS env, cfg override).
int thread_budget(int requested);

}  // namespace mpclt
