#include "fedmf/bounds.hpp"

#include <cmath>
#include <numbers>

#include "fedmf/error.hpp"
#include "fedmf/federation.hpp"
#include "fedmf/solver.hpp"

namespace fedmf {

namespace {

void require_probability(double p, const char* what) {
    if (!(p > 0.0 && p < 1.0)) {
        throw InvalidArgument(std::string(what) + ": p must lie in (0, 1)");
    }
}

double pivot_sigma(const Spectrum& spectrum, std::size_t r, const char* what) {
    if (r == 0 || r > spectrum.size()) {
        throw InvalidArgument(std::string(what) + ": rank must lie in [1, spectrum length]");
    }
    const double s_r = spectrum.sigma(r);
    if (s_r <= 0.0) throw RankDeficient(std::string(what) + ": sigma_r is zero", s_r);
    return s_r;
}

// sum_{i>r} s_i^2 (s_max^2 - s_i^2)/s_r^2 (s_i/s_r)^(4 alpha)
double weighted_tail(const Spectrum& spectrum, std::size_t r, double s_r, unsigned alpha) {
    const double s_max_sq = spectrum.max() * spectrum.max();
    double total = 0.0;
    for (std::size_t i = r + 1; i <= spectrum.size(); ++i) {
        const double s = spectrum.sigma(i);
        const double ratio = s / s_r;
        total += s * s * ((s_max_sq - s * s) / (s_r * s_r)) * std::pow(ratio, 4.0 * alpha);
    }
    return total;
}

}  // namespace

double eps_min(const Spectrum& spectrum, std::size_t r) {
    double total = 0.0;
    for (std::size_t i = r + 1; i <= spectrum.size(); ++i) {
        total += spectrum.sigma(i) * spectrum.sigma(i);
    }
    return total;
}

double thm3_constant(std::size_t r, double p, BoundVariant variant) {
    require_probability(p, "thm3_constant");
    if (r == 0) throw InvalidArgument("thm3_constant: r must be >= 1");
    const double rr = static_cast<double>(r);
    const double ln2r = std::numbers::ln2 * rr;
    if (variant == BoundVariant::appendix) {
        return 2.0 * rr / (p * p) * (std::log(1.0 / p) + ln2r);
    }
    return 2.0 * rr / p * (std::log(1.0 / (p * p)) + ln2r);
}

double thm3_excess(const Spectrum& spectrum, std::size_t r, unsigned alpha, double p,
                   BoundVariant variant) {
    const double c = thm3_constant(r, p, variant);
    const double s_r = pivot_sigma(spectrum, r, "thm3_bound");
    return c * weighted_tail(spectrum, r, s_r, alpha);
}

double thm3_bound(const Spectrum& spectrum, std::size_t r, unsigned alpha, double p,
                  BoundVariant variant) {
    return eps_min(spectrum, r) + thm3_excess(spectrum, r, alpha, p, variant);
}

double cor1_eps(const Spectrum& spectrum, std::size_t r_star, unsigned alpha) {
    const double s_r = pivot_sigma(spectrum, r_star, "cor1_eps");
    const double rs = static_cast<double>(r_star);
    const double c = 32.0 * std::log(4.0) * rs * (rs + 1.0);
    return c * weighted_tail(spectrum, r_star, s_r, alpha);
}

TwoLevelRegime two_level_regime(const Spectrum& spectrum, std::size_t r_star, std::size_t d,
                                unsigned alpha) {
    TwoLevelRegime out;
    out.lambda = pivot_sigma(spectrum, r_star, "two_level_regime");
    out.xi = spectrum.sigma(r_star + 1);
    const double rs = static_cast<double>(r_star);
    const double dd = static_cast<double>(d);
    out.kappa_sq_order = rs * rs + rs * dd * out.xi / out.lambda;
    out.eps_order = dd * rs * rs * std::pow(out.xi, 4.0 * alpha + 2.0) /
                    std::pow(out.lambda, 4.0 * alpha);
    return out;
}

Spectrum dataset_spectrum(const FederatedDataset& dataset) {
    return singular_values(dataset.stacked());
}

ErrorReport evaluate_error(const Spectrum& spectrum, double measured_error, double data_norm_sq,
                           std::size_t r, unsigned alpha, double p) {
    const double slack = kErrorResolution * data_norm_sq;
    ErrorReport report;
    report.eps_min = eps_min(spectrum, r);
    report.measured_error = measured_error;
    report.thm3_bound = thm3_bound(spectrum, r, alpha, p);
    report.cor1_eps = cor1_eps(spectrum, r, alpha);
    report.above_floor = measured_error >= report.eps_min - slack;
    report.within_thm3 = measured_error < report.thm3_bound + slack;
    report.within_cor1 = measured_error < report.eps_min + report.cor1_eps + slack;
    return report;
}

double exact_error(const FederatedDataset& dataset, const Matrix& v) {
    double total = 0.0;
    for (const auto& s : dataset.shards) {
        total += frobenius_diff_sq(s, matmul_nt(exact_solution(s, v), v));
    }
    return total;
}

CoverageResult verify_thm3_montecarlo(const FederatedDataset& dataset, std::size_t r,
                                      unsigned alpha, double p, std::size_t trials,
                                      std::uint64_t base_seed, const Spectrum* spectrum) {
    if (trials < 50) throw InvalidArgument("verify_thm3_montecarlo: needs at least 50 trials");
    const Spectrum own = spectrum ? Spectrum{} : dataset_spectrum(dataset);
    const Spectrum& spec = spectrum ? *spectrum : own;

    double norm_sq = 0.0;
    for (const auto& s : dataset.shards) norm_sq += frobenius_sq(s);

    CoverageResult result;
    result.bound = thm3_bound(spec, r, alpha, p);
    const double slack = kErrorResolution * norm_sq;
    const std::vector<ClientState> clients = make_clients(dataset, base_seed);
    std::size_t hits = 0;
    for (std::size_t t = 0; t < trials; ++t) {
        const PowerInitResult init = power_init(clients, alpha, r, base_seed + t);
        const double err = exact_error(dataset, init.v);
        result.errors.push_back(err);
        if (err < result.bound + slack) ++hits;
    }
    result.coverage = static_cast<double>(hits) / static_cast<double>(trials);
    return result;
}

}  // namespace fedmf
