#include "fedmf/resampler.hpp"

#include <cmath>
#include <limits>

#include "fedmf/error.hpp"
#include "fedmf/flops.hpp"

namespace fedmf {

namespace {

void require_probability(double p, const char* what) {
    if (!(p > 0.0 && p < 1.0)) {
        throw InvalidArgument(std::string(what) + ": probability must lie in (0, 1)");
    }
}

std::size_t draw_budget(const ResamplePolicy& policy) {
    struct Visitor {
        std::size_t operator()(const FixedDraws& f) const { return f.m; }
        std::size_t operator()(const TargetProbability& t) const {
            return m_for_probability(t.probability);
        }
        std::size_t operator()(const KappaThreshold& k) const { return k.max_draws; }
    };
    return std::visit(Visitor{}, policy.mode);
}

}  // namespace

void ResamplePolicy::validate() const {
    struct Visitor {
        void operator()(const FixedDraws& f) const {
            if (f.m == 0) throw InvalidArgument("ResamplePolicy: m must be >= 1");
        }
        void operator()(const TargetProbability& t) const {
            require_probability(t.probability, "ResamplePolicy");
        }
        void operator()(const KappaThreshold& k) const {
            if (!(k.kappa_target > 1.0)) {
                throw InvalidArgument("ResamplePolicy: kappa_target must exceed 1");
            }
            if (k.max_draws == 0) throw InvalidArgument("ResamplePolicy: max_draws must be >= 1");
        }
    };
    std::visit(Visitor{}, mode);
}

std::size_t m_for_probability(double probability) {
    require_probability(probability, "m_for_probability");
    // Start just below the analytic ceiling and step up on the exact
    // criterion, so rounding in log2 can never cost or add a draw.
    const double estimate = std::ceil(-std::log2(1.0 - probability));
    std::size_t m = estimate > 2.0 ? static_cast<std::size_t>(estimate) - 1 : 1;
    while (1.0 - std::ldexp(1.0, -static_cast<int>(m)) < probability) ++m;
    return m;
}

double kappa_p_bound(const BoundInputs& in, BoundVariant variant) {
    return kappa_p_terms(in, variant).total();
}

KappaPTerms kappa_p_terms(const BoundInputs& in, BoundVariant variant) {
    require_probability(in.p, "kappa_p_bound");
    if (in.r == 0 || in.r > in.spectrum.size()) {
        throw InvalidArgument("kappa_p_bound: r must lie in [1, spectrum length]");
    }
    const double s_max = in.spectrum.max();
    const double s_r = in.spectrum.sigma(in.r);
    const double s_next = in.spectrum.sigma(in.r + 1);
    if (s_r <= 0.0) throw RankDeficient("kappa_p_bound: sigma_r is zero", s_r);

    const double r = static_cast<double>(in.r);
    const double power = 2.0 * (2.0 * in.alpha + 1.0);
    const double tail_power = variant == BoundVariant::appendix ? power : 2.0 * in.alpha;
    const double head = 9.0 * r * r * std::pow(s_max / s_r, power);
    const double tail = 4.0 * r * (static_cast<double>(in.d) + std::log(2.0 / in.p)) *
                        std::pow(s_next / s_r, tail_power);
    const double p_sq = in.p * in.p;
    return {head / p_sq, tail / p_sq};
}

double kappa_or_inf(const Matrix& v) {
    try {
        return condition_number(v);
    } catch (const RankDeficient&) {
        return std::numeric_limits<double>::infinity();
    }
}

ResampleResult resample_phi(std::span<const ClientState> clients, unsigned alpha, std::size_t r,
                            const ResamplePolicy& policy, const PowerInitOptions& options) {
    policy.validate();
    const std::size_t budget = draw_budget(policy);
    const auto* threshold = std::get_if<KappaThreshold>(&policy.mode);

    ResampleResult result;
    result.ledger.client_flops.assign(clients.size(), 0);
    double best_kappa = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < budget; ++j) {
        const std::uint64_t seed = policy.base_seed + j;
        PowerInitResult init = power_init(clients, alpha, r, seed, options);
        FlopCounter server;
        double kappa;
        {
            FlopScope scope(&server);
            kappa = kappa_or_inf(init.v);
        }
        init.ledger.server_flops += server.value();
        result.ledger += init.ledger;
        result.draws.push_back(Draw{seed, kappa});
        if (result.draws.size() == 1 || kappa < best_kappa) {
            best_kappa = kappa;
            result.best = j;
            result.v = std::move(init.v);
        }
        if (threshold != nullptr && kappa <= threshold->kappa_target) return result;
    }
    if (threshold != nullptr) {
        throw ThresholdUnmet("resample_phi: no draw reached kappa <= " +
                                 std::to_string(threshold->kappa_target) + " in " +
                                 std::to_string(budget) + " draws",
                             best_kappa);
    }
    return result;
}

}  // namespace fedmf
