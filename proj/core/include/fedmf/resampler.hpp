#pragma once

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "fedmf/federation.hpp"
#include "fedmf/linalg.hpp"

namespace fedmf {

/// Which published form of a bound to evaluate. The two forms differ in
/// their constants; `appendix` is the default everywhere.
enum class BoundVariant { appendix, main_text };

/// Draw exactly m independent Phi and keep the best-conditioned V.
struct FixedDraws {
    std::size_t m = 1;
};
/// Draw m_for_probability(probability) Phi and keep the best.
struct TargetProbability {
    double probability = 0.999;
};
/// Draw until kappa(V) <= kappa_target, giving up after max_draws.
struct KappaThreshold {
    double kappa_target = 0.0;
    std::size_t max_draws = 100;
};

struct ResamplePolicy {
    std::variant<FixedDraws, TargetProbability, KappaThreshold> mode = FixedDraws{};
    std::uint64_t base_seed = 0;

    /// Throws InvalidArgument on m == 0, P outside (0,1), kappa_target <= 1
    /// or max_draws == 0.
    void validate() const;
};

/// Smallest m >= 1 with 1 - 2^-m >= P, i.e. ceil(-log2(1 - P)).
/// Throws InvalidArgument for P outside (0, 1).
std::size_t m_for_probability(double probability);

struct BoundInputs {
    Spectrum spectrum;
    std::size_t r = 1;
    unsigned alpha = 0;
    std::size_t d = 1;
    double p = 1.0 / 6.0;
};

/// High-probability bound kappa_p^2 on kappa(V)^2 for power-initialised V:
///
///   (1/p^2) [ 9 r^2 (s_max/s_r)^(2(2a+1)) + 4 r (d + ln(2/p)) (s_{r+1}/s_r)^e ]
///
/// with e = 2(2a+1) for BoundVariant::appendix and e = 2a for main_text.
/// Throws RankDeficient if s_r = 0, InvalidArgument if p is outside (0,1)
/// or r exceeds the spectrum length.
double kappa_p_bound(const BoundInputs& in, BoundVariant variant = BoundVariant::appendix);

/// The two summands of kappa_p_bound, each already divided by p^2.
struct KappaPTerms {
    double head = 0.0;  ///< signal-ratio term 9 r^2 (...)
    double tail = 0.0;  ///< tail-ratio term 4 r (d + ln(2/p)) (...)
    double total() const noexcept { return head + tail; }
};

KappaPTerms kappa_p_terms(const BoundInputs& in, BoundVariant variant = BoundVariant::appendix);

struct Draw {
    std::uint64_t seed = 0;
    double kappa = 0.0;  ///< +inf when V is numerically rank deficient
};

struct ResampleResult {
    Matrix v;
    CostLedger ledger;  ///< accumulated over every draw
    std::vector<Draw> draws;
    std::size_t best = 0;  ///< index into draws
};

/// kappa(V), or +inf when V is numerically rank deficient.
double kappa_or_inf(const Matrix& v);

/// Run power_init once per draw j with seed base_seed + j and keep the V of
/// smallest condition number (first one on ties). The server evaluates each
/// kappa; that work is charged to ledger.server_flops. Threshold mode throws
/// ThresholdUnmet (carrying the best kappa seen) when its budget runs out.
ResampleResult resample_phi(std::span<const ClientState> clients, unsigned alpha, std::size_t r,
                            const ResamplePolicy& policy,
                            const PowerInitOptions& options = {});

}  // namespace fedmf
