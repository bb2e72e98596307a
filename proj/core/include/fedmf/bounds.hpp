#pragma once

#include <cstdint>
#include <vector>

#include "fedmf/datagen.hpp"
#include "fedmf/linalg.hpp"
#include "fedmf/resampler.hpp"

namespace fedmf {

/// Rank-r Eckart–Young floor: sum_{i>r} sigma_i^2 (0 when r >= length).
double eps_min(const Spectrum& spectrum, std::size_t r);

/// Multiplier constant of the Frobenius bound:
///   appendix:  2 r p^-2 (ln(1/p) + r ln 2)
///   main_text: 2 r p^-1 (ln(1/p^2) + r ln 2)
double thm3_constant(std::size_t r, double p, BoundVariant variant = BoundVariant::appendix);

/// High-probability (>= 1 - 2p) upper bound on min_U ||S - U V^T||_F^2 for a
/// power-initialised V of width r:
///
///   sum_{i>r} s_i^2 (1 + C (s_max^2 - s_i^2)/s_r^2 (s_i/s_r)^(4 alpha))
///
/// with C = thm3_constant(r, p, variant). Throws RankDeficient if s_r = 0.
double thm3_bound(const Spectrum& spectrum, std::size_t r, unsigned alpha, double p,
                  BoundVariant variant = BoundVariant::appendix);

/// thm3_bound - eps_min, summed directly so it stays accurate when it is
/// many orders of magnitude below eps_min.
double thm3_excess(const Spectrum& spectrum, std::size_t r, unsigned alpha, double p,
                   BoundVariant variant = BoundVariant::appendix);

/// Gap epsilon above eps_min(r_*) achieved by the best of
/// m_for_probability(P) draws:
///   sum_{i>r*} s_i^2 32 ln(4) r*(r*+1) (s_max^2 - s_i^2)/s_{r*}^2 (s_i/s_{r*})^(4 alpha)
double cor1_eps(const Spectrum& spectrum, std::size_t r_star, unsigned alpha);

/// Summary of the two-level regime: r_* values near `lambda`, the rest near
/// `xi` << lambda. lambda = s_{r*}, xi = s_{r*+1}.
struct TwoLevelRegime {
    double lambda = 0.0;
    double xi = 0.0;
    double kappa_sq_order = 0.0;  ///< r_*^2 + r d xi / lambda
    double eps_order = 0.0;       ///< d r_*^2 xi^(4 alpha + 2) / lambda^(4 alpha)
};

TwoLevelRegime two_level_regime(const Spectrum& spectrum, std::size_t r_star, std::size_t d,
                                unsigned alpha);

/// Singular values of the stacked client data.
Spectrum dataset_spectrum(const FederatedDataset& dataset);

/// Absolute slack, relative to ||S||_F^2, used whenever a measured
/// reconstruction error is compared with a closed-form bound. Residuals are
/// accumulated from entries of size ~|S| and the spectrum comes from a Gram
/// matrix, so neither side is resolved better than this.
inline constexpr double kErrorResolution = 1e-12;

struct ErrorReport {
    double eps_min = 0.0;
    double measured_error = 0.0;
    double thm3_bound = 0.0;
    double cor1_eps = 0.0;
    bool above_floor = false;   ///< measured >= eps_min - resolution
    bool within_thm3 = false;   ///< measured < thm3_bound + resolution
    bool within_cor1 = false;   ///< measured < eps_min + cor1_eps + resolution
};

/// Compare a measured error against every bound at once. `r` is used both as
/// the approximation rank and as r_* in cor1_eps.
ErrorReport evaluate_error(const Spectrum& spectrum, double measured_error, double data_norm_sq,
                           std::size_t r, unsigned alpha, double p);

struct CoverageResult {
    double coverage = 0.0;       ///< fraction of trials with error < bound
    double bound = 0.0;          ///< thm3_bound used
    std::vector<double> errors;  ///< measured error per trial
};

/// Monte-Carlo check of the Frobenius bound: trial t draws Phi with seed
/// base_seed + t, runs power_init and the exact local solves, and records
/// ||S - U V^T||_F^2. Requires trials >= 50. Pass `spectrum` to skip
/// recomputing it.
CoverageResult verify_thm3_montecarlo(const FederatedDataset& dataset, std::size_t r,
                                      unsigned alpha, double p, std::size_t trials,
                                      std::uint64_t base_seed,
                                      const Spectrum* spectrum = nullptr);

/// ||S - U V^T||_F^2 with every U^i = exact_solution(S^i, V).
double exact_error(const FederatedDataset& dataset, const Matrix& v);

}  // namespace fedmf
