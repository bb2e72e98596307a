#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fedmf/datagen.hpp"
#include "fedmf/federation.hpp"
#include "fedmf/matrix.hpp"
#include "fedmf/resampler.hpp"

namespace fedmf {

enum class Momentum { none, nesterov };
enum class SolveMethod { gradient, exact };

std::string to_string(Momentum m);
Momentum parse_momentum(const std::string& text);
std::string to_string(SolveMethod m);
SolveMethod parse_solve_method(const std::string& text);

struct SolverConfig {
    SolveMethod method = SolveMethod::gradient;
    std::size_t iterations = 1000;
    /// Explicit step size; nullopt means 1 / (L + ridge).
    std::optional<double> step_size;
    Momentum momentum = Momentum::none;
    double ridge = 0.0;
    bool record_trajectory = true;

    void validate() const;
};

/// Smoothness and strong-convexity constants of U -> F(U, V):
/// L = sigma_max(V)^2, mu = sigma_min(V)^2 (mu may be 0).
struct CurvatureBounds {
    double lipschitz = 0.0;
    double strong_convexity = 0.0;
};

CurvatureBounds curvature(const Matrix& v);

/// F(U, V) = 1/2 ||S - U V^T||_F^2 + ridge/2 ||U||_F^2.
double local_loss(const Matrix& u, const Matrix& v, const Matrix& s, double ridge = 0.0);

/// (U V^T - S) V + ridge * U.
Matrix grad_u(const Matrix& u, const Matrix& v, const Matrix& s, double ridge = 0.0);

/// argmin_U F(U, V): S V (V^T V)^+ for ridge = 0, S V (V^T V + ridge I)^-1
/// otherwise.
Matrix exact_solution(const Matrix& s, const Matrix& v, double ridge = 0.0);

struct DescentResult {
    Matrix u;
    /// F(U_t, V) for t = 0..T when recording, empty otherwise.
    std::vector<double> losses;
};

/// Called with (t, U_t) for t = 0..T.
using IterateObserver = std::function<void(std::size_t, const Matrix&)>;

/// T steps of gradient descent on F(., V) from U_0 = gaussian(n_i, r, seed).
///
/// With Nesterov momentum the gradient is taken at the extrapolated point
/// Y_t = U_t + beta_t (U_t - U_{t-1}), beta_t = t / (t + 3), and
/// U_{t+1} = Y_t - gamma grad(Y_t). The recorded losses and the observer do
/// not count towards the active flop scope.
DescentResult local_descent(const Matrix& s, const Matrix& v, const SolverConfig& config,
                            std::uint64_t init_seed, const IterateObserver& observer = {});

/// Same as local_descent, starting from an explicit U_0.
DescentResult local_descent_from(const Matrix& s, const Matrix& v, const SolverConfig& config,
                                 Matrix u0, const IterateObserver& observer = {});

struct RunOptions {
    /// Seeds every client's U_0 through make_clients.
    std::uint64_t seed = 0;
    PowerInitOptions power;
    bool parallel_clients = false;
};

/// Result of one end-to-end federated factorisation.
struct RunRecord {
    /// sum_i F^i(U_t^i, V) for t = 0..T (gradient), or a single entry (exact).
    std::vector<double> global_loss;
    /// ||S - U_t V^T||_F^2 for t = 0..T, aligned with global_loss.
    std::vector<double> error_trajectory;
    double kappa = 0.0;
    std::vector<Draw> draws;
    CostLedger ledger;
    double final_error = 0.0;  ///< ||S - U V^T||_F^2
    double exact_error = 0.0;  ///< same with each U^i replaced by its exact solution
    double data_norm_sq = 0.0;  ///< ||S||_F^2
    Matrix v;
    std::vector<Matrix> client_u;
};

/// Distributed power initialisation (with resampling) followed by purely
/// local solves on every client.
RunRecord federated_solve(const FederatedDataset& dataset, unsigned alpha, std::size_t r,
                          const SolverConfig& config, const ResamplePolicy& resample,
                          const RunOptions& options = {});

}  // namespace fedmf
