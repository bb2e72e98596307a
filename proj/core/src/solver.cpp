#include "fedmf/solver.hpp"

#include <cmath>

#include "fedmf/error.hpp"
#include "fedmf/flops.hpp"
#include "fedmf/linalg.hpp"
#include "parallel.hpp"

namespace fedmf {

namespace {

void require_compatible(const Matrix& u, const Matrix& v, const Matrix& s, const char* op) {
    if (u.rows() != s.rows() || u.cols() != v.cols() || v.rows() != s.cols()) {
        throw InvalidArgument(std::string(op) + ": incompatible shapes U " +
                              std::to_string(u.rows()) + "x" + std::to_string(u.cols()) + ", V " +
                              std::to_string(v.rows()) + "x" + std::to_string(v.cols()) + ", S " +
                              std::to_string(s.rows()) + "x" + std::to_string(s.cols()));
    }
}

// 1/2 ||residual||^2 + ridge/2 ||U||^2 given residual = U V^T - S.
double loss_from_residual(const Matrix& residual, const Matrix& u, double ridge) {
    double loss = 0.5 * frobenius_sq(residual);
    if (ridge != 0.0) loss += 0.5 * ridge * frobenius_sq(u);
    return loss;
}

}  // namespace

std::string to_string(Momentum m) { return m == Momentum::nesterov ? "nesterov" : "none"; }

Momentum parse_momentum(const std::string& text) {
    if (text == "none") return Momentum::none;
    if (text == "nesterov") return Momentum::nesterov;
    throw InvalidArgument("unknown momentum '" + text + "'");
}

std::string to_string(SolveMethod m) { return m == SolveMethod::exact ? "exact" : "gradient"; }

SolveMethod parse_solve_method(const std::string& text) {
    if (text == "gradient") return SolveMethod::gradient;
    if (text == "exact") return SolveMethod::exact;
    throw InvalidArgument("unknown solver method '" + text + "'");
}

void SolverConfig::validate() const {
    if (step_size && !(*step_size > 0.0)) {
        throw InvalidArgument("SolverConfig: step_size must be positive");
    }
    if (!(ridge >= 0.0)) throw InvalidArgument("SolverConfig: ridge must be >= 0");
}

CurvatureBounds curvature(const Matrix& v) {
    if (v.empty()) throw InvalidArgument("curvature: empty V");
    const Spectrum s = singular_values(v);
    return {s.max() * s.max(), s.values.back() * s.values.back()};
}

double local_loss(const Matrix& u, const Matrix& v, const Matrix& s, double ridge) {
    require_compatible(u, v, s, "local_loss");
    Matrix residual = matmul_nt(u, v);
    residual -= s;
    return loss_from_residual(residual, u, ridge);
}

Matrix grad_u(const Matrix& u, const Matrix& v, const Matrix& s, double ridge) {
    require_compatible(u, v, s, "grad_u");
    Matrix residual = matmul_nt(u, v);
    residual -= s;
    Matrix g = matmul(residual, v);
    if (ridge != 0.0) axpy(ridge, u, g);
    return g;
}

Matrix exact_solution(const Matrix& s, const Matrix& v, double ridge) {
    if (s.cols() != v.rows()) throw InvalidArgument("exact_solution: S and V disagree on d");
    Matrix g = gram(v);
    for (std::size_t k = 0; k < g.rows(); ++k) g(k, k) += ridge;
    return matmul(matmul(s, v), pinv_gram(g));
}

DescentResult local_descent(const Matrix& s, const Matrix& v, const SolverConfig& config,
                            std::uint64_t init_seed, const IterateObserver& observer) {
    return local_descent_from(s, v, config, gaussian(s.rows(), v.cols(), init_seed), observer);
}

DescentResult local_descent_from(const Matrix& s, const Matrix& v, const SolverConfig& config,
                                 Matrix u0, const IterateObserver& observer) {
    config.validate();
    require_compatible(u0, v, s, "local_descent");

    double step;
    if (config.step_size) {
        step = *config.step_size;
    } else {
        FlopScope uncounted(nullptr);
        const double lipschitz = curvature(v).lipschitz + config.ridge;
        if (!(lipschitz > 0.0)) {
            throw InvalidArgument("local_descent: automatic step needs L > 0 (V is zero)");
        }
        step = 1.0 / lipschitz;
    }
    const bool nesterov = config.momentum == Momentum::nesterov;
    const bool record = config.record_trajectory;

    DescentResult out;
    if (record) out.losses.reserve(config.iterations + 1);
    Matrix u = std::move(u0);
    Matrix u_prev = nesterov ? u : Matrix{};

    auto instrument = [&](std::size_t t, const Matrix& iterate) {
        if (observer) observer(t, iterate);
    };

    for (std::size_t t = 0; t < config.iterations; ++t) {
        instrument(t, u);
        if (!nesterov) {
            Matrix residual = matmul_nt(u, v);
            residual -= s;
            if (record) out.losses.push_back(loss_from_residual(residual, u, config.ridge));
            Matrix g = matmul(residual, v);
            if (config.ridge != 0.0) axpy(config.ridge, u, g);
            axpy(-step, g, u);
            continue;
        }
        if (record) {
            FlopScope uncounted(nullptr);
            out.losses.push_back(local_loss(u, v, s, config.ridge));
        }
        const double beta = static_cast<double>(t) / static_cast<double>(t + 3);
        Matrix y = u;
        if (beta != 0.0) {
            Matrix delta = u - u_prev;
            axpy(beta, delta, y);
        }
        Matrix g = grad_u(y, v, s, config.ridge);
        axpy(-step, g, y);
        u_prev = std::move(u);
        u = std::move(y);
    }
    instrument(config.iterations, u);
    if (record) {
        FlopScope uncounted(nullptr);
        out.losses.push_back(local_loss(u, v, s, config.ridge));
    }
    out.u = std::move(u);
    return out;
}

RunRecord federated_solve(const FederatedDataset& dataset, unsigned alpha, std::size_t r,
                          const SolverConfig& config, const ResamplePolicy& resample,
                          const RunOptions& options) {
    config.validate();
    if (dataset.num_clients() == 0) throw InvalidArgument("federated_solve: empty dataset");
    const std::vector<ClientState> clients = make_clients(dataset, options.seed);
    ResampleResult init = resample_phi(clients, alpha, r, resample, options.power);

    RunRecord record;
    record.v = std::move(init.v);
    record.draws = init.draws;
    record.kappa = init.draws[init.best].kappa;
    record.ledger = init.ledger;

    const std::size_t n = clients.size();
    std::vector<DescentResult> local(n);
    std::vector<FlopCounter> counters(n);
    // With ridge the loss no longer determines the residual, so track it.
    const bool track_errors = config.method == SolveMethod::gradient &&
                              config.record_trajectory && config.ridge != 0.0;
    std::vector<std::vector<double>> errors(n);
    detail::for_each_index(n, options.parallel_clients, [&](std::size_t i) {
        FlopScope scope(&counters[i]);
        const Matrix& s = clients[i].shard;
        if (config.method == SolveMethod::exact) {
            local[i].u = exact_solution(s, record.v, config.ridge);
            FlopScope uncounted(nullptr);
            local[i].losses.push_back(local_loss(local[i].u, record.v, s, config.ridge));
        } else {
            IterateObserver observer;
            if (track_errors) {
                observer = [&, i](std::size_t, const Matrix& u) {
                    FlopScope none(nullptr);
                    errors[i].push_back(frobenius_diff_sq(s, matmul_nt(u, record.v)));
                };
            }
            local[i] = local_descent(s, record.v, config, clients[i].rng_seed, observer);
        }
    });
    for (std::size_t i = 0; i < n; ++i) record.ledger.client_flops[i] += counters[i].value();

    // Everything below is reporting and stays out of the ledger.
    FlopScope uncounted(nullptr);
    const std::size_t steps = local.front().losses.size();
    record.global_loss.assign(steps, 0.0);
    for (const auto& l : local)
        for (std::size_t t = 0; t < steps && t < l.losses.size(); ++t) record.global_loss[t] += l.losses[t];
    if (track_errors) {
        record.error_trajectory.assign(steps, 0.0);
        for (const auto& e : errors)
            for (std::size_t t = 0; t < steps && t < e.size(); ++t) record.error_trajectory[t] += e[t];
    } else if (config.ridge == 0.0) {
        record.error_trajectory = record.global_loss;
        for (double& e : record.error_trajectory) e *= 2.0;
    }

    for (std::size_t i = 0; i < n; ++i) {
        const Matrix& s = clients[i].shard;
        record.data_norm_sq += frobenius_sq(s);
        record.final_error += frobenius_diff_sq(s, matmul_nt(local[i].u, record.v));
        const Matrix best = config.method == SolveMethod::exact && config.ridge == 0.0
                                ? local[i].u
                                : exact_solution(s, record.v);
        record.exact_error += frobenius_diff_sq(s, matmul_nt(best, record.v));
        record.client_u.push_back(std::move(local[i].u));
    }
    return record;
}

}  // namespace fedmf
