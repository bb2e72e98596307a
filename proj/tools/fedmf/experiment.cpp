#include "experiment.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "fedmf/bounds.hpp"
#include "fedmf/ingest.hpp"
#include "fedmf/random.hpp"

namespace fedmf::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr double kLog10Floor = -30.0;

// Stream ids for derive_seed(master, .); fixed so outputs stay reproducible.
constexpr std::uint64_t kSyntheticStream = 0;
constexpr std::uint64_t kPhiStream = 1;
constexpr std::uint64_t kInitStream = 2;
constexpr std::uint64_t kPartitionStream = 3;

[[noreturn]] void fail(const std::string& msg) { throw ConfigError(msg); }

void reject_unknown(const json& obj, const std::string& where,
                    std::initializer_list<const char*> allowed) {
    const std::set<std::string> keys(allowed.begin(), allowed.end());
    for (const auto& item : obj.items()) {
        if (!keys.contains(item.key())) fail(where + ": unknown key '" + item.key() + "'");
    }
}

const json& require_object(const json& j, const std::string& where) {
    if (!j.is_object()) fail(where + ": expected an object");
    return j;
}

template <typename T>
T get_as(const json& j, const std::string& where) {
    try {
        if constexpr (std::is_same_v<T, bool>) {
            if (!j.is_boolean()) fail(where + ": expected a boolean");
        } else if constexpr (std::is_integral_v<T>) {
            if (!j.is_number_integer()) fail(where + ": expected an integer");
            if (j.is_number_integer() && !j.is_number_unsigned() && j.get<long long>() < 0) {
                fail(where + ": expected a non-negative integer");
            }
        } else if constexpr (std::is_floating_point_v<T>) {
            if (!j.is_number()) fail(where + ": expected a number");
        } else {
            if (!j.is_string()) fail(where + ": expected a string");
        }
        return j.get<T>();
    } catch (const json::exception& e) {
        fail(where + ": " + e.what());
    }
}

template <typename T>
void read_if(const json& obj, const char* key, const std::string& where, T& out) {
    if (const auto it = obj.find(key); it != obj.end()) {
        out = get_as<T>(*it, where + "." + key);
    }
}

// Accepts a scalar or a non-empty list of scalars.
template <typename T>
std::vector<T> scalar_or_list(const json& j, const std::string& where) {
    std::vector<T> out;
    if (j.is_array()) {
        if (j.empty()) fail(where + ": list must be non-empty");
        for (std::size_t i = 0; i < j.size(); ++i) {
            out.push_back(get_as<T>(j[i], where + "[" + std::to_string(i) + "]"));
        }
    } else {
        out.push_back(get_as<T>(j, where));
    }
    return out;
}

fs::path resolve(const fs::path& p, const fs::path& base) {
    return p.is_absolute() || base.empty() ? p : base / p;
}

DatasetKind parse_kind(const std::string& text) {
    if (text == "synthetic") return DatasetKind::synthetic;
    if (text == "csv") return DatasetKind::csv;
    if (text == "libsvm") return DatasetKind::libsvm;
    if (text == "manifest") return DatasetKind::manifest;
    fail("dataset.kind: unknown kind '" + text + "'");
}

std::string to_string(DatasetKind kind) {
    switch (kind) {
        case DatasetKind::synthetic: return "synthetic";
        case DatasetKind::csv: return "csv";
        case DatasetKind::libsvm: return "libsvm";
        case DatasetKind::manifest: return "manifest";
    }
    return "?";
}

DatasetConfig parse_dataset(const json& j, const fs::path& base_dir) {
    require_object(j, "dataset");
    DatasetConfig d;
    if (!j.contains("kind")) fail("dataset: missing 'kind'");
    d.kind = parse_kind(get_as<std::string>(j.at("kind"), "dataset.kind"));

    switch (d.kind) {
        case DatasetKind::synthetic: {
            reject_unknown(j, "dataset", {"kind", "num_clients", "rows_per_client", "dim",
                                          "true_rank", "signal_values", "noise_std", "seed"});
            SyntheticSpec& s = d.synthetic;
            read_if(j, "num_clients", "dataset", s.num_clients);
            read_if(j, "rows_per_client", "dataset", s.rows_per_client);
            read_if(j, "dim", "dataset", s.dim);
            read_if(j, "true_rank", "dataset", s.true_rank);
            read_if(j, "noise_std", "dataset", s.noise_std);
            if (j.contains("seed")) {
                s.seed = get_as<std::uint64_t>(j.at("seed"), "dataset.seed");
                d.synthetic_seed_given = true;
            }
            if (j.contains("signal_values")) {
                s.signal_values = scalar_or_list<double>(j.at("signal_values"),
                                                         "dataset.signal_values");
            } else {
                s.signal_values.assign(s.true_rank, 1.0);
            }
            try {
                s.validate();
            } catch (const InvalidArgument& e) {
                fail(std::string("dataset: ") + e.what());
            }
            d.num_clients = s.num_clients;
            return d;
        }
        case DatasetKind::manifest:
            reject_unknown(j, "dataset", {"kind", "path", "center"});
            break;
        case DatasetKind::csv:
            reject_unknown(j, "dataset", {"kind", "path", "has_labels", "delimiter",
                                          "num_clients", "partition", "center"});
            break;
        case DatasetKind::libsvm:
            reject_unknown(j, "dataset",
                           {"kind", "path", "dim", "num_clients", "partition", "center"});
            break;
    }

    if (!j.contains("path")) fail("dataset: missing 'path'");
    d.path = resolve(get_as<std::string>(j.at("path"), "dataset.path"), base_dir);
    if (!fs::is_regular_file(d.path)) fail("dataset.path: no such file '" + d.path.string() + "'");
    read_if(j, "center", "dataset", d.center);
    if (d.kind == DatasetKind::manifest) return d;

    read_if(j, "num_clients", "dataset", d.num_clients);
    if (d.num_clients == 0) fail("dataset.num_clients: must be >= 1");
    if (j.contains("partition")) {
        try {
            d.partition = parse_partition_mode(get_as<std::string>(j.at("partition"),
                                                                   "dataset.partition"));
        } catch (const InvalidArgument& e) {
            fail(std::string("dataset.partition: ") + e.what());
        }
    }
    if (d.kind == DatasetKind::csv) {
        read_if(j, "has_labels", "dataset", d.has_labels);
        if (j.contains("delimiter")) {
            const auto text = get_as<std::string>(j.at("delimiter"), "dataset.delimiter");
            if (text.size() != 1) fail("dataset.delimiter: must be a single character");
            d.delimiter = text.front();
        }
    } else {
        if (!j.contains("dim")) fail("dataset: libsvm needs 'dim'");
        d.dim = get_as<std::size_t>(j.at("dim"), "dataset.dim");
        if (d.dim == 0) fail("dataset.dim: must be >= 1");
        d.has_labels = true;
    }
    if (d.partition == PartitionMode::by_label && !d.has_labels) {
        fail("dataset.partition: by-label needs a label column");
    }
    return d;
}

SolverConfig parse_solver(const json& j) {
    require_object(j, "solver");
    reject_unknown(j, "solver", {"method", "iterations", "step_size", "ridge", "record_trajectory"});
    SolverConfig s;
    try {
        if (j.contains("method")) {
            s.method = parse_solve_method(get_as<std::string>(j.at("method"), "solver.method"));
        }
    } catch (const InvalidArgument& e) {
        fail(std::string("solver.method: ") + e.what());
    }
    read_if(j, "iterations", "solver", s.iterations);
    read_if(j, "ridge", "solver", s.ridge);
    read_if(j, "record_trajectory", "solver", s.record_trajectory);
    if (const auto it = j.find("step_size"); it != j.end()) {
        if (it->is_string()) {
            if (it->get<std::string>() != "auto") fail("solver.step_size: expected a number or \"auto\"");
        } else {
            s.step_size = get_as<double>(*it, "solver.step_size");
        }
    }
    return s;
}

ResamplePolicy parse_resample(const json& j) {
    require_object(j, "resample");
    ResamplePolicy policy;
    const std::string mode =
        j.contains("mode") ? get_as<std::string>(j.at("mode"), "resample.mode") : "fixed";
    if (mode == "fixed") {
        reject_unknown(j, "resample", {"mode", "m"});
        FixedDraws f;
        read_if(j, "m", "resample", f.m);
        policy.mode = f;
    } else if (mode == "probability") {
        reject_unknown(j, "resample", {"mode", "probability"});
        TargetProbability t;
        read_if(j, "probability", "resample", t.probability);
        policy.mode = t;
    } else if (mode == "threshold") {
        reject_unknown(j, "resample", {"mode", "kappa_target", "max_draws"});
        KappaThreshold k;
        if (!j.contains("kappa_target")) fail("resample: threshold mode needs 'kappa_target'");
        read_if(j, "kappa_target", "resample", k.kappa_target);
        read_if(j, "max_draws", "resample", k.max_draws);
        policy.mode = k;
    } else {
        fail("resample.mode: expected fixed, probability or threshold");
    }
    return policy;
}

BoundsConfig parse_bounds(const json& j) {
    require_object(j, "bounds");
    reject_unknown(j, "bounds", {"p_kappa", "p_frobenius", "probability"});
    BoundsConfig b;
    read_if(j, "p_kappa", "bounds", b.p_kappa);
    read_if(j, "p_frobenius", "bounds", b.p_frobenius);
    read_if(j, "probability", "bounds", b.probability);
    for (const double p : {b.p_kappa, b.p_frobenius, b.probability}) {
        if (!(p > 0.0 && p < 1.0)) fail("bounds: probabilities must lie in (0, 1)");
    }
    if (!(b.p_frobenius < 0.5)) fail("bounds.p_frobenius: must be below 1/2");
    return b;
}

void validate(const ExperimentConfig& c) {
    if (c.ranks.empty() || c.alphas.empty() || c.momenta.empty()) {
        fail("rank, alpha and momentum lists must be non-empty");
    }
    for (const std::size_t r : c.ranks) {
        if (r == 0) fail("rank: must be >= 1");
    }
    if (c.dataset.kind == DatasetKind::synthetic) {
        for (const std::size_t r : c.ranks) {
            if (r > c.dataset.synthetic.dim) fail("rank: exceeds dataset dim");
        }
    }
    if (c.trials == 0) fail("trials: must be >= 1");
    if (!(c.mask_scale >= 0.0) || !std::isfinite(c.mask_scale)) fail("mask_scale: must be >= 0");
    try {
        c.solver.validate();
        c.resample.validate();
    } catch (const InvalidArgument& e) {
        fail(e.what());
    }
}

std::ofstream open_for_write(const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open '" + path.string() + "' for writing");
    return out;
}

void write_json(const fs::path& path, const json& j) {
    std::ofstream out = open_for_write(path);
    out << j.dump(2) << '\n';
    if (!out) throw Error("write failed for '" + path.string() + "'");
}

void ensure_directory(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) {
        throw Error("cannot create output directory '" + dir.string() + "'");
    }
}

// JSON has no infinity; rank-deficient V reports kappa as null.
json finite_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json ledger_json(const CostLedger& ledger) {
    return {{"floats_communicated", ledger.floats_communicated},
            {"aggregation_rounds", ledger.aggregation_rounds},
            {"server_flops", ledger.server_flops},
            {"client_flops_total", ledger.total_client_flops()},
            {"client_flops", ledger.client_flops}};
}

json dataset_json(const FederatedDataset& ds) {
    std::vector<std::size_t> rows;
    for (const auto& s : ds.shards) rows.push_back(s.rows());
    return {{"name", ds.name},
            {"partition", to_string(ds.partition)},
            {"num_clients", ds.num_clients()},
            {"rows_per_client", rows},
            {"total_rows", ds.total_rows()},
            {"dim", ds.dim()}};
}

json solver_json(const SolverConfig& s, Momentum momentum) {
    return {{"method", to_string(s.method)},
            {"iterations", s.iterations},
            {"step_size", s.step_size ? json(*s.step_size) : json("auto")},
            {"momentum", to_string(momentum)},
            {"ridge", s.ridge}};
}

json policy_json(const ResamplePolicy& policy) {
    struct Visitor {
        json operator()(const FixedDraws& f) const { return {{"mode", "fixed"}, {"m", f.m}}; }
        json operator()(const TargetProbability& t) const {
            return {{"mode", "probability"}, {"probability", t.probability}};
        }
        json operator()(const KappaThreshold& k) const {
            return {{"mode", "threshold"},
                    {"kappa_target", k.kappa_target},
                    {"max_draws", k.max_draws}};
        }
    };
    return std::visit(Visitor{}, policy.mode);
}

std::string cell_name(unsigned alpha, std::size_t r, Momentum m, std::size_t trial) {
    std::ostringstream os;
    os << "a" << alpha << "_r" << r << "_" << to_string(m) << "_t";
    os.width(3);
    os.fill('0');
    os << trial;
    return os.str();
}

FederatedDataset load_manifest(const fs::path& path) {
    json m;
    {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open manifest '" + path.string() + "'");
        try {
            in >> m;
        } catch (const json::exception& e) {
            throw ConfigError("manifest '" + path.string() + "': " + e.what());
        }
    }
    if (!m.is_object() || !m.contains("shards") || !m.at("shards").is_array() ||
        m.at("shards").empty()) {
        throw ConfigError("manifest '" + path.string() + "': missing 'shards' list");
    }
    FederatedDataset ds;
    ds.name = m.value("name", path.stem().string());
    if (m.contains("partition")) {
        ds.partition = parse_partition_mode(m.at("partition").get<std::string>());
    }
    const fs::path dir = path.parent_path();
    for (const auto& shard : m.at("shards")) {
        const fs::path file = resolve(shard.get<std::string>(), dir);
        if (!fs::is_regular_file(file)) {
            throw ConfigError("manifest shard missing: '" + file.string() + "'");
        }
        ds.shards.push_back(load_csv(file, false).features);
    }
    const std::size_t d = ds.shards.front().cols();
    for (const auto& s : ds.shards) {
        if (s.cols() != d) throw ConfigError("manifest shards disagree on the column count");
    }
    if (m.contains("dim") && m.at("dim").get<std::size_t>() != d) {
        throw ConfigError("manifest 'dim' does not match its shards");
    }
    return ds;
}

FederatedDataset center_dataset(const FederatedDataset& ds) {
    const Matrix centered = center_columns(ds.stacked());
    FederatedDataset out = ds;
    std::size_t offset = 0;
    for (auto& shard : out.shards) {
        shard = row_block(centered, offset, shard.rows());
        offset += shard.rows();
    }
    return out;
}

void write_trajectory(const fs::path& path, const RunRecord& rec) {
    std::ofstream out = open_for_write(path);
    out << "# iteration,global_loss,log10_error\n";
    const std::size_t steps = rec.global_loss.size();
    for (std::size_t t = 0; t < steps; ++t) {
        const double error =
            t < rec.error_trajectory.size() ? rec.error_trajectory[t] : rec.final_error;
        out << t << ',' << format_double(rec.global_loss[t]) << ','
            << format_double(clamped_log10(error)) << '\n';
    }
    if (!out) throw Error("write failed for '" + path.string() + "'");
}

}  // namespace

double clamped_log10(double error) {
    if (!(error > 0.0)) return kLog10Floor;
    return std::max(kLog10Floor, std::log10(error));
}

CellSeeds cell_seeds(std::uint64_t master_seed, std::size_t trial) {
    return {derive_seed(derive_seed(master_seed, kPhiStream), trial),
            derive_seed(derive_seed(master_seed, kInitStream), trial)};
}

ExperimentConfig parse_config(const json& j, const fs::path& base_dir) {
    require_object(j, "config");
    reject_unknown(j, "config",
                   {"dataset", "rank", "alpha", "momentum", "solver", "resample", "trials", "seed",
                    "output_dir", "bounds", "secure_aggregation", "mask_scale",
                    "parallel_clients"});
    ExperimentConfig c;
    if (j.contains("dataset")) c.dataset = parse_dataset(j.at("dataset"), base_dir);
    if (j.contains("rank")) c.ranks = scalar_or_list<std::size_t>(j.at("rank"), "rank");
    if (j.contains("alpha")) c.alphas = scalar_or_list<unsigned>(j.at("alpha"), "alpha");
    if (j.contains("momentum")) {
        c.momenta.clear();
        for (const auto& m : scalar_or_list<std::string>(j.at("momentum"), "momentum")) {
            try {
                c.momenta.push_back(parse_momentum(m));
            } catch (const InvalidArgument& e) {
                fail(std::string("momentum: ") + e.what());
            }
        }
    }
    if (j.contains("solver")) c.solver = parse_solver(j.at("solver"));
    if (j.contains("resample")) c.resample = parse_resample(j.at("resample"));
    if (j.contains("bounds")) c.bounds = parse_bounds(j.at("bounds"));
    read_if(j, "trials", "config", c.trials);
    read_if(j, "seed", "config", c.seed);
    read_if(j, "secure_aggregation", "config", c.secure_aggregation);
    read_if(j, "mask_scale", "config", c.mask_scale);
    read_if(j, "parallel_clients", "config", c.parallel_clients);
    if (j.contains("output_dir")) {
        c.output_dir = resolve(get_as<std::string>(j.at("output_dir"), "output_dir"), base_dir);
    }
    validate(c);
    return c;
}

ExperimentConfig load_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("config '" + path.string() + "': " + e.what());
    }
    return parse_config(j, path.parent_path());
}

void apply_overrides(ExperimentConfig& config, const Overrides& o) {
    if (!o.alphas.empty()) config.alphas = o.alphas;
    if (!o.ranks.empty()) config.ranks = o.ranks;
    if (!o.momenta.empty()) {
        config.momenta.clear();
        for (const auto& m : o.momenta) {
            if (m == "both") {
                config.momenta.push_back(Momentum::none);
                config.momenta.push_back(Momentum::nesterov);
                continue;
            }
            try {
                config.momenta.push_back(parse_momentum(m));
            } catch (const InvalidArgument& e) {
                fail(std::string("--momentum: ") + e.what());
            }
        }
    }
    if (o.trials) config.trials = *o.trials;
    if (o.seed) config.seed = *o.seed;
    if (o.output_dir) config.output_dir = *o.output_dir;
    validate(config);
}

FederatedDataset load_dataset(const DatasetConfig& c, std::uint64_t master_seed) {
    FederatedDataset ds;
    switch (c.kind) {
        case DatasetKind::synthetic: {
            SyntheticSpec spec = c.synthetic;
            if (!c.synthetic_seed_given) spec.seed = derive_seed(master_seed, kSyntheticStream);
            ds = generate_synthetic(spec);
            break;
        }
        case DatasetKind::manifest:
            ds = load_manifest(c.path);
            break;
        case DatasetKind::csv:
        case DatasetKind::libsvm: {
            if (!fs::is_regular_file(c.path)) {
                throw ConfigError("dataset file missing: '" + c.path.string() + "'");
            }
            const LabeledTable table = c.kind == DatasetKind::csv
                                           ? load_csv(c.path, c.has_labels, c.delimiter)
                                           : load_libsvm(c.path, c.dim);
            std::optional<std::span<const int>> labels;
            if (table.labels) labels = std::span<const int>(*table.labels);
            try {
                ds = partition(table.features, labels, c.num_clients, c.partition,
                               derive_seed(master_seed, kPartitionStream));
            } catch (const InvalidArgument& e) {
                throw ConfigError(std::string("dataset: ") + e.what());
            }
            ds.name = c.path.stem().string();
            break;
        }
    }
    if (c.center) ds = center_dataset(ds);
    return ds;
}

fs::path cmd_generate(const ExperimentConfig& config) {
    const FederatedDataset ds = load_dataset(config.dataset, config.seed);
    ensure_directory(config.output_dir);

    json shards = json::array();
    for (std::size_t i = 0; i < ds.num_clients(); ++i) {
        char name[32];
        std::snprintf(name, sizeof name, "client_%03zu.csv", i);
        write_csv(config.output_dir / name, ds.shards[i]);
        shards.push_back(name);
    }

    json spec = {{"kind", to_string(config.dataset.kind)}, {"center", config.dataset.center}};
    if (config.dataset.kind == DatasetKind::synthetic) {
        const SyntheticSpec& s = config.dataset.synthetic;
        spec["true_rank"] = s.true_rank;
        spec["signal_values"] = s.signal_values;
        spec["noise_std"] = s.noise_std;
        spec["seed"] = config.dataset.synthetic_seed_given
                           ? s.seed
                           : derive_seed(config.seed, kSyntheticStream);
    } else {
        spec["source"] = config.dataset.path.filename().string();
    }

    json manifest = dataset_json(ds);
    manifest["schema"] = "fedmf-manifest/1";
    manifest["seed"] = config.seed;
    manifest["spec"] = std::move(spec);
    manifest["shards"] = std::move(shards);
    const fs::path path = config.output_dir / "manifest.json";
    write_json(path, manifest);
    return path;
}

std::vector<fs::path> cmd_run(const ExperimentConfig& config) {
    const FederatedDataset ds = load_dataset(config.dataset, config.seed);
    for (const std::size_t r : config.ranks) {
        if (r > ds.dim()) throw ConfigError("rank " + std::to_string(r) + " exceeds dim");
    }
    ensure_directory(config.output_dir);
    const Spectrum spectrum = dataset_spectrum(ds);

    RunOptions options;
    options.power.secure_aggregation = config.secure_aggregation;
    options.power.mask_scale = config.mask_scale;
    options.parallel_clients = config.parallel_clients;

    std::vector<fs::path> summaries;
    for (const unsigned alpha : config.alphas) {
        for (const std::size_t r : config.ranks) {
            for (const Momentum momentum : config.momenta) {
                for (std::size_t trial = 0; trial < config.trials; ++trial) {
                    const CellSeeds seeds = cell_seeds(config.seed, trial);
                    SolverConfig solver = config.solver;
                    solver.momentum = momentum;
                    ResamplePolicy policy = config.resample;
                    policy.base_seed = seeds.phi_base;
                    options.seed = seeds.init;

                    const auto start = std::chrono::steady_clock::now();
                    const RunRecord rec = federated_solve(ds, alpha, r, solver, policy, options);
                    const double wall = std::chrono::duration<double>(
                                            std::chrono::steady_clock::now() - start)
                                            .count();

                    const std::string name = cell_name(alpha, r, momentum, trial);
                    const fs::path csv = config.output_dir / (name + ".csv");
                    write_trajectory(csv, rec);

                    json draws = json::array();
                    for (const Draw& d : rec.draws) {
                        draws.push_back({{"seed", d.seed}, {"kappa", finite_or_null(d.kappa)}});
                    }
                    const double floor = eps_min(spectrum, r);
                    json summary = {
                        {"schema", "fedmf-summary/1"},
                        {"cell",
                         {{"alpha", alpha},
                          {"rank", r},
                          {"momentum", to_string(momentum)},
                          {"trial", trial}}},
                        {"seeds",
                         {{"master", config.seed},
                          {"phi_base", seeds.phi_base},
                          {"init", seeds.init}}},
                        {"dataset", dataset_json(ds)},
                        {"solver", solver_json(solver, momentum)},
                        {"resample", policy_json(policy)},
                        {"kappa", finite_or_null(rec.kappa)},
                        {"inverse_kappa_sq",
                         std::isfinite(rec.kappa) ? 1.0 / (rec.kappa * rec.kappa) : 0.0},
                        {"draws", std::move(draws)},
                        {"eps_min", floor},
                        {"final_error", rec.final_error},
                        {"exact_error", rec.exact_error},
                        {"data_norm_sq", rec.data_norm_sq},
                        {"relative_error",
                         rec.data_norm_sq > 0.0 ? rec.final_error / rec.data_norm_sq : 0.0},
                        {"final_global_loss", rec.global_loss.back()},
                        {"ledger", ledger_json(rec.ledger)},
                        {"trajectory", csv.filename().string()},
                        {"timing", name + ".timing.json"}};
                    const fs::path path = config.output_dir / (name + ".json");
                    write_json(path, summary);
                    write_json(config.output_dir / (name + ".timing.json"),
                               {{"wall_time_seconds", wall}});
                    summaries.push_back(path);
                }
            }
        }
    }
    return summaries;
}

json cmd_bounds(const ExperimentConfig& config) {
    const FederatedDataset ds = load_dataset(config.dataset, config.seed);
    const Spectrum spectrum = dataset_spectrum(ds);
    const BoundsConfig& b = config.bounds;

    auto guarded = [](auto&& fn) -> json {
        try {
            return fn();
        } catch (const Error&) {
            return nullptr;
        }
    };

    json entries = json::array();
    for (const unsigned alpha : config.alphas) {
        for (const std::size_t r : config.ranks) {
            json variants = json::object();
            for (const BoundVariant v : {BoundVariant::appendix, BoundVariant::main_text}) {
                const BoundInputs in{spectrum, r, alpha, ds.dim(), b.p_kappa};
                json entry = json::object();
                entry["kappa_p_sq"] = guarded([&] { return json(kappa_p_bound(in, v)); });
                entry["kappa_p_terms"] = guarded([&] {
                    const KappaPTerms t = kappa_p_terms(in, v);
                    return json{{"head", t.head},
                                {"tail", t.tail},
                                {"first_term_dominates", t.head >= t.tail}};
                });
                entry["thm3_constant"] = thm3_constant(r, b.p_frobenius, v);
                entry["thm3_bound"] =
                    guarded([&] { return json(thm3_bound(spectrum, r, alpha, b.p_frobenius, v)); });
                entry["thm3_excess"] = guarded(
                    [&] { return json(thm3_excess(spectrum, r, alpha, b.p_frobenius, v)); });
                variants[v == BoundVariant::appendix ? "appendix" : "main_text"] = std::move(entry);
            }
            json regime = guarded([&] {
                const TwoLevelRegime t = two_level_regime(spectrum, r, ds.dim(), alpha);
                return json{{"lambda", t.lambda},
                            {"xi", t.xi},
                            {"kappa_sq_order", t.kappa_sq_order},
                            {"eps_order", t.eps_order}};
            });
            entries.push_back({{"alpha", alpha},
                               {"rank", r},
                               {"eps_min", eps_min(spectrum, r)},
                               {"sigma_r", spectrum.sigma(r)},
                               {"sigma_r_plus_1", spectrum.sigma(r + 1)},
                               {"cor1_eps", guarded([&] { return json(cor1_eps(spectrum, r, alpha)); })},
                               {"variants", std::move(variants)},
                               {"two_level", std::move(regime)}});
        }
    }

    json report = {{"schema", "fedmf-bounds/1"},
                   {"dataset", dataset_json(ds)},
                   {"seed", config.seed},
                   {"p_kappa", b.p_kappa},
                   {"p_frobenius", b.p_frobenius},
                   {"probability", b.probability},
                   {"m_for_probability", m_for_probability(b.probability)},
                   {"singular_values", spectrum.values},
                   {"entries", std::move(entries)}};
    ensure_directory(config.output_dir);
    write_json(config.output_dir / "bounds.json", report);
    return report;
}

}  // namespace fedmf::cli
