// Command-line front end: training runs, one-shot adaptation, sweeps over the
// perturbation order and epsilon, timing comparison, and plain reference
// solves. Exit codes: 0 success, 1 numerical failure, 2 usage/config error.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "percas/percas.hpp"

using namespace percas;
namespace fs = std::filesystem;

namespace {

struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

double now_seconds() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

std::uint64_t fnv_hash(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

nlohmann::json load_config(const std::string& path) {
    if (path.empty()) return nlohmann::json::object();
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open config file '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw UsageError("config file '" + path + "' is not valid JSON: " + e.what());
    }
    return j;
}

// Flag wins over config value wins over the built-in default.
template <class T>
void cfg_override(const nlohmann::json& cfg, const std::string& key, const CLI::Option* opt,
                  T& value) {
    if (opt->count() == 0 && cfg.contains(key)) value = cfg[key].get<T>();
}

struct ProblemArgs {
    std::string preset;
    std::string problem_path;
    double diffusion = 0.0;
    double t_max = 1.0;
    double epsilon = -1.0;  // <0 means keep the preset/problem value
    CLI::Option* diffusion_opt = nullptr;
    CLI::Option* epsilon_opt = nullptr;
    CLI::Option* t_max_opt = nullptr;

    void attach(CLI::App* cmd) {
        cmd->add_option("--preset", preset, "built-in problem preset (kpp-1..kpp-4, wave-1, eps-f0, eps-f1)");
        cmd->add_option("--problem", problem_path, "problem description JSON file");
        diffusion_opt = cmd->add_option("--diffusion", diffusion, "diffusion coefficient for heat-operator presets (required, no canonical value)");
        epsilon_opt = cmd->add_option("--epsilon", epsilon, "override the problem's epsilon");
        t_max_opt = cmd->add_option("--t-max", t_max, "time horizon for presets");
    }

    PdeProblem resolve(const nlohmann::json& cfg) const {
        std::string pre = preset, path = problem_path;
        if (pre.empty() && cfg.contains("preset")) pre = cfg["preset"].get<std::string>();
        if (path.empty() && cfg.contains("problem")) path = cfg["problem"].get<std::string>();

        PdeProblem p;
        if (!path.empty()) {
            if (!fs::exists(path)) throw UsageError("problem file '" + path + "' does not exist");
            p = load_problem(path);
        } else if (!pre.empty()) {
            double d = diffusion;
            if (diffusion_opt->count() == 0 && cfg.contains("diffusion"))
                d = cfg["diffusion"].get<double>();
            const bool needs_d = pre.rfind("kpp", 0) == 0 || pre.rfind("eps", 0) == 0;
            if (needs_d && diffusion_opt->count() == 0 && !cfg.contains("diffusion"))
                throw UsageError("preset '" + pre + "' needs --diffusion (no canonical value)");
            double tm = t_max;
            if (t_max_opt->count() == 0 && cfg.contains("t_max")) tm = cfg["t_max"].get<double>();
            p = make_preset(pre, d, tm);
        } else {
            throw UsageError("need --preset or --problem");
        }
        if (epsilon_opt->count() > 0)
            p.epsilon = epsilon;
        else if (cfg.contains("epsilon"))
            p.epsilon = cfg["epsilon"].get<double>();

        auto violations = validate_problem(p);
        if (!violations.empty()) {
            std::string msg = "invalid problem:";
            for (const auto& v : violations) msg += "\n  - " + v;
            throw UsageError(msg);
        }
        return p;
    }
};

MultiHeadCheckpoint load_checkpoint_checked(const std::string& path, const PdeProblem& problem) {
    if (path.empty()) throw UsageError("need --checkpoint");
    if (!fs::exists(path)) throw UsageError("checkpoint '" + path + "' does not exist");
    MultiHeadCheckpoint c = load_checkpoint(path);
    if (c.op.terms.size() != problem.op.terms.size())
        throw UsageError("checkpoint operator does not match the problem operator");
    for (std::size_t i = 0; i < c.op.terms.size(); ++i) {
        const auto& a = c.op.terms[i];
        const auto& b = problem.op.terms[i];
        if (a.dx_order != b.dx_order || a.dt_order != b.dt_order ||
            a.coefficient != b.coefficient)
            throw UsageError("checkpoint operator does not match the problem operator");
    }
    return c;
}

LatentSystem build_system(const MultiHeadCheckpoint& ckpt, const PdeProblem& problem,
                          double* assembly_seconds = nullptr, bool* cache_hit = nullptr) {
    TransferPoints pts = TransferPoints::regular(problem.domain);
    LossWeights w = transfer_weights();
    const char* env = std::getenv("PERCAS_CACHE_DIR");
    const double start = now_seconds();
    LatentSystem sys =
        (env && *env) ? assemble_or_load(ckpt, problem.op, pts, w, -1.0, env, cache_hit)
                      : assemble_latent_system(ckpt, problem.op, pts, w);
    if (assembly_seconds) *assembly_seconds = now_seconds() - start;
    if (cache_hit && !(env && *env)) *cache_hit = false;
    return sys;
}

GridField reference_solution(const PdeProblem& problem, const GridSpec& grid, int n_x,
                             double* seconds = nullptr) {
    MolConfig cfg;
    cfg.n_x = n_x;
    cfg.output = grid;
    std::vector<std::string> warnings;
    const double start = now_seconds();
    GridField ref = solve_reference(problem, cfg, &warnings);
    if (seconds) *seconds = now_seconds() - start;
    for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
    return ref;
}

void write_json(const std::string& path, const nlohmann::json& j) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << j.dump(2) << "\n";
}

// Deterministic parallel map: results land at their input index.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn) {
    const std::size_t workers =
        std::min<std::size_t>(n, std::max(1u, std::thread::hardware_concurrency()));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) fn(i);
        });
    for (auto& t : pool) t.join();
}

// ---------------------------------------------------------------- commands

int cmd_train(const nlohmann::json& cfg_json, const TrainConfig& cfg_flags,
              const std::vector<CLI::Option*>& opts, const ProblemArgs& pargs,
              const std::string& out_dir) {
    TrainConfig cfg = train_config_from_json(cfg_json);
    // flags beat config
    if (opts[0]->count()) cfg.iterations = cfg_flags.iterations;
    if (opts[1]->count()) cfg.seed = cfg_flags.seed;
    if (opts[2]->count()) cfg.heads = cfg_flags.heads;
    if (opts[3]->count()) cfg.width = cfg_flags.width;
    if (opts[4]->count()) cfg.hidden_layers = cfg_flags.hidden_layers;
    if (opts[5]->count()) cfg.learning_rate = cfg_flags.learning_rate;

    PdeProblem problem = pargs.resolve(cfg_json);
    fs::create_directories(out_dir);

    std::vector<LinearTask> tasks =
        make_task_family(problem.op, cfg.heads, problem.domain, cfg.seed);

    nlohmann::json meta;
    meta["schema_version"] = 1;
    meta["seed"] = cfg.seed;
    meta["iterations"] = cfg.iterations;
    meta["heads"] = cfg.heads;
    meta["config_hash"] = fnv_hash(cfg_json.dump());

    std::vector<LossRecord> partial;
    try {
        TrainResult result = train(problem.op, problem.domain, tasks, cfg, &std::cerr, &partial);
        save_checkpoint(result.checkpoint, out_dir + "/checkpoint.json");
        write_loss_history_csv(result.history, out_dir + "/loss.csv");
        meta["final_loss"] = result.checkpoint.final_loss;
        meta["status"] = "ok";
        write_json(out_dir + "/train_meta.json", meta);
    } catch (const DivergenceError& e) {
        write_loss_history_csv(partial, out_dir + "/loss.csv");
        meta["status"] = "diverged";
        meta["error"] = e.what();
        write_json(out_dir + "/train_meta.json", meta);
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    std::cout << "checkpoint written to " << out_dir << "/checkpoint.json\n";
    return 0;
}

int cmd_solve(const nlohmann::json& cfg, const ProblemArgs& pargs, const std::string& ckpt_path,
              int p, int nx, int nt, int ref_nx, const std::string& out_dir) {
    PdeProblem problem = pargs.resolve(cfg);
    MultiHeadCheckpoint ckpt = load_checkpoint_checked(ckpt_path, problem);
    LatentSystem sys = build_system(ckpt, problem);

    GridSpec grid{nx, nt, problem.domain};
    PerturbationPlan plan = build_plan(problem.perturbation, p);
    CascadeSolution sol = solve_cascade(sys, problem, plan, grid);

    double ref_seconds = 0.0;
    GridField ref = reference_solution(problem, grid, ref_nx, &ref_seconds);
    ErrorReport err = relative_error(sol.assembled, ref);

    fs::create_directories(out_dir);
    write_solution_csv(out_dir + "/solution.csv", sol.assembled, sol.orders);
    write_solution_csv(out_dir + "/reference.csv", ref);
    nlohmann::json j;
    j["schema_version"] = 1;
    j["p"] = p;
    j["epsilon"] = problem.epsilon;
    j["grid"] = {{"n_x", nx}, {"n_t", nt}};
    j["relative_l2"] = err.relative_l2;
    j["max_abs"] = err.max_abs;
    j["reference_seconds"] = ref_seconds;
    write_json(out_dir + "/error.json", j);
    std::cout << "relative_l2 " << err.relative_l2 << "  max_abs " << err.max_abs << "\n";
    return 0;
}

int cmd_sweep_p(const nlohmann::json& cfg, const ProblemArgs& pargs, const std::string& ckpt_path,
                int p_min, int p_max, int nx, int nt, int ref_nx, const std::string& out_path) {
    if (p_min < 0 || p_max < p_min) throw UsageError("need 0 <= p-min <= p-max");
    PdeProblem problem = pargs.resolve(cfg);
    MultiHeadCheckpoint ckpt = load_checkpoint_checked(ckpt_path, problem);
    LatentSystem sys = build_system(ckpt, problem);

    GridSpec grid{nx, nt, problem.domain};
    double ref_seconds = 0.0;  // reference computed once, reused across p
    GridField ref = reference_solution(problem, grid, ref_nx, &ref_seconds);

    std::vector<SweepRecord> records(std::size_t(p_max - p_min) + 1);
    parallel_for(records.size(), [&](std::size_t i) {
        const int p = p_min + int(i);
        PerturbationPlan plan = build_plan(problem.perturbation, p);
        TimingReport timing = transfer_timing(sys, problem, plan, grid, 3);
        CascadeSolution sol = solve_cascade(sys, problem, plan, grid);
        ErrorReport err = relative_error(sol.assembled, ref);
        records[i] = {double(p), err.relative_l2, err.max_abs, timing.adapt_seconds,
                      i == 0 ? ref_seconds : 0.0};
    });
    write_sweep_csv(out_path, "p", records);
    std::cout << "wrote " << records.size() << " rows to " << out_path << "\n";
    return 0;
}

int cmd_sweep_eps(const nlohmann::json& cfg, const ProblemArgs& pargs,
                  const std::string& ckpt_path, std::vector<double> eps, int p, int nx, int nt,
                  int ref_nx, const std::string& out_path) {
    if (eps.empty() && cfg.contains("eps")) eps = cfg["eps"].get<std::vector<double>>();
    if (eps.empty()) throw UsageError("need at least one --eps value");
    std::sort(eps.begin(), eps.end());
    auto last = std::unique(eps.begin(), eps.end());
    if (last != eps.end()) {
        std::cerr << "warning: duplicate epsilon values removed\n";
        eps.erase(last, eps.end());
    }
    for (double e : eps)
        if (e < 0.0 || e >= 1.0) throw UsageError("epsilon values must lie in [0, 1)");

    PdeProblem problem = pargs.resolve(cfg);
    MultiHeadCheckpoint ckpt = load_checkpoint_checked(ckpt_path, problem);
    LatentSystem sys = build_system(ckpt, problem);
    GridSpec grid{nx, nt, problem.domain};

    // the cascade fields u_j are independent of epsilon; only assembly and the
    // reference depend on it
    PerturbationPlan plan = build_plan(problem.perturbation, p);
    const double adapt_start = now_seconds();
    CascadeSolution base = solve_cascade(sys, problem, plan, grid);
    const double adapt_seconds = now_seconds() - adapt_start;

    std::vector<SweepRecord> records(eps.size());
    parallel_for(eps.size(), [&](std::size_t i) {
        PdeProblem variant = problem;
        variant.epsilon = eps[i];
        double ref_seconds = 0.0;
        GridField ref = reference_solution(variant, grid, ref_nx, &ref_seconds);
        GridField assembled = assemble_solution(variant.epsilon, base.orders);
        ErrorReport err = relative_error(assembled, ref);
        records[i] = {eps[i], err.relative_l2, err.max_abs, adapt_seconds, ref_seconds};
    });
    write_sweep_csv(out_path, "epsilon", records);
    std::cout << "wrote " << records.size() << " rows to " << out_path << "\n";
    return 0;
}

int cmd_compare(const nlohmann::json& cfg, const ProblemArgs& pargs, const std::string& ckpt_path,
                int p, int nx, int nt, const std::string& out_path) {
    PdeProblem problem = pargs.resolve(cfg);
    MultiHeadCheckpoint ckpt = load_checkpoint_checked(ckpt_path, problem);

    double assembly_seconds = 0.0;
    bool cache_hit = false;
    LatentSystem sys = build_system(ckpt, problem, &assembly_seconds, &cache_hit);

    GridSpec grid{nx, nt, problem.domain};
    PerturbationPlan plan = build_plan(problem.perturbation, p);
    TimingReport timing = transfer_timing(sys, problem, plan, grid, 5);
    CascadeSolution sol = solve_cascade(sys, problem, plan, grid);

    double ref_seconds = 0.0;
    GridField ref_std = reference_solution(problem, grid, 201, &ref_seconds);
    MolConfig fine_cfg;
    fine_cfg.n_x = 801;
    fine_cfg.rtol = fine_cfg.atol = 1e-10;
    fine_cfg.output = grid;
    GridField ref_fine = solve_reference(problem, fine_cfg);

    ErrorReport cascade_err = relative_error(sol.assembled, ref_fine);
    ErrorReport classic_err = relative_error(ref_std, ref_fine);

    nlohmann::json j;
    j["schema_version"] = 1;
    j["p"] = p;
    j["grid"] = {{"n_x", nx}, {"n_t", nt}};
    j["assembly_seconds"] = assembly_seconds;
    j["cache_hit"] = cache_hit;
    j["adapt_seconds"] = timing.adapt_seconds;
    j["adapt_samples"] = timing.samples;
    j["reference_seconds"] = ref_seconds;
    j["cascade_relative_l2"] = cascade_err.relative_l2;
    j["reference_relative_l2"] = classic_err.relative_l2;
    if (!out_path.empty()) write_json(out_path, j);

    std::cout << std::left << std::setw(28) << "method" << std::setw(16) << "seconds"
              << "relative_l2\n";
    std::cout << std::left << std::setw(28) << "one-shot adaptation" << std::setw(16)
              << timing.adapt_seconds << cascade_err.relative_l2 << "\n";
    std::cout << std::left << std::setw(28) << "method of lines" << std::setw(16) << ref_seconds
              << classic_err.relative_l2 << "\n";
    std::cout << std::left << std::setw(28) << "latent assembly (one-time)" << std::setw(16)
              << assembly_seconds << (cache_hit ? "(cache hit)" : "") << "\n";
    return 0;
}

int cmd_reference(const nlohmann::json& cfg, const ProblemArgs& pargs, int nx, int nt, int ref_nx,
                  const std::string& out_path) {
    PdeProblem problem = pargs.resolve(cfg);
    GridSpec grid{nx, nt, problem.domain};
    double seconds = 0.0;
    GridField ref = reference_solution(problem, grid, ref_nx, &seconds);
    write_solution_csv(out_path, ref);
    std::cout << "wrote " << out_path << " in " << seconds << " s\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"perturbative cascade PDE solver suite"};
    app.require_subcommand(1);
    int ret = 0;

    std::string config_path;
    app.add_option("--config", config_path, "JSON config file; flags override its values")
        ->expected(1);

    // ---- train
    auto* train_cmd = app.add_subcommand("train", "train a multi-head latent basis");
    ProblemArgs train_p;
    train_p.attach(train_cmd);
    TrainConfig tc;
    std::string train_out = "out/train";
    std::vector<CLI::Option*> train_opts{
        train_cmd->add_option("--iterations", tc.iterations),
        train_cmd->add_option("--seed", tc.seed),
        train_cmd->add_option("--heads", tc.heads),
        train_cmd->add_option("--width", tc.width),
        train_cmd->add_option("--layers", tc.hidden_layers),
        train_cmd->add_option("--lr", tc.learning_rate)};
    train_cmd->add_option("--out", train_out, "output directory");
    train_cmd->callback([&] {
        ret = cmd_train(load_config(config_path), tc, train_opts, train_p, train_out);
    });

    // ---- shared solve/sweep/compare options
    std::string ckpt_path;
    int p = 10, p_min = 0, p_max = 10, nx = 101, nt = 101, ref_nx = 201;
    std::vector<double> eps_list;
    std::string out_path;

    auto* solve_cmd = app.add_subcommand("solve", "one-shot adaptation to a problem");
    ProblemArgs solve_p;
    solve_p.attach(solve_cmd);
    solve_cmd->add_option("--checkpoint", ckpt_path);
    solve_cmd->add_option("--p", p, "perturbation order");
    solve_cmd->add_option("--nx", nx);
    solve_cmd->add_option("--nt", nt);
    solve_cmd->add_option("--ref-nx", ref_nx, "reference solver spatial resolution");
    std::string solve_out = "out/solve";
    solve_cmd->add_option("--out", solve_out, "output directory");
    solve_cmd->callback([&] {
        ret = cmd_solve(load_config(config_path), solve_p, ckpt_path, p, nx, nt, ref_nx, solve_out);
    });

    auto* sweep_p_cmd = app.add_subcommand("sweep-p", "error versus perturbation order");
    ProblemArgs sweep_p_p;
    sweep_p_p.attach(sweep_p_cmd);
    sweep_p_cmd->add_option("--checkpoint", ckpt_path);
    sweep_p_cmd->add_option("--p-min", p_min);
    sweep_p_cmd->add_option("--p-max", p_max);
    sweep_p_cmd->add_option("--nx", nx);
    sweep_p_cmd->add_option("--nt", nt);
    sweep_p_cmd->add_option("--ref-nx", ref_nx);
    out_path = "sweep_p.csv";
    sweep_p_cmd->add_option("--out", out_path, "output CSV path");
    sweep_p_cmd->callback([&] {
        ret = cmd_sweep_p(load_config(config_path), sweep_p_p, ckpt_path, p_min, p_max, nx, nt,
                          ref_nx, out_path);
    });

    auto* sweep_eps_cmd = app.add_subcommand("sweep-eps", "error versus epsilon at fixed order");
    ProblemArgs sweep_eps_p;
    sweep_eps_p.attach(sweep_eps_cmd);
    sweep_eps_cmd->add_option("--checkpoint", ckpt_path);
    sweep_eps_cmd->add_option("--eps", eps_list, "epsilon values")->delimiter(',');
    sweep_eps_cmd->add_option("--p", p);
    sweep_eps_cmd->add_option("--nx", nx);
    sweep_eps_cmd->add_option("--nt", nt);
    sweep_eps_cmd->add_option("--ref-nx", ref_nx);
    std::string sweep_eps_out = "sweep_eps.csv";
    sweep_eps_cmd->add_option("--out", sweep_eps_out, "output CSV path");
    sweep_eps_cmd->callback([&] {
        ret = cmd_sweep_eps(load_config(config_path), sweep_eps_p, ckpt_path, eps_list, p, nx, nt,
                            ref_nx, sweep_eps_out);
    });

    auto* compare_cmd = app.add_subcommand("compare", "timing and accuracy versus the classical solver");
    ProblemArgs compare_p;
    compare_p.attach(compare_cmd);
    compare_cmd->add_option("--checkpoint", ckpt_path);
    compare_cmd->add_option("--p", p);
    compare_cmd->add_option("--nx", nx);
    compare_cmd->add_option("--nt", nt);
    std::string compare_out;
    compare_cmd->add_option("--out", compare_out, "optional JSON report path");
    compare_cmd->callback([&] {
        ret = cmd_compare(load_config(config_path), compare_p, ckpt_path, p, nx, nt, compare_out);
    });

    auto* ref_cmd = app.add_subcommand("reference", "classical reference solve only");
    ProblemArgs ref_p;
    ref_p.attach(ref_cmd);
    ref_cmd->add_option("--nx", nx);
    ref_cmd->add_option("--nt", nt);
    ref_cmd->add_option("--ref-nx", ref_nx);
    std::string ref_out = "reference.csv";
    ref_cmd->add_option("--out", ref_out, "output CSV path");
    ref_cmd->callback(
        [&] { ret = cmd_reference(load_config(config_path), ref_p, nx, nt, ref_nx, ref_out); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return ret;
}
