#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "extremal/analysis.hpp"
#include "extremal/annealing.hpp"
#include "extremal/engine.hpp"
#include "extremal/errors.hpp"
#include "extremal/experiments.hpp"
#include "extremal/instances.hpp"
#include "extremal/models.hpp"
#include "extremal/trace_io.hpp"

#ifndef EXTREMAL_VERSION
#define EXTREMAL_VERSION "0.0.0"
#endif

namespace extremal::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

double round_grid(double v) { return std::round(v * 1e9) / 1e9; }

// ---------------------------------------------------------------------------
// Output plumbing

struct Output {
  fs::path dir;
  std::string id;
  json entry;

  Output(const std::string& out_dir, const std::string& command, const std::vector<std::string>& args)
      : dir(out_dir) {
    std::string key = command;
    for (std::size_t i = 0; i < args.size(); ++i) {
      if (args[i] == "--out") {
        ++i;
        continue;
      }
      if (args[i].rfind("--out=", 0) == 0) continue;
      key += '\x1f';
      key += args[i];
    }
    id = hex64(fnv1a(key));
    entry["id"] = id;
    entry["command"] = command;
    entry["args"] = args;
    entry["version"] = EXTREMAL_VERSION;
  }

  std::ofstream open(const std::string& name) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
    const fs::path path = dir / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    entry["outputs"].push_back(name);
    return out;
  }

  std::ofstream open_csv(const std::string& name, const std::string& header) {
    auto out = open(name);
    out << "# manifest " << id << '\n' << header << '\n';
    return out;
  }

  void commit() {
    std::error_code ec;
    fs::create_directories(dir, ec);
    const fs::path path = dir / "manifest.jsonl";
    std::ofstream out(path, std::ios::app | std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << entry.dump() << '\n';
    if (!out) throw IoError("cannot write " + path.string());
  }
};

std::string num(double v) { return format_number(v); }

// ---------------------------------------------------------------------------
// Shared flag handling

ProblemKind problem_from(const std::string& s) {
  if (s == "gbp") return ProblemKind::bipartition;
  if (s == "color") return ProblemKind::coloring;
  if (s == "spinglass") return ProblemKind::spin_glass;
  throw UsageError("unknown problem '" + s + "'");
}

GeneratorKind generator_from(const std::string& s) {
  if (s == "er") return GeneratorKind::erdos_renyi;
  if (s == "geo") return GeneratorKind::geometric;
  if (s == "pmj") return GeneratorKind::pm_j_cubic;
  throw UsageError("unknown generator '" + s + "'");
}

struct EnsembleFlags {
  std::string problem = "gbp";
  std::string gen;
  std::vector<std::size_t> n;
  std::vector<std::size_t> L;
  std::vector<double> c;
  int K = 3;
  std::size_t instances = 1;
  std::uint64_t seed = 0;

  void add(CLI::App* app, bool lists) {
    app->add_option("--problem", problem, "gbp | color | spinglass")
        ->check(CLI::IsMember({"gbp", "color", "spinglass"}));
    app->add_option("--gen", gen, "er | geo | pmj")->check(CLI::IsMember({"er", "geo", "pmj"}));
    auto* on = app->add_option("--n", n, "vertices");
    auto* oL = app->add_option("--L", L, "lattice side");
    auto* oc = app->add_option("--c", c, "mean connectivity");
    if (lists) {
      on->delimiter(',');
      oL->delimiter(',');
      oc->delimiter(',');
    } else {
      on->expected(1);
      oL->expected(1);
      oc->expected(1);
    }
    app->add_option("--K", K, "colors for coloring")->check(CLI::Range(2, 127));
    app->add_option("--instances", instances, "ensemble size")->check(CLI::PositiveNumber);
    app->add_option("--seed", seed, "master seed");
  }

  ProblemKind kind() const { return problem_from(problem); }

  GeneratorKind generator() const {
    if (!gen.empty()) return generator_from(gen);
    return kind() == ProblemKind::spin_glass ? GeneratorKind::pm_j_cubic : GeneratorKind::erdos_renyi;
  }

  // One spec per (size, c) in sweep order.
  std::vector<EnsembleSpec> specs() const {
    const GeneratorKind g = generator();
    const bool lattice = g == GeneratorKind::pm_j_cubic;
    if (lattice != (kind() == ProblemKind::spin_glass)) {
      throw UsageError("--problem spinglass goes with --gen pmj (or --instance)");
    }
    if (lattice && L.empty()) throw UsageError("--gen pmj needs --L");
    if (!lattice && n.empty()) throw UsageError("graph generators need --n");
    if (!lattice && c.empty()) throw UsageError("graph generators need --c");
    std::vector<EnsembleSpec> out;
    const auto& sizes = lattice ? L : n;
    const std::vector<double> cs = lattice ? std::vector<double>{0.0} : c;
    for (std::size_t size : sizes) {
      for (double cv : cs) {
        EnsembleSpec s;
        s.problem = kind();
        s.generator = g;
        (lattice ? s.L : s.n) = size;
        s.c = cv;
        s.colors = K;
        s.instances = instances;
        s.seed = seed;
        out.push_back(s);
      }
    }
    return out;
  }
};

json spec_json(const EnsembleSpec& s) {
  json j;
  j["problem"] = std::string(to_string(s.problem));
  j["generator"] = s.generator == GeneratorKind::erdos_renyi ? "er"
                   : s.generator == GeneratorKind::geometric ? "geo"
                                                             : "pmj";
  if (s.generator == GeneratorKind::pm_j_cubic) {
    j["L"] = s.L;
  } else {
    j["n"] = s.n;
    j["c"] = s.c;
  }
  if (s.problem == ProblemKind::coloring) j["K"] = s.colors;
  j["instances"] = s.instances;
  j["seed"] = s.seed;
  return j;
}

json digests(const EnsembleSpec& s) {
  json out = json::array();
  for (std::size_t i = 0; i < s.instances; ++i) out.push_back(instance_digest(ensemble_instance(s, i)));
  return out;
}

json calibration_json(const Calibration& cal) {
  json j;
  j["operations"] = cal.operations;
  j["eo_seconds_per_step"] = {cal.eo_seconds_per_step[0], cal.eo_seconds_per_step[1]};
  j["sa_seconds_per_trial"] = {cal.sa_seconds_per_trial[0], cal.sa_seconds_per_trial[1]};
  return j;
}

// ---------------------------------------------------------------------------
// generate

struct GenerateCmd {
  EnsembleFlags ens;
  std::string out = ".";

  void add(CLI::App* app) {
    ens.add(app, false);
    app->add_option("--out", out, "output directory");
  }

  int exec(const std::vector<std::string>& args) {
    const auto specs = ens.specs();
    Output o(out, "generate", args);
    const EnsembleSpec& s = specs.front();
    o.entry["ensemble"] = spec_json(s);
    json files = json::array();
    for (std::size_t i = 0; i < s.instances; ++i) {
      const Instance inst = ensemble_instance(s, i);
      const std::string name = "instance_" + std::to_string(i) + ".txt";
      auto f = o.open(name);
      f << format_instance(inst);
      files.push_back({{"file", name}, {"digest", instance_digest(inst)}});
    }
    o.entry["instances"] = files;
    o.commit();
    return ok;
  }
};

// ---------------------------------------------------------------------------
// run

struct RunCmd {
  EnsembleFlags ens;
  std::string algo = "eo-tau";
  std::optional<double> tau;
  std::string steps = "100n";
  std::uint32_t restarts = 5;
  std::string instance;
  std::string out = ".";

  void add(CLI::App* app) {
    ens.add(app, false);
    app->add_option("--algo", algo, "eo | eo-tau | sa")->check(CLI::IsMember({"eo", "eo-tau", "sa"}));
    app->add_option("--tau", tau, "rank exponent (eo-tau)")->check(CLI::NonNegativeNumber);
    app->add_option("--steps", steps, "EO updates or SA trials per restart; N or Nn (N times n)");
    app->add_option("--restarts", restarts, "independent restarts")->check(CLI::PositiveNumber);
    app->add_option("--instance", instance, "instance file (instead of --gen)");
    app->add_option("--out", out, "output directory");
  }

  int exec(const std::vector<std::string>& args) {
    if (algo == "eo-tau" && !tau) throw UsageError("--algo eo-tau needs --tau");
    const ProblemKind kind = ens.kind();
    Instance inst;
    std::uint64_t seed = 0;
    json source;
    if (!instance.empty()) {
      inst = read_instance(instance);
      seed = derive_seed(ens.seed, 1);
      source["file"] = instance;
    } else {
      const EnsembleSpec s = ens.specs().front();
      inst = ensemble_instance(s, 0);
      seed = run_seed(s, 0, 0);
      source = spec_json(s);
    }
    const bool is_sg = std::holds_alternative<SpinGlass>(inst);
    if (is_sg != (kind == ProblemKind::spin_glass)) throw UsageError("instance type does not match --problem");
    const auto partner = algo == "eo" ? BipartitionProblem::Partner::uniform : BipartitionProblem::Partner::ranked;
    std::unique_ptr<ProblemAdapter> adapter;
    try {
      adapter = make_adapter(kind, inst, ens.K, partner);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    const std::uint64_t budget = parse_steps(steps, adapter->size());

    Output o(out, "run", args);
    o.entry["source"] = source;
    o.entry["instance_digest"] = instance_digest(inst);
    o.entry["algo"] = algo;
    o.entry["steps"] = budget;
    o.entry["restarts"] = restarts;
    o.entry["seed"] = ens.seed;

    RunTrace trace;
    if (algo == "sa") {
      SaSchedule schedule;
      schedule.max_trials = budget;
      schedule.fit_cooling_to_budget = true;
      json runs = json::array();
      for (std::uint32_t r = 0; r < restarts; ++r) {
        SaResult res = sa_run(*adapter, schedule, derive_seed(seed, r));
        runs.push_back({{"initial_temperature", res.initial_temperature},
                        {"final_temperature", res.final_temperature},
                        {"cooling", res.cooling},
                        {"stage_length", res.stage_length},
                        {"imbalance_weight", res.imbalance_weight},
                        {"accepted", res.accepted}});
        trace.restart_best_costs.push_back(res.trace.best_cost);
        if (r == 0 || res.trace.best_cost < trace.best_cost) {
          auto costs = std::move(trace.restart_best_costs);
          trace = std::move(res.trace);
          trace.restart_best_costs = std::move(costs);
          trace.best_restart = r;
        }
      }
      o.entry["schedule"] = {{"target_acceptance", schedule.target_acceptance},
                             {"min_temperature", schedule.min_temperature},
                             {"fit_cooling_to_budget", true},
                             {"restarts", runs}};
    } else {
      const TauPolicy policy = algo == "eo" ? TauPolicy::greedy(adapter->size(), seed)
                                            : TauPolicy(*tau, adapter->size(), seed);
      o.entry["tau"] = algo == "eo" ? json("inf") : json(*tau);
      RunOptions options;
      options.max_steps = budget;
      options.restarts = restarts;
      trace = run(*adapter, policy, options);
    }
    o.entry["best_cost"] = trace.best_cost;
    o.entry["restart_best_costs"] = trace.restart_best_costs;

    {
      auto f = o.open("trace.csv");
      write_trace_csv(f, trace, o.id);
    }
    {
      auto f = o.open_csv("best.csv", "variable,state");
      for (std::size_t i = 0; i < trace.best_states.size(); ++i) {
        f << i + 1 << ',' << static_cast<int>(trace.best_states[i]) << '\n';
      }
    }
    o.commit();
    std::cout << "best_cost " << num(trace.best_cost) << '\n';
    return ok;
  }
};

// ---------------------------------------------------------------------------
// sweep-tau

struct SweepCmd {
  EnsembleFlags ens;
  std::string grid = "0.8:2.0:0.1";
  std::string steps = "100n";
  std::uint32_t restarts = 5;
  std::size_t runs = 10;
  std::string out = ".";

  void add(CLI::App* app) {
    ens.add(app, true);
    app->add_option("--tau-grid", grid, "a:b:step or comma list");
    app->add_option("--steps", steps, "updates per restart; N or Nn");
    app->add_option("--restarts", restarts, "restarts per run")->check(CLI::PositiveNumber);
    app->add_option("--runs", runs, "runs per instance and tau")->check(CLI::PositiveNumber);
    app->add_option("--out", out, "output directory");
  }

  int exec(const std::vector<std::string>& args) {
    const auto taus = parse_grid(grid);
    const auto specs = ens.specs();
    Output o(out, "sweep-tau", args);
    o.entry["taus"] = taus;
    o.entry["runs"] = runs;
    o.entry["restarts"] = restarts;
    json ensembles = json::array();
    std::vector<SweepRow> rows;
    for (const auto& s : specs) {
      EoProtocol p;
      p.steps = parse_steps(steps, ensemble_size(s));
      p.restarts = restarts;
      p.runs = runs;
      json e = spec_json(s);
      e["steps"] = p.steps;
      e["digests"] = digests(s);
      ensembles.push_back(e);
      const auto part = sweep_tau(s, taus, p);
      rows.insert(rows.end(), part.begin(), part.end());
    }
    o.entry["ensembles"] = ensembles;
    std::stable_sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
      return a.n != b.n ? a.n < b.n : a.tau < b.tau;
    });
    auto f = o.open_csv("sweep.csv", "tau,n,mean_best_cost,stderr");
    for (const auto& r : rows) {
      f << num(r.tau) << ',' << r.n << ',' << num(r.mean_best_cost) << ',' << num(r.stderr_cost) << '\n';
    }
    o.commit();
    return ok;
  }
};

// ---------------------------------------------------------------------------
// compare

struct CompareCmd {
  EnsembleFlags ens;
  double tau = 1.4;
  std::string steps = "200n";
  std::size_t runs = 1;
  std::optional<std::uint64_t> sa_trials;
  bool self = false;
  std::string out = ".";

  void add(CLI::App* app) {
    ens.add(app, true);
    app->add_option("--tau", tau, "EO rank exponent")->check(CLI::NonNegativeNumber);
    app->add_option("--steps", steps, "EO updates per run; N or Nn");
    app->add_option("--runs", runs, "runs per instance")->check(CLI::PositiveNumber);
    app->add_option("--sa-trials", sa_trials, "fixed SA budget instead of calibrating (replay)");
    app->add_flag("--self-compare", self, "run EO in place of SA");
    app->add_option("--out", out, "output directory");
  }

  int exec(const std::vector<std::string>& args) {
    if (ens.kind() != ProblemKind::bipartition) throw UsageError("compare supports --problem gbp only");
    const auto specs = ens.specs();
    Output o(out, "compare", args);
    o.entry["tau"] = tau;
    o.entry["runs"] = runs;
    o.entry["self_compare"] = self;
    json ensembles = json::array();
    std::vector<CompareRow> rows;
    for (const auto& s : specs) {
      CompareOptions opt;
      opt.tau = tau;
      opt.eo_steps = parse_steps(steps, ensemble_size(s));
      opt.runs = runs;
      opt.self_compare = self;
      if (sa_trials) opt.budget = BudgetPair{opt.eo_steps, *sa_trials};
      if (self) opt.budget = BudgetPair{opt.eo_steps, opt.eo_steps};
      const CompareRow row = compare_eo_sa(s, opt);
      json e = spec_json(s);
      e["eo_steps"] = row.eo_steps;
      e["sa_trials"] = row.sa_trials;
      if (row.calibration) e["calibration"] = calibration_json(*row.calibration);
      e["digests"] = digests(s);
      ensembles.push_back(e);
      rows.push_back(row);
    }
    o.entry["ensembles"] = ensembles;
    o.entry["sa_schedule"] = {{"stage_length", "64n"},
                              {"target_acceptance", 0.9},
                              {"min_temperature", 0.05},
                              {"imbalance_weight", "0.05 * mean degree"},
                              {"fit_cooling_to_budget", true}};
    std::stable_sort(rows.begin(), rows.end(), [](const CompareRow& a, const CompareRow& b) {
      return a.n != b.n ? a.n < b.n : a.c < b.c;
    });
    auto f = o.open_csv("compare.csv", "c,n,eo_mean,sa_mean,relative_error,eo_steps,sa_trials");
    for (const auto& r : rows) {
      f << num(r.c) << ',' << r.n << ',' << num(r.eo_mean) << ',' << num(r.sa_mean) << ','
        << num(r.relative_error) << ',' << r.eo_steps << ',' << r.sa_trials << '\n';
    }
    o.commit();
    return ok;
  }
};

// ---------------------------------------------------------------------------
// models

struct BsCmd {
  std::size_t n = 1000;
  std::string steps = "1e7";
  std::size_t bins = 100;
  std::uint64_t seed = 0;
  std::string out = ".";

  void add(CLI::App* app) {
    app->add_option("--n", n, "species on the ring")->check(CLI::Range(3, 100'000'000));
    app->add_option("--steps", steps, "updates; N or Nn");
    app->add_option("--bins", bins, "histogram bins")->check(CLI::Range(5, 100'000));
    app->add_option("--seed", seed, "seed");
    app->add_option("--out", out, "output directory");
  }

  int exec(const std::vector<std::string>& args) {
    const std::uint64_t total = parse_steps(steps, n);
    BsChain chain(n, seed);
    for (std::uint64_t t = 0; t < total; ++t) chain.step();
    const auto counts = histogram01(chain.fitness(), bins);
    const double threshold = histogram_threshold(counts);
    Output o(out, "models bs", args);
    o.entry["n"] = n;
    o.entry["steps"] = total;
    o.entry["seed"] = seed;
    o.entry["threshold"] = threshold;
    auto f = o.open_csv("bs_histogram.csv", "bin_low,bin_high,count");
    for (std::size_t b = 0; b < bins; ++b) {
      f << num(static_cast<double>(b) / static_cast<double>(bins)) << ','
        << num(static_cast<double>(b + 1) / static_cast<double>(bins)) << ',' << counts[b] << '\n';
    }
    o.commit();
    std::cout << "threshold " << num(threshold) << '\n';
    return ok;
  }
};

struct JamCmd {
  std::vector<std::size_t> n{1000};
  std::string grid = "1:4:0.1";
  std::optional<double> tau;
  std::string kernel = "barrier";
  std::string updates = "20n";
  bool stochastic = false;
  std::uint64_t seed = 0;
  std::uint64_t record_every = 0;
  std::string out = ".";

  void add(CLI::App* app) {
    app->add_option("--n", n, "system sizes")->delimiter(',');
    app->add_option("--tau-grid", grid, "a:b:step or comma list");
    app->add_option("--tau", tau, "single tau: write the trajectory instead of a sweep");
    app->add_option("--kernel", kernel, "barrier | constant | identity | absorbing")
        ->check(CLI::IsMember({"barrier", "constant", "identity", "absorbing"}));
    app->add_option("--updates", updates, "updates per run; N or Nn");
    app->add_flag("--stochastic", stochastic, "move single variables instead of mean-field flow");
    app->add_option("--seed", seed, "seed (stochastic mode)");
    app->add_option("--record-every", record_every, "trajectory sampling interval");
    app->add_option("--out", out, "output directory");
  }

  FlowModel model() const {
    if (kernel == "constant") return FlowModel::constant_barrier();
    if (kernel == "identity") return FlowModel::identity();
    if (kernel == "absorbing") return FlowModel::absorbing();
    return FlowModel::barrier();
  }

  int exec(const std::vector<std::string>& args) {
    if (n.empty()) throw UsageError("--n needs at least one size");
    Output o(out, "models jam", args);
    o.entry["kernel"] = kernel;
    o.entry["stochastic"] = stochastic;
    o.entry["seed"] = seed;
    o.entry["initial_rho"] = {0.0, 0.0, 1.0};
    const FlowModel m = model();
    if (tau) {
      if (n.size() != 1) throw UsageError("--tau takes a single --n");
      JamOptions opt;
      opt.updates = parse_steps(updates, n[0]);
      opt.stochastic = stochastic;
      opt.seed = seed;
      opt.record_every = record_every == 0 ? std::max<std::uint64_t>(1, n[0] / 10) : record_every;
      const JamResult r = jam_evolve(JamState{{0.0, 0.0, 1.0}, n[0], *tau}, m, opt);
      o.entry["n"] = n[0];
      o.entry["tau"] = *tau;
      o.entry["updates"] = opt.updates;
      o.entry["final_cost"] = r.final_cost;
      o.entry["mean_cost"] = r.mean_cost;
      auto f = o.open_csv("jam_trajectory.csv", "step,rho0,rho1,rho2,cost");
      for (const auto& s : r.trajectory) {
        f << s.step << ',' << num(s.rho[0]) << ',' << num(s.rho[1]) << ',' << num(s.rho[2]) << ',' << num(s.cost)
          << '\n';
      }
    } else {
      const auto taus = parse_grid(grid);
      o.entry["taus"] = taus;
      json argmins = json::array();
      auto f = o.open_csv("jam_sweep.csv", "tau,n,mean_cost");
      for (std::size_t size : n) {
        JamOptions opt;
        opt.updates = parse_steps(updates, size);
        opt.stochastic = stochastic;
        opt.seed = seed;
        const auto sweep = jam_tau_sweep(size, taus, m, opt);
        for (const auto& p : sweep) f << num(p.tau) << ',' << p.n << ',' << num(p.mean_cost) << '\n';
        argmins.push_back({{"n", size}, {"updates", opt.updates}, {"argmin_tau", sweep_argmin(sweep)}});
      }
      o.entry["argmin"] = argmins;
    }
    o.commit();
    return ok;
  }
};

// ---------------------------------------------------------------------------
// analyze

struct ConvergenceCmd {
  std::vector<std::string> traces;
  std::uint64_t first = 1;
  std::optional<std::uint64_t> last;
  std::size_t points = 40;
  std::string out = ".";

  void add(CLI::App* app) {
    app->add_option("traces", traces, "trace CSV files (>= 20)")->required();
    app->add_option("--first", first, "first step of the fit window")->check(CLI::PositiveNumber);
    app->add_option("--last", last, "last step (default: shortest trace)");
    app->add_option("--points", points, "log-spaced sample points")->check(CLI::Range(3, 100'000));
    app->add_option("--out", out, "output directory");
  }

  int exec(const std::vector<std::string>& args) {
    std::vector<RunTrace> runs;
    for (const auto& path : traces) {
      std::ifstream in(path);
      if (!in) throw IoError("cannot read " + path);
      RunTrace t;
      t.samples = read_trace_csv(in);
      if (t.samples.empty()) throw ParseError(1, path + ": trace has no samples");
      runs.push_back(std::move(t));
    }
    std::uint64_t end = last.value_or(std::numeric_limits<std::uint64_t>::max());
    for (const auto& t : runs) end = std::min(end, t.samples.back().step);
    ConvergenceFit fit;
    try {
      fit = fit_convergence(runs, first, end, points);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    Output o(out, "analyze convergence", args);
    o.entry["first"] = first;
    o.entry["last"] = end;
    auto f = o.open_csv("convergence.csv", "quantity,value,stderr");
    f << "c_inf," << num(fit.c_inf) << ",\n";
    f << "amplitude," << num(fit.amplitude) << ",\n";
    f << "gamma," << num(fit.exponent) << ",\n";
    f << "residual," << num(fit.residual) << ",\n";
    o.commit();
    std::cout << "gamma " << num(fit.exponent) << '\n';
    return ok;
  }
};

std::vector<ScalingPoint> read_scaling_data(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path);
  std::vector<ScalingPoint> data;
  std::string line;
  std::size_t number = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
    if (header.empty()) {
      header = cells;
      continue;
    }
    auto col = [&](const std::string& name) -> std::optional<double> {
      const auto it = std::find(header.begin(), header.end(), name);
      if (it == header.end()) return std::nullopt;
      const auto i = static_cast<std::size_t>(it - header.begin());
      if (i >= cells.size()) throw ParseError(number, "missing column " + name);
      double v = 0.0;
      const auto& s = cells[i];
      const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
      if (r.ec != std::errc() || r.ptr != s.data() + s.size()) throw ParseError(number, "bad number '" + s + "'");
      return v;
    };
    const auto n = col("n");
    const auto c = col("c");
    const auto cost = col("mean_cost");
    if (!n || !c || !cost) throw ParseError(1, "header needs n, c and mean_cost columns");
    data.push_back({static_cast<std::size_t>(*n), *c, *cost, col("stderr").value_or(0.0)});
  }
  return data;
}

struct CollapseCmd {
  std::string data;
  std::string out = ".";

  void add(CLI::App* app) {
    app->add_option("data", data, "CSV with columns n,c,mean_cost[,stderr]")->required();
    app->add_option("--out", out, "output directory");
  }

  int exec(const std::vector<std::string>& args) {
    const auto points = read_scaling_data(data);
    ScalingFit fit;
    try {
      fit = scaling_collapse(points);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    Output o(out, "analyze collapse", args);
    {
      auto f = o.open_csv("collapse.csv", "quantity,value,stderr");
      f << "c_crit," << num(fit.c_crit) << ",\n";
      f << "nu," << num(fit.nu) << ",\n";
      f << "residual," << num(fit.collapse_residual) << ",\n";
    }
    {
      auto f = o.open_csv("collapse_curves.csv", "n,x,y");
      for (const auto& p : fit.curves) f << p.n << ',' << num(p.x) << ',' << num(p.y) << '\n';
    }
    o.commit();
    std::cout << "c_crit " << num(fit.c_crit) << " nu " << num(fit.nu) << '\n';
    return ok;
  }
};

struct ScanCmd {
  EnsembleFlags ens;
  double tau = 1.4;
  std::string steps = "1000n";
  std::uint32_t restarts = 5;
  bool backbone = false;
  std::size_t enum_runs = 20;
  std::string out = ".";

  void add(CLI::App* app) {
    ens.add(app, true);
    app->add_option("--tau", tau, "EO rank exponent")->check(CLI::NonNegativeNumber);
    app->add_option("--steps", steps, "updates per restart (or per enumeration run); N or Nn");
    app->add_option("--restarts", restarts, "restarts per instance")->check(CLI::PositiveNumber);
    app->add_flag("--backbone", backbone, "enumerate ground states and measure the backbone");
    app->add_option("--enum-runs", enum_runs, "EO runs per instance for enumeration")
        ->check(CLI::PositiveNumber);
    app->add_option("--out", out, "output directory");
  }

  int exec(const std::vector<std::string>& args) {
    const auto specs = ens.specs();
    Output o(out, "analyze scan", args);
    o.entry["tau"] = tau;
    o.entry["restarts"] = restarts;
    o.entry["backbone"] = backbone;
    json ensembles = json::array();
    auto f = o.open_csv("scan.csv", "n,c,mean_cost,stderr,backbone,backbone_stderr,saturated");
    for (const auto& s : specs) {
      ScanOptions opt;
      opt.protocol.tau = tau;
      opt.protocol.steps = parse_steps(steps, ensemble_size(s));
      opt.protocol.restarts = restarts;
      opt.backbone = backbone;
      opt.enumeration.runs = enum_runs;
      opt.enumeration.steps_per_run = opt.protocol.steps;
      const ScanRow r = ground_state_scan(s, opt);
      json e = spec_json(s);
      e["steps"] = opt.protocol.steps;
      e["digests"] = digests(s);
      ensembles.push_back(e);
      f << r.n << ',' << num(r.c) << ',' << num(r.mean_cost) << ',' << num(r.stderr_cost) << ',';
      if (backbone) {
        f << num(r.backbone) << ',' << num(r.stderr_backbone) << ',' << num(r.saturated_fraction);
      } else {
        f << ",,";
      }
      f << '\n';
    }
    o.entry["ensembles"] = ensembles;
    o.commit();
    return ok;
  }
};

}  // namespace

std::uint64_t parse_steps(const std::string& text, std::size_t n) {
  if (text.empty()) throw std::invalid_argument("empty step count");
  std::string body = text;
  double scale = 1.0;
  if (body.back() == 'n') {
    body.pop_back();
    scale = static_cast<double>(n);
  }
  double value = 0.0;
  const auto r = std::from_chars(body.data(), body.data() + body.size(), value);
  if (r.ec != std::errc() || r.ptr != body.data() + body.size() || !(value > 0.0)) {
    throw std::invalid_argument("bad step count '" + text + "'");
  }
  const double total = std::round(value * scale);
  if (scale == 1.0 && total != value) throw std::invalid_argument("step count '" + text + "' is not an integer");
  if (total < 1.0 || total > 9.2e18) throw std::invalid_argument("step count '" + text + "' out of range");
  return static_cast<std::uint64_t>(total);
}

std::vector<double> parse_grid(const std::string& text) {
  auto to_double = [&](const std::string& s) {
    double v = 0.0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size()) {
      throw std::invalid_argument("bad grid value '" + s + "' in '" + text + "'");
    }
    return v;
  };
  std::vector<double> out;
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
    if (parts.size() != 3) throw std::invalid_argument("grid must be a:b:step");
    const double a = to_double(parts[0]);
    const double b = to_double(parts[1]);
    const double step = to_double(parts[2]);
    if (!(step > 0.0) || b < a) throw std::invalid_argument("grid needs step > 0 and b >= a");
    const auto count = static_cast<std::size_t>(std::floor((b - a) / step + 1e-9)) + 1;
    for (std::size_t i = 0; i < count; ++i) out.push_back(round_grid(a + static_cast<double>(i) * step));
  } else {
    std::stringstream ss(text);
    for (std::string p; std::getline(ss, p, ',');) out.push_back(to_double(p));
  }
  if (out.empty()) throw std::invalid_argument("empty grid");
  return out;
}

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"Extremal optimization toolkit", "extremal"};
  app.require_subcommand(1);
  app.set_version_flag("--version", EXTREMAL_VERSION);

  GenerateCmd generate;
  RunCmd run_cmd;
  SweepCmd sweep;
  CompareCmd compare;
  BsCmd bs;
  JamCmd jam;
  ConvergenceCmd convergence;
  CollapseCmd collapse;
  ScanCmd scan;

  generate.add(app.add_subcommand("generate", "write generated instances"));
  run_cmd.add(app.add_subcommand("run", "run EO or SA on one instance"));
  sweep.add(app.add_subcommand("sweep-tau", "mean best cost against tau"));
  compare.add(app.add_subcommand("compare", "EO against SA at equal wall time"));
  auto* models = app.add_subcommand("models", "Bak-Sneppen and jamming dynamics");
  models->require_subcommand(1);
  bs.add(models->add_subcommand("bs", "Bak-Sneppen fitness histogram"));
  jam.add(models->add_subcommand("jam", "three-state jamming model"));
  auto* analyze = app.add_subcommand("analyze", "fits and scans");
  analyze->require_subcommand(1);
  convergence.add(analyze->add_subcommand("convergence", "power-law fit of best-cost traces"));
  collapse.add(analyze->add_subcommand("collapse", "finite-size scaling collapse"));
  scan.add(analyze->add_subcommand("scan", "ground-state cost and backbone against c"));

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return usage;
  }

  // Everything after the subcommand path identifies the run.
  const auto parsed = app.get_subcommands();
  CLI::App* sub = parsed.front();
  const std::size_t depth = sub == models || sub == analyze ? 2 : 1;
  const std::vector<std::string> flags(args.begin() + static_cast<long>(std::min(depth, args.size())), args.end());

  try {
    if (sub->get_name() == "generate") return generate.exec(flags);
    if (sub->get_name() == "run") return run_cmd.exec(flags);
    if (sub->get_name() == "sweep-tau") return sweep.exec(flags);
    if (sub->get_name() == "compare") return compare.exec(flags);
    if (sub->get_name() == "models") {
      if (models->get_subcommand("bs")->parsed()) return bs.exec(flags);
      return jam.exec(flags);
    }
    if (analyze->get_subcommand("convergence")->parsed()) return convergence.exec(flags);
    if (analyze->get_subcommand("collapse")->parsed()) return collapse.exec(flags);
    return scan.exec(flags);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return usage;
  } catch (const CalibrationUnstable& e) {
    std::cerr << "error: " << e.what() << '\n';
    return calibration;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return io;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return io;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return usage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return failure;
  }
}

}  // namespace extremal::cli
