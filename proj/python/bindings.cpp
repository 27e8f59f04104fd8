#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>
#include <sstream>

#include "extremal/analysis.hpp"
#include "extremal/annealing.hpp"
#include "extremal/engine.hpp"
#include "extremal/errors.hpp"
#include "extremal/instances.hpp"
#include "extremal/models.hpp"

namespace py = pybind11;
using namespace extremal;

namespace {

std::vector<int> to_ints(std::span<const State> s) { return {s.begin(), s.end()}; }

std::vector<State> to_states(const std::vector<int>& s) { return {s.begin(), s.end()}; }

py::dict trace_dict(const RunTrace& t) {
  py::list samples;
  for (const auto& s : t.samples) samples.append(py::make_tuple(s.step, s.cost, s.best_cost));
  py::dict d;
  d["best_cost"] = t.best_cost;
  d["best_states"] = to_ints(t.best_states);
  d["steps_to_best"] = t.steps_to_best;
  d["restart_best_costs"] = t.restart_best_costs;
  d["samples"] = samples;
  return d;
}

FlowModel kernel_by_name(const std::string& name) {
  if (name == "barrier") return FlowModel::barrier();
  if (name == "constant") return FlowModel::constant_barrier();
  if (name == "identity") return FlowModel::identity();
  if (name == "absorbing") return FlowModel::absorbing();
  throw std::invalid_argument("unknown kernel: " + name);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Extremal optimization core";
  m.attr("__version__") = "0.1.0";

  auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ParseError>(m, "ParseError", error.ptr());
  py::register_exception<IoError>(m, "IoError", error.ptr());
  py::register_exception<CalibrationUnstable>(m, "CalibrationUnstable", error.ptr());
  py::register_exception<FitDegenerate>(m, "FitDegenerate", error.ptr());
  py::register_exception<CollapseUnstable>(m, "CollapseUnstable", error.ptr());
  py::register_exception<MassNotConserved>(m, "MassNotConserved", error.ptr());
  py::register_exception<TooLarge>(m, "TooLarge", error.ptr());
  py::register_exception<EmptySet>(m, "EmptySet", error.ptr());

  // Instances
  py::class_<Graph, std::shared_ptr<Graph>>(m, "Graph")
      .def(py::init([](std::size_t n, const std::vector<std::pair<Vertex, Vertex>>& edges) {
             std::vector<Edge> list;
             for (auto [u, v] : edges) list.push_back({u, v});
             return std::make_shared<Graph>(n, list);
           }),
           py::arg("n"), py::arg("edges"))
      .def_property_readonly("n", &Graph::vertex_count)
      .def_property_readonly("edge_count", &Graph::edge_count)
      .def_property_readonly("mean_degree", &Graph::mean_degree)
      .def("edges", [](const Graph& g) {
        std::vector<std::pair<Vertex, Vertex>> out;
        for (const Edge& e : g.edges()) out.emplace_back(e.u, e.v);
        return out;
      })
      .def("to_text", [](const Graph& g) { return format_instance(Instance{g}); });

  py::class_<SpinGlass, std::shared_ptr<SpinGlass>>(m, "SpinGlass")
      .def_property_readonly("n", &SpinGlass::spin_count)
      .def("bonds", [](const SpinGlass& s) {
        std::vector<std::tuple<Vertex, Vertex, int>> out;
        for (const Bond& b : s.bonds()) out.emplace_back(b.i, b.j, b.coupling);
        return out;
      })
      .def("to_text", [](const SpinGlass& s) { return format_instance(Instance{s}); });

  m.def("erdos_renyi", [](std::size_t n, double c, std::uint64_t seed) {
    return std::make_shared<Graph>(generate_erdos_renyi(n, c, seed));
  }, py::arg("n"), py::arg("c"), py::arg("seed") = 0);
  m.def("geometric", [](std::size_t n, double c, std::uint64_t seed) {
    return std::make_shared<Graph>(generate_geometric(n, c, seed));
  }, py::arg("n"), py::arg("c"), py::arg("seed") = 0);
  m.def("pm_j_cubic", [](std::size_t L, std::uint64_t seed) {
    return std::make_shared<SpinGlass>(generate_pm_j_cubic(L, seed));
  }, py::arg("L"), py::arg("seed") = 0);
  m.def("parse_instance", [](const std::string& text) -> py::object {
    Instance inst = parse_instance(std::string_view(text));
    if (auto* g = std::get_if<Graph>(&inst)) return py::cast(std::make_shared<Graph>(std::move(*g)));
    return py::cast(std::make_shared<SpinGlass>(std::get<SpinGlass>(std::move(inst))));
  }, py::arg("text"));

  // Problems
  py::class_<ProblemAdapter>(m, "Problem")
      .def_property_readonly("size", &ProblemAdapter::size)
      .def("cost", [](const ProblemAdapter& a, const std::vector<int>& s) { return a.cost(to_states(s)); })
      .def("canonical", [](const ProblemAdapter& a, const std::vector<int>& s) {
        return to_ints(a.canonical(to_states(s)));
      });
  py::class_<BipartitionProblem, ProblemAdapter>(m, "Bipartition")
      .def(py::init([](std::shared_ptr<Graph> g, const std::string& partner) {
             if (partner != "ranked" && partner != "uniform") throw std::invalid_argument("partner: ranked | uniform");
             return std::make_unique<BipartitionProblem>(
                 g, partner == "ranked" ? BipartitionProblem::Partner::ranked : BipartitionProblem::Partner::uniform);
           }),
           py::arg("graph"), py::arg("partner") = "ranked");
  py::class_<ColoringProblem, ProblemAdapter>(m, "Coloring")
      .def(py::init([](std::shared_ptr<Graph> g, int colors) { return std::make_unique<ColoringProblem>(g, colors); }),
           py::arg("graph"), py::arg("colors") = 3);
  py::class_<SpinGlassProblem, ProblemAdapter>(m, "SpinGlassProblem")
      .def(py::init([](std::shared_ptr<SpinGlass> s) { return std::make_unique<SpinGlassProblem>(s); }),
           py::arg("instance"));

  // Search
  m.def("run_eo", [](const ProblemAdapter& a, double tau, std::uint64_t steps, std::uint32_t restarts,
                     std::uint64_t seed, bool greedy) {
    RunOptions options;
    options.max_steps = steps;
    options.restarts = restarts;
    const TauPolicy policy = greedy ? TauPolicy::greedy(a.size(), seed) : TauPolicy(tau, a.size(), seed);
    py::gil_scoped_release release;
    RunTrace t = run(a, policy, options);
    py::gil_scoped_acquire acquire;
    return trace_dict(t);
  }, py::arg("problem"), py::arg("tau") = 1.4, py::arg("steps") = 10000, py::arg("restarts") = 1,
     py::arg("seed") = 0, py::arg("greedy") = false);

  m.def("run_sa", [](const ProblemAdapter& a, std::uint64_t trials, std::uint64_t seed) {
    SaSchedule schedule;
    schedule.max_trials = trials;
    schedule.fit_cooling_to_budget = true;
    SaResult r;
    {
      py::gil_scoped_release release;
      r = sa_run(a, schedule, seed);
    }
    py::dict d = trace_dict(r.trace);
    d["initial_temperature"] = r.initial_temperature;
    d["cooling"] = r.cooling;
    d["accepted"] = r.accepted;
    d["trials"] = r.trials;
    return d;
  }, py::arg("problem"), py::arg("trials"), py::arg("seed") = 0);

  m.def("brute_force", [](const ProblemAdapter& a, std::uint64_t limit) {
    const BruteForceResult r = brute_force(a, limit);
    std::vector<std::vector<int>> optima;
    for (const auto& s : r.optima) optima.push_back(to_ints(s));
    return py::make_tuple(r.optimal_cost, optima);
  }, py::arg("problem"), py::arg("limit") = 1ULL << 24);

  m.def("ground_states", [](const ProblemAdapter& a, double tau, std::size_t runs, std::uint64_t steps,
                            std::uint64_t seed) {
    EnumerationBudget budget;
    budget.runs = runs;
    budget.steps_per_run = steps;
    const GroundStateSet gs = enumerate_ground_states(a, TauPolicy(tau, a.size(), seed), budget);
    std::vector<std::vector<int>> states;
    for (const auto& s : gs.states) states.push_back(to_ints(s));
    py::dict d;
    d["optimal_cost"] = gs.optimal_cost;
    d["states"] = states;
    d["saturated"] = gs.saturated;
    d["backbone"] = backbone_fraction(gs);
    return d;
  }, py::arg("problem"), py::arg("tau") = 1.4, py::arg("runs") = 20, py::arg("steps") = 10000, py::arg("seed") = 0);

  // Analysis
  m.def("fit_convergence", [](const std::vector<double>& t, const std::vector<double>& c) {
    const ConvergenceFit f = fit_convergence(t, c);
    py::dict d;
    d["c_inf"] = f.c_inf;
    d["amplitude"] = f.amplitude;
    d["exponent"] = f.exponent;
    d["residual"] = f.residual;
    return d;
  }, py::arg("times"), py::arg("costs"));

  m.def("scaling_collapse", [](const std::vector<std::tuple<std::size_t, double, double>>& rows) {
    std::vector<ScalingPoint> data;
    for (auto [n, c, cost] : rows) data.push_back({n, c, cost, 0.0});
    const ScalingFit f = scaling_collapse(data);
    py::dict d;
    d["c_crit"] = f.c_crit;
    d["nu"] = f.nu;
    d["residual"] = f.collapse_residual;
    return d;
  }, py::arg("rows"), "rows of (n, c, mean_cost)");

  // Models
  py::class_<BsChain>(m, "BsChain")
      .def(py::init<std::size_t, std::uint64_t>(), py::arg("n"), py::arg("seed") = 0)
      .def("step", &BsChain::step)
      .def("run", [](BsChain& b, std::uint64_t steps) {
        for (std::uint64_t i = 0; i < steps; ++i) b.step();
      })
      .def_property_readonly("fitness", [](const BsChain& b) {
        return std::vector<double>(b.fitness().begin(), b.fitness().end());
      })
      .def_property_readonly("steps", &BsChain::steps);

  m.def("jam_tau_sweep", [](std::size_t n, const std::vector<double>& taus, const std::string& kernel,
                            std::uint64_t updates) {
    JamOptions options;
    options.updates = updates;
    std::vector<std::pair<double, double>> out;
    for (const auto& p : jam_tau_sweep(n, taus, kernel_by_name(kernel), options)) out.emplace_back(p.tau, p.mean_cost);
    return out;
  }, py::arg("n"), py::arg("taus"), py::arg("kernel") = "barrier", py::arg("updates") = 0);

  m.def("jam_selection_probabilities", [](std::array<double, 3> rho, std::size_t n, double tau) {
    JamState s;
    s.rho = rho;
    s.n = n;
    s.tau = tau;
    return jam_selection_probabilities(s);
  }, py::arg("rho"), py::arg("n"), py::arg("tau"));

  m.def("predict_tau_opt", &predict_tau_opt, py::arg("n"), py::arg("amplitude"));
}
