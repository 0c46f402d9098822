#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "sparsecut/driver.hpp"
#include "sparsecut/global.hpp"
#include "sparsecut/instance.hpp"
#include "sparsecut/relaxation.hpp"

namespace py = pybind11;
using namespace sparsecut;

namespace {

double solve_value(const ConicProblem& p) {
  const auto r = solve_conic(p);
  if (!r.optimal()) throw Error(ErrorKind::Numerical, std::string("relaxation: ") + to_string(r.status));
  return r.objective;
}

py::dict trace_dict(const Trace& t) {
  py::list iters;
  for (const auto& r : t.iterations) {
    py::dict d;
    d["iter"] = r.iter;
    d["z_lp"] = r.z_lp;
    d["gc"] = r.gc;
    d["cuts"] = r.num_cuts;
    d["columns"] = r.lp_columns;
    d["fallback"] = r.fallback;
    iters.append(d);
  }
  py::dict d;
  d["instance"] = t.instance;
  d["strategy"] = short_name(t.strategy.kind);
  d["status"] = t.status;
  d["z_lp"] = t.z_lp;
  d["z_mcc"] = t.z_mcc;
  d["z_ref"] = t.z_ref;
  d["gc"] = t.final_gc;
  d["columns"] = t.lp_columns;
  d["cuts"] = t.cuts.size();
  d["fallbacks"] = t.fallbacks;
  d["iterations"] = iters;
  return d;
}

py::dict global_dict(const GlobalResult& r) {
  py::dict d;
  d["status"] = r.status;
  d["z_best"] = r.z_best;
  d["x_best"] = r.x_best;
  d["bound"] = r.bound;
  d["root_bound"] = r.root_bound;
  d["gap"] = r.gap;
  d["nodes"] = r.nodes;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Sparse PSD/DNN cutting planes for box-constrained QCQPs";

  py::register_exception<Error>(m, "SparsecutError", PyExc_ValueError);

  py::class_<QcqpInstance>(m, "Instance")
      .def_property_readonly("name", &QcqpInstance::name)
      .def_property_readonly("n", &QcqpInstance::n)
      .def_property_readonly("m", &QcqpInstance::m)
      .def_property_readonly("lower", &QcqpInstance::lower)
      .def_property_readonly("upper", &QcqpInstance::upper)
      .def_property_readonly("nonneg", &QcqpInstance::nonneg)
      .def("objective_value", &QcqpInstance::objective_value)
      .def("max_violation", &QcqpInstance::max_violation)
      .def("to_json", [](const QcqpInstance& i) { return to_json(i); })
      .def_static("from_json", [](const std::string& s) { return read_json(s); })
      .def_static("load", [](const std::string& path) { return load_instance(path); })
      .def("support_size", [](const QcqpInstance& i) { return build_support_set(i)->size(); })
      .def("__repr__", [](const QcqpInstance& i) { return "<Instance " + i.name() + ">"; });

  m.def(
      "generate",
      [](int n, double rho, int qc, std::uint64_t seed, double qc_support) {
        GeneratorConfig cfg{.n = n, .rho = rho, .num_qc = qc, .seed = seed, .constraint_support_fraction = qc_support};
        cfg.validate();
        return generate_boxqcqp(cfg);
      },
      py::arg("n"), py::arg("rho"), py::arg("qc") = 0, py::arg("seed") = 1, py::arg("qc_support") = 1.0);

  m.def(
      "sdp_bound",
      [](const QcqpInstance& inst, const std::string& mccormick, bool dnn) {
        return solve_value(build_shor_sdp(inst, {.mccormick = parse_mccormick_mode(mccormick), .dnn = dnn}));
      },
      py::arg("instance"), py::arg("mccormick") = "E", py::arg("dnn") = false);

  m.def(
      "mccormick_bound", [](const QcqpInstance& inst) { return solve_value(build_e_lp(inst, {}, McCormickMode::E)); },
      py::arg("instance"));

  m.def(
      "sdp_data",
      [](const QcqpInstance& inst, const std::string& mccormick, bool dnn) {
        const auto sf = to_standard_form(build_shor_sdp(inst, {.mccormick = parse_mccormick_mode(mccormick), .dnn = dnn}));
        py::dict d;
        d["c"] = sf.c;
        d["offset"] = sf.offset;
        d["A"] = sf.A;
        d["b"] = sf.b;
        d["G"] = sf.G_lin;
        d["h"] = sf.h_lin;
        d["psd_dims"] = sf.psd_dims;
        d["G_psd"] = sf.G_psd;
        d["h_psd"] = sf.h_psd;
        return d;
      },
      py::arg("instance"), py::arg("mccormick") = "E", py::arg("dnn") = false,
      "Standard form min c'y + offset s.t. A y = b, G y <= h, mat(h_k - G_k y) psd (column-major).");

  m.def(
      "cut_loop",
      [](const QcqpInstance& inst, const std::string& strategy, const std::string& cone, double time_limit, int max_iters,
         double gc_target, double alpha) {
        const Strategy s{parse_strategy(strategy), parse_cone_mode(cone), alpha};
        Trace t;
        {
          py::gil_scoped_release release;
          t = run_cutting_plane(inst, s, {time_limit, max_iters, gc_target});
        }
        return trace_dict(t);
      },
      py::arg("instance"), py::arg("strategy") = "sparse", py::arg("cone") = "auto", py::arg("time_limit") = 60.0,
      py::arg("max_iters") = 1000, py::arg("gc_target") = 0.99, py::arg("alpha") = 0.001);

  m.def(
      "solve_global",
      [](const QcqpInstance& inst, bool with_cuts, double eps_rel, long node_limit, double time_limit) {
        std::vector<Cut> cuts;
        GlobalResult r;
        {
          py::gil_scoped_release release;
          if (with_cuts) cuts = run_cutting_plane(inst, {StrategyKind::SparseCuts, ConeMode::Auto}).cuts;
          r = solve_global(inst, cuts, {eps_rel, node_limit, time_limit, nullptr});
        }
        return global_dict(r);
      },
      py::arg("instance"), py::arg("with_cuts") = false, py::arg("eps_rel") = 1e-4, py::arg("node_limit") = 100000,
      py::arg("time_limit") = 600.0);

  m.def(
      "grid_search",
      [](const QcqpInstance& inst, int resolution) {
        const auto g = brute_force_grid(inst, resolution);
        py::dict d;
        d["found"] = g.found;
        d["z"] = g.z;
        d["x"] = g.x;
        return d;
      },
      py::arg("instance"), py::arg("resolution") = 11);
}
