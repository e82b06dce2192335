#include "qkahler/drivers.hpp"
#include "qkahler/hodge.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;

namespace {

qk::RunConfig make_config(const std::string& q, const std::string& lmax,
                          int bundle_lo, int bundle_hi, const std::string& mode,
                          const std::string& tol, const std::string& normalization,
                          std::uint64_t seed) {
  qk::RunConfig cfg;
  cfg.q = q;
  cfg.lmax = lmax;
  cfg.bundle_lo = bundle_lo;
  cfg.bundle_hi = bundle_hi;
  cfg.mode = mode == "approx" ? qk::Mode::Approx : qk::Mode::Exact;
  cfg.tol = tol;
  cfg.normalization = normalization == "unitary" ? qk::Normalization::Unitary
                                                 : qk::Normalization::Triangular;
  cfg.seed = seed;
  return cfg;
}

std::string run(const std::string& command, const std::string& q,
                const std::string& lmax, int bundle_lo, int bundle_hi,
                const std::string& mode, const std::string& tol,
                const std::string& normalization, std::uint64_t seed) {
  qk::RunConfig cfg = make_config(q, lmax, bundle_lo, bundle_hi, mode, tol,
                                  normalization, seed);
  qk::Report rep;
  if (command == "verify")
    rep = qk::run_verify(cfg);
  else if (command == "cohomology")
    rep = qk::run_cohomology(cfg);
  else if (command == "serre")
    rep = qk::run_serre(cfg);
  else
    throw qk::Error(qk::ErrorKind::ConfigError, "unknown command " + command);
  return rep.to_json_string();
}

std::vector<std::vector<std::size_t>> cohomology_table(const std::string& q,
                                                       const std::string& lmax,
                                                       int bundle_lo,
                                                       int bundle_hi) {
  qk::RunConfig cfg = make_config(q, lmax, bundle_lo, bundle_hi, "exact", "",
                                  "triangular", 1);
  cfg.validate();
  qk::Model<qk::Rational> model(
      qk::FieldOps<qk::Rational>::from_rational(qk::parse_rational(q)),
      cfg.twolmax());
  std::vector<std::vector<std::size_t>> rows;
  for (int k = bundle_lo; k <= bundle_hi; ++k) {
    auto b = qk::make_bundle(model, k);
    auto row = qk::cohomology_row(b, lmax);
    rows.push_back({row.h00, row.h10, row.h01, row.h11});
  }
  return rows;
}

std::string q_integer_str(const std::string& q, int m) {
  qk::Rational qv = qk::parse_rational(q);
  return qk::FieldOps<qk::Rational>::str(qk::q_integer(qv, m));
}

}  // namespace

PYBIND11_MODULE(_qkahler, m) {
  m.doc() = "exact Hodge/Kodaira verification on the q-deformed projective line";

  py::register_exception<qk::Error>(m, "QkError", PyExc_ValueError);

  m.def("run", &run, py::arg("command"), py::arg("q") = "4/5",
        py::arg("lmax") = "3", py::arg("bundle_lo") = -5,
        py::arg("bundle_hi") = 5, py::arg("mode") = "exact",
        py::arg("tol") = "", py::arg("normalization") = "triangular",
        py::arg("seed") = 1,
        "run a verification command and return the JSON report as a string");

  m.def("cohomology_table", &cohomology_table, py::arg("q") = "4/5",
        py::arg("lmax") = "3", py::arg("bundle_lo") = -5,
        py::arg("bundle_hi") = 5,
        "rows [h00, h10, h01, h11] for each bundle in range");

  m.def("q_integer", &q_integer_str, py::arg("q"), py::arg("m"),
        "the symmetric q-integer [m]_q as an exact rational string");

  m.attr("__version__") = qk::kToolkitVersion;
}
