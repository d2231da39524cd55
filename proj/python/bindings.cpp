#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "cli.hpp"
#include "wiretap/amplifier.hpp"
#include "wiretap/bounds.hpp"
#include "wiretap/report.hpp"

namespace py = pybind11;
using namespace wiretap;

namespace {

Pmf pmf_of(const std::vector<std::string>& masses) {
  Pmf p;
  for (const auto& m : masses) p.push_back(parse_rational(m));
  check_pmf(p);
  return p;
}

// Library exceptions surface as ValueError with the same message the CLI prints.
template <class F>
auto guarded(F&& f) {
  try {
    return f();
  } catch (const CapExceeded& e) {
    throw py::value_error(std::string("cap exceeded: ") + e.what());
  } catch (const std::runtime_error& e) {
    throw py::value_error(e.what());
  }
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "wiretap network capacity toolkit";
  m.attr("__version__") = WIRETAP_VERSION;

  m.def("run_cli", [](const std::vector<std::string>& args) {
    std::ostringstream out, err;
    int code;
    {
      py::gil_scoped_release release;
      code = run_cli(args, out, err);
    }
    return py::make_tuple(code, out.str(), err.str());
  }, py::arg("args"), "Run the command-line tool in process; returns (exit_code, stdout, stderr).");

  m.def("outer_bound", [](const std::string& network, const std::string& mode, const std::vector<std::string>& weights) {
    return guarded([&] {
      Network net = parse_network(network);
      BoundQuery q;
      q.mode = mode == "asymptotic" ? BoundMode::Asymptotic : BoundMode::ZeroError;
      if (mode != "zero" && mode != "asymptotic") throw ParseError("mode must be zero or asymptotic");
      for (const auto& w : weights) q.weights.push_back(parse_rational(w));
      OuterBound ob;
      {
        py::gil_scoped_release release;
        ob = outer_bound(net, q);
      }
      return outer_bound_json(net, ob, true).dump();
    });
  }, py::arg("network"), py::arg("mode") = "zero", py::arg("weights") = std::vector<std::string>{},
     "Outer bound for a network given as JSON text; returns the report fragment as JSON text.");

  m.def("elemental_count", [](int n) { return guarded([&] { return elemental_inequalities(n).rows.size(); }); },
        py::arg("n"));

  m.def("min_entropy", [](const std::vector<std::string>& masses) {
    return guarded([&] {
      auto h = min_entropy(pmf_of(masses));
      return py::make_tuple(static_cast<double>(h.bits), h.exact ? py::object(py::str(to_string(*h.exact))) : py::object(py::none()));
    });
  }, py::arg("masses"), "Min-entropy in bits; the second item is the exact value when it is rational.");

  m.def("total_variation", [](const std::vector<std::string>& p, const std::vector<std::string>& q) {
    return guarded([&] { return to_string(total_variation(pmf_of(p), pmf_of(q))); });
  }, py::arg("p"), py::arg("q"));

  m.def("extract", [](int n1, int n3, std::uint64_t t, std::uint64_t v, const std::string& layout) {
    return guarded([&] {
      HashLayout h = layout == "toeplitz" ? HashLayout::Toeplitz : HashLayout::IdentityToeplitz;
      if (layout != "toeplitz" && layout != "identity") throw ParseError("layout must be toeplitz or identity");
      auto ex = make_extractor_with_length(n1, n3, h);
      if (n1 > 64 || ex.n2 > 64) throw CapExceeded("uint extractor path needs n1, n2 <= 64");
      return extract(ex, t, v);
    });
  }, py::arg("n1"), py::arg("n3"), py::arg("t"), py::arg("v"), py::arg("layout") = "toeplitz");

  m.def("extractor_length", [](int n1, const std::string& delta, const std::string& eps, int c) {
    return guarded([&] { return extractor_output_length(n1, parse_rational(delta), parse_rational(eps), c); });
  }, py::arg("n1"), py::arg("delta"), py::arg("eps"), py::arg("c") = 0);
}
