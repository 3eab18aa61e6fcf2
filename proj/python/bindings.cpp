#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "smmd/estimators.hpp"
#include "smmd/experiments.hpp"
#include "smmd/monitoring.hpp"
#include "smmd/normalization.hpp"
#include "smmd/testing.hpp"

namespace py = pybind11;
using namespace pybind11::literals;

namespace {

smmd::Sample to_sample(const smmd::Matrix& m) { return smmd::Sample(m); }

smmd::KernelSpec rbf(double gamma) { return smmd::KernelSpec(smmd::KernelFamily::RBF, gamma); }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Closed-form MMD against the standard normal";

  py::register_exception<smmd::NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

  m.def("mmd_u_closed", [](const smmd::Matrix& z, double gamma) { return smmd::mmd_u_closed(to_sample(z), gamma); },
        "sample"_a, "gamma"_a, "Unbiased closed-form MMD^2 between N_d and the rows of `sample`.");
  m.def("mmd_b_closed", [](const smmd::Matrix& z, double gamma) { return smmd::mmd_b_closed(to_sample(z), gamma); },
        "sample"_a, "gamma"_a);
  m.def("smmd", [](const smmd::Matrix& z, double gamma) { return smmd::smmd(to_sample(z), gamma); }, "sample"_a,
        "gamma"_a, "MMD_u^2 divided by its null standard deviation.");
  m.def("null_variance", &smmd::null_variance, "gamma"_a, "d"_a, "n"_a);
  m.def("hz_gamma", &smmd::hz_gamma, "d"_a, "n"_a);
  m.def("scale_to_gamma", &smmd::scale_to_gamma, "scale"_a, "d"_a);
  m.def(
      "mmd_u_random",
      [](const smmd::Matrix& means, const smmd::Matrix& sds, double gamma) {
        return smmd::mmd_u_random(smmd::RandomCodes(means, sds), gamma);
      },
      "means"_a, "sds"_a, "gamma"_a);
  m.def(
      "mmd_u_empirical",
      [](const smmd::Matrix& q, const smmd::Matrix& p, double gamma, const std::string& kernel) {
        return smmd::mmd_u_empirical(to_sample(q), to_sample(p),
                                     smmd::KernelSpec(smmd::kernel_family_from_string(kernel), gamma));
      },
      "sample_q"_a, "sample_p"_a, "gamma"_a, "kernel"_a = "rbf");
  m.def(
      "outlier_delta",
      [](const smmd::Matrix& z, std::size_t index, const smmd::Vector& replacement, double gamma) {
        return smmd::outlier_delta(to_sample(z), index, replacement, gamma);
      },
      "sample"_a, "index"_a, "replacement"_a, "gamma"_a);
  m.def(
      "optimal_translation",
      [](const smmd::Matrix& z, double gamma) { return smmd::optimal_translation(to_sample(z), gamma); }, "sample"_a,
      "gamma"_a);

  m.def("code_normalize", [](const smmd::Matrix& z) { return smmd::code_normalize(to_sample(z)).data(); },
        "sample"_a);
  m.def("center_whiten", [](const smmd::Matrix& z) { return smmd::center_whiten(to_sample(z)).data(); }, "sample"_a);
  m.def(
      "code_normalize_random",
      [](const smmd::Matrix& means, const smmd::Matrix& sds) {
        const auto out = smmd::code_normalize_random(smmd::RandomCodes(means, sds));
        return py::make_tuple(out.means(), out.sds());
      },
      "means"_a, "sds"_a);

  py::class_<smmd::NullDistribution>(m, "NullDistribution")
      .def_property_readonly("values", &smmd::NullDistribution::values)
      .def_property_readonly("d", [](const smmd::NullDistribution& n) { return n.spec().d; })
      .def_property_readonly("n", [](const smmd::NullDistribution& n) { return n.spec().n; })
      .def_property_readonly("gamma", [](const smmd::NullDistribution& n) { return n.spec().kernel.gamma(); })
      .def_property_readonly("sample_type",
                             [](const smmd::NullDistribution& n) { return smmd::to_string(n.spec().sample_type); })
      .def_property_readonly("replicates", [](const smmd::NullDistribution& n) { return n.spec().replicates; })
      .def("threshold", &smmd::NullDistribution::threshold, "alpha"_a);

  m.def(
      "simulate_null",
      [](std::size_t d, std::size_t n, double gamma, const std::string& sample_type, std::size_t replicates,
         std::uint64_t seed) {
        smmd::NullSpec spec;
        spec.d = d;
        spec.n = n;
        spec.kernel = rbf(gamma);
        spec.sample_type = smmd::sample_type_from_string(sample_type);
        spec.replicates = replicates;
        spec.seed = seed;
        py::gil_scoped_release release;
        return smmd::simulate_null(spec);
      },
      "d"_a, "n"_a, "gamma"_a, "sample_type"_a = "original", "replicates"_a = 10000, "seed"_a);
  m.def(
      "test_normality",
      [](const smmd::Matrix& z, double gamma, const std::string& hypothesis, double alpha,
         const smmd::NullDistribution& null) {
        const auto r = smmd::test_normality(to_sample(z), rbf(gamma), smmd::composite_from_string(hypothesis), alpha,
                                            null);
        return py::dict("statistic"_a = r.statistic, "threshold"_a = r.threshold, "reject"_a = r.reject);
      },
      "sample"_a, "gamma"_a, "hypothesis"_a, "alpha"_a, "null"_a);

  m.def("b_interval", &smmd::b_interval, "m"_a);
  m.def("e_interval", &smmd::e_interval, "alpha"_a);
  m.def(
      "effect_size",
      [](const std::vector<double>& a, const std::vector<double>& b) { return smmd::effect_size(a, b); }, "group1"_a,
      "group2"_a);
  m.def(
      "tau",
      [](const std::string& method, const std::string& alternative, std::size_t d, std::size_t n,
         const std::string& scale, std::size_t replicates, std::uint64_t seed) {
        smmd::AlternativeSpec alt;
        if (alternative == "uniform") {
          alt = smmd::AlternativeSpec::uniform_cube(d, n);
        } else if (alternative == "normal") {
          alt = smmd::AlternativeSpec::standard_normal(d, n);
        } else {
          throw py::value_error("alternative must be 'uniform' or 'normal'");
        }
        smmd::TauResult r;
        {
          py::gil_scoped_release release;
          r = smmd::tau(smmd::method_from_string(method), alt, smmd::Scale::parse(scale), replicates, seed);
        }
        return py::dict("tau"_a = r.tau, "gamma"_a = r.gamma, "mean1"_a = r.mean1, "sd1"_a = r.sd1,
                        "mean2"_a = r.mean2, "sd2"_a = r.sd2);
      },
      "method"_a, "alternative"_a, "d"_a, "n"_a, "scale"_a, "replicates"_a = 200, "seed"_a);

  py::class_<smmd::BMonitor>(m, "BMonitor")
      .def(py::init<>())
      .def("update", [](smmd::BMonitor& self, double v) { self = smmd::b_update(self, v); }, "smmd_value"_a)
      .def_property_readonly("count", &smmd::BMonitor::count)
      .def_property_readonly("statistic", &smmd::BMonitor::statistic)
      .def_property_readonly("interval", &smmd::BMonitor::interval)
      .def_property_readonly("flag", [](const smmd::BMonitor& self) { return smmd::to_string(self.flag()); });

  py::class_<smmd::EMonitor>(m, "EMonitor")
      .def(py::init<double>(), "alpha"_a)
      .def("update", [](smmd::EMonitor& self, double v) { self = smmd::e_update(self, v); }, "smmd_value"_a)
      .def_property_readonly("count", &smmd::EMonitor::count)
      .def_property_readonly("statistic", &smmd::EMonitor::statistic)
      .def_property_readonly("interval", &smmd::EMonitor::interval)
      .def_property_readonly("flag", [](const smmd::EMonitor& self) { return smmd::to_string(self.flag()); });
}
