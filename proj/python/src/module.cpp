#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "hillwalsh/discriminant.hpp"
#include "hillwalsh/error.hpp"
#include "hillwalsh/oracles.hpp"
#include "hillwalsh/stability.hpp"
#include "hillwalsh/walsh.hpp"

namespace py = pybind11;
using namespace hillwalsh;

namespace {

const double kTwoPi = 6.283185307179586;

HillProblem problem(double alpha, double beta, const std::string& excitation, double tau) {
    HillProblem p{alpha, beta, tau, parse_excitation(excitation)};
    p.validate();
    return p;
}

py::array_t<double> as_grid(const std::vector<double>& v, long rows, long cols) {
    py::array_t<double> out({rows, cols});
    std::copy(v.begin(), v.end(), out.mutable_data());
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Hill equation discriminant via the Walsh-function recursion";

    static py::exception<Error> base(m, "HillwalshError");
    static py::exception<SingularityError> singular(m, "SingularityError", base.ptr());
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const SingularityError& e) {
            py::set_error(singular, e.what());
        } catch (const DomainError& e) {
            py::set_error(PyExc_ValueError, e.what());
        } catch (const SizeError& e) {
            py::set_error(PyExc_ValueError, e.what());
        } catch (const Error& e) {
            py::set_error(base, e.what());
        }
    });

    m.def(
        "delta",
        [](double alpha, double beta, const std::string& excitation, double tau, int k, const std::string& method,
           long steps) {
            const auto p = problem(alpha, beta, excitation, tau);
            if (method == "recursive") return discriminant_recursive(p, k).delta;
            if (method == "triangular") return discriminant_triangular(p, k).delta;
            if (method == "direct") return discriminant_direct(p, k).delta;
            if (method == "monodromy") return monodromy(p, steps).trace;
            if (method == "lyapunov") return lyapunov_terms(p, 3).delta();
            throw DomainError("unknown method '" + method + "'");
        },
        py::arg("alpha"), py::arg("beta"), py::arg("excitation") = "cos", py::arg("tau") = kTwoPi,
        py::arg("k") = 12, py::arg("method") = "recursive", py::arg("steps") = 16384);

    m.def(
        "monodromy_matrix",
        [](double alpha, double beta, const std::string& excitation, double tau, long steps) {
            return Eigen::Matrix2d(monodromy(problem(alpha, beta, excitation, tau), steps).m);
        },
        py::arg("alpha"), py::arg("beta"), py::arg("excitation") = "cos", py::arg("tau") = kTwoPi,
        py::arg("steps") = 16384);

    m.def(
        "singularity_index",
        [](double alpha, double beta, const std::string& excitation, double tau, int k) {
            return singularity_guard(problem(alpha, beta, excitation, tau), k);
        },
        py::arg("alpha"), py::arg("beta"), py::arg("excitation") = "cos", py::arg("tau") = kTwoPi,
        py::arg("k") = 12);

    m.def(
        "classify", [](double delta, double tol) { return std::string(class_name(classify(delta, tol))); },
        py::arg("delta"), py::arg("tol") = kDefaultClassifyTol);

    m.def(
        "grid",
        [](std::tuple<double, double, long> alpha, std::tuple<double, double, long> beta, const std::string& excitation,
           double tau, int k, const std::string& method, unsigned workers) {
            ScanOptions opt;
            opt.k = k;
            opt.workers = workers;
            if (method == "monodromy") opt.method = Method::Monodromy;
            else if (method != "recursive") throw DomainError("grid accepts method recursive or monodromy");
            const Axis a{std::get<0>(alpha), std::get<1>(alpha), std::get<2>(alpha)};
            const Axis b{std::get<0>(beta), std::get<1>(beta), std::get<2>(beta)};
            StabilityGrid g;
            {
                py::gil_scoped_release release;
                g = grid_scan(parse_excitation(excitation), tau, a, b, opt);
            }
            std::vector<double> cls(g.classes.size());
            for (std::size_t i = 0; i < cls.size(); ++i) cls[i] = static_cast<double>(g.classes[i]);
            py::dict out;
            out["deltas"] = as_grid(g.deltas, b.count, a.count);
            out["classes"] = as_grid(cls, b.count, a.count).attr("astype")("int8");
            out["singular_count"] = g.singular_count;
            return out;
        },
        py::arg("alpha"), py::arg("beta"), py::arg("excitation") = "cos", py::arg("tau") = kTwoPi,
        py::arg("k") = 12, py::arg("method") = "recursive", py::arg("workers") = 1);

    m.def(
        "interlacing",
        [](double beta, std::pair<double, double> alpha_range, const std::string& excitation, double tau, int k) {
            const auto r = interlacing_scan(parse_excitation(excitation), tau, beta, alpha_range, k);
            py::dict out;
            out["lambdas"] = r.lambdas;
            out["lambda_primes"] = r.lambda_primes;
            out["ordering_ok"] = r.ordering_ok;
            out["coincident"] = r.coincident;
            return out;
        },
        py::arg("beta"), py::arg("alpha_range"), py::arg("excitation") = "cos", py::arg("tau") = kTwoPi,
        py::arg("k") = 12);

    m.def("walsh_matrix", [](int k) { return Eigen::MatrixXd(walsh::walsh_matrix(k).cast<double>()); },
          py::arg("k"));
    m.def("integration_operator", &walsh::integration_operator, py::arg("k"));
    m.def("samples", [](const std::string& excitation, int k) { return sample_p(parse_excitation(excitation), k); },
          py::arg("excitation"), py::arg("k"));
}
