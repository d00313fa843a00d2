#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "hgtree/csbp.hpp"
#include "hgtree/gh.hpp"
#include "hgtree/gw_sim.hpp"
#include "hgtree/reduction.hpp"
#include "hgtree/tree_io.hpp"
#include "hgtree/verify.hpp"

namespace py = pybind11;
using namespace hgt;

PYBIND11_MODULE(_core, m) {
    m.doc() = "trees with edge lengths, erasure, GW laws, CSBP numerics";

    py::register_exception<TreeError>(m, "TreeError", PyExc_ValueError);
    py::register_exception<LawError>(m, "LawError", PyExc_ValueError);
    py::register_exception<CsbpError>(m, "CsbpError", PyExc_ValueError);
    py::register_exception<SamplerError>(m, "SamplerError", PyExc_RuntimeError);

    py::class_<EdgeTree>(m, "EdgeTree")
        .def(py::init<>())
        .def_static("path", &EdgeTree::path, py::arg("length"))
        .def_static("from_parents", &EdgeTree::from_parents, py::arg("parents"), py::arg("stems"))
        .def_static("from_json", &tree_from_json)
        .def_static("from_newick", &tree_from_newick)
        .def("to_json", [](const EdgeTree& t) { return to_json(t); })
        .def("to_newick", [](const EdgeTree& t) { return to_newick(t); })
        .def_property_readonly("size", &EdgeTree::size)
        .def_property_readonly("parents", &EdgeTree::parents)
        .def_property_readonly("stems", &EdgeTree::stems)
        .def_property_readonly("height", [](const EdgeTree& t) { return total_height(t); })
        .def_property_readonly("length", [](const EdgeTree& t) { return total_length(t); })
        .def_property_readonly("leaves", [](const EdgeTree& t) { return leaf_count(t); })
        .def("__eq__", [](const EdgeTree& a, const EdgeTree& b) { return a == b; })
        .def("__repr__", [](const EdgeTree& t) { return "EdgeTree(" + to_newick(t) + ")"; });

    m.def("canonicalize", [](const EdgeTree& t) { return hgt::canonicalize(t); });
    m.def("iso_equal", &iso_equal, py::arg("a"), py::arg("b"), py::arg("tol") = 0.0);
    m.def("leaf_erase", &leaf_erase, py::arg("h"), py::arg("tree"));
    m.def("reduce", [](const std::string& predicate, const EdgeTree& t) { return reduce(predicate_from_json(predicate), t); },
          py::arg("predicate_json"), py::arg("tree"));
    m.def("erased_profile", &erased_profile, py::arg("h"), py::arg("a"), py::arg("tree"));
    m.def("right_profile", &right_profile, py::arg("a"), py::arg("tree"));
    m.def("covering_number", &covering_number, py::arg("h"), py::arg("r"), py::arg("tree"));
    m.def("gh_bounds", [](const EdgeTree& a, const EdgeTree& b) { return std::make_pair(gh_lower(a, b), gh_upper(a, b).bound); });

    py::class_<OffspringLaw>(m, "OffspringLaw")
        .def_static("from_pmf", &OffspringLaw::from_pmf)
        .def_static("from_json", &offspring_from_json)
        .def_static("stable", &stable_offspring, py::arg("gamma"))
        .def("prob", &OffspringLaw::prob)
        .def("pgf", &OffspringLaw::pgf)
        .def("mean", &OffspringLaw::mean)
        .def("fixed_point", [](const OffspringLaw& x) { return smallest_fixed_point(x); });

    py::class_<GwLaw>(m, "GwLaw")
        .def_static("from_json", &gw_law_from_json)
        .def_readonly("xi", &GwLaw::xi)
        .def_readonly("c", &GwLaw::c)
        .def("mu_prob", [](const GwLaw& l, int k) { return l.mu.prob(k); })
        .def("to_json", [](const GwLaw& l, int kmax) { return to_json(l, kmax); }, py::arg("kmax") = 30)
        .def("reduce", [](const GwLaw& l, double a) { return reduce_law(l, a); })
        .def("invert", [](const GwLaw& l, double a) { return invert_law(l, a); });
    m.def("compose_alphas", &compose_alphas);
    m.def("height_cdf", &height_cdf, py::arg("xi"), py::arg("c"), py::arg("a"));

    py::class_<CsbpKernel>(m, "CsbpKernel")
        .def(py::init([](const std::string& psi) { return CsbpKernel(mechanism_from_json(psi)); }), py::arg("psi_json"))
        .def("psi", &CsbpKernel::psi)
        .def_property_readonly("q", &CsbpKernel::q)
        .def("u", [](const CsbpKernel& k, double a, double th) { return u_flow(k, a, th); }, py::arg("a"), py::arg("theta"))
        .def("v", [](const CsbpKernel& k, double h) { return v_scale(k, h); }, py::arg("h"));

    m.def(
        "sample_forest",
        [](const std::string& law, std::uint64_t seed, std::optional<double> height_cap, std::int64_t vertex_cap) {
            SamplerConfig c;
            c.seed = seed;
            c.height_cap = height_cap;
            c.vertex_cap = vertex_cap;
            Sample s;
            {
                py::gil_scoped_release nogil;
                s = sample_gw_forest(gw_law_from_json(law), c);
            }
            return std::make_pair(s.tree, s.truncated);
        },
        py::arg("law_json"), py::arg("seed") = 0, py::arg("height_cap") = py::none(), py::arg("vertex_cap") = 10'000'000);
    m.def("replica_seed", &replica_seed);

    m.def("suite_names", &suite_names);
    m.def(
        "run_suite",
        [](const std::string& name, std::uint64_t seed, int workers) {
            VerifyOptions o;
            o.workers = workers;
            std::vector<std::string> out;
            py::gil_scoped_release nogil;
            for (const auto& r : run_suite(name, seed, o)) out.push_back(report_json(r, false, -1));
            return out;
        },
        py::arg("name"), py::arg("seed") = 0, py::arg("workers") = 1);
}
