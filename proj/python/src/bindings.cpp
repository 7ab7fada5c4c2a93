#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "spfh/compare.hpp"
#include "spfh/driver.hpp"
#include "spfh/fqcat.hpp"
#include "spfh/generic.hpp"
#include "spfh/oracle.hpp"

namespace py = pybind11;
using namespace spfh;

namespace {

py::dict report_dict(const ComparisonReport& rep) {
    py::list rows;
    for (const auto& r : rep.rows) {
        py::dict row;
        row["degree"] = r.degree;
        row["source"] = r.source;
        row["target"] = r.target;
        row["rank"] = r.rank;
        row["verdict"] = r.verdict;
        row["predicted_iso"] = r.predicted_iso;
        row["stability"] = r.stability;
        row["certificate"] = r.certificate;
        rows.append(row);
    }
    py::dict d;
    d["map"] = rep.map;
    d["f"] = rep.f;
    d["g"] = rep.g;
    d["q"] = rep.q;
    d["r"] = rep.r;
    d["s"] = rep.s;
    d["twist_level"] = rep.twist_level;
    d["N"] = rep.N;
    d["rank_n"] = rep.rank_n;
    d["components"] = rep.components;
    d["rows"] = rows;
    d["contradiction"] = rep.contradiction();
    return d;
}

py::dict generic_dict(const GenericResult& g) {
    py::dict d;
    d["dims"] = g.dims.dims;
    d["certificate"] = g.cert.str();
    d["n"] = g.n;
    return d;
}

CompareOptions degrees(int max_degree) {
    CompareOptions o;
    o.max_degree = max_degree;
    return o;
}

// The GIL is released around every engine call.
using nogil = py::call_guard<py::gil_scoped_release>;

}  // namespace

PYBIND11_MODULE(_spfh, m) {
    m.doc() = "Exact Ext/Tor for strict polynomial functors and functors over finite fields";
    m.attr("engine_version") = kEngineVersion;

    py::register_exception<ResourceCapExceeded>(m, "ResourceCapExceeded", PyExc_RuntimeError);
    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
    py::register_exception<JobError>(m, "JobError", PyExc_ValueError);

    m.def("normalize", [](const std::string& e) { return parse_expr(e).str(); }, py::arg("expr"),
          "Canonical text of a functor expression.");
    m.def(
        "functor_dim",
        [](const std::string& e, int n, int p) { return eval_cached(parse_expr(e), n, Field::get(p))->dim(); },
        py::arg("expr"), py::arg("n"), py::arg("p") = 2, nogil());

    m.def(
        "ext",
        [](const std::string& f, const std::string& g, int p, int r, int n, int max_degree) {
            Expr a = parse_expr(f), b = parse_expr(g);
            if (n == 0) n = std::max({1, a.max_degree(p), b.max_degree(p)});
            auto field = Field::get(p, r);
            return ext(*eval_cached(a, n, field), *eval_cached(b, n, field), max_degree).dims;
        },
        py::arg("F"), py::arg("G"), py::arg("p") = 2, py::arg("r") = 1, py::arg("n") = 0, py::arg("max_degree") = 2,
        nogil(), "dim Ext^i(F, G) for i = 0..max_degree, evaluated at rank n (0: the functor degree).");
    m.def(
        "tor",
        [](const std::string& e, const std::string& f, int p, int r, int n, int max_degree) {
            Expr a = parse_expr(e), b = parse_expr(f);
            if (n == 0) n = std::max({1, b.max_degree(p)});
            return tor(a, b, n, Field::get(p, r), max_degree).dims;
        },
        py::arg("E"), py::arg("F"), py::arg("p") = 2, py::arg("r") = 1, py::arg("n") = 0, py::arg("max_degree") = 2,
        nogil(), "dim Tor_i(E, F) for contravariant E = cdual(E0).");
    m.def(
        "generic_ext",
        [](const std::string& f, const std::string& g, int p, int max_degree) {
            return generic_ext(parse_expr(f), parse_expr(g), max_degree, Field::get(p));
        },
        py::arg("F"), py::arg("G"), py::arg("p") = 2, py::arg("max_degree") = 2, nogil());
    m.def(
        "generic_tor",
        [](const std::string& e, const std::string& g, int p, int max_degree) {
            return generic_tor(parse_expr(e), parse_expr(g), max_degree, Field::get(p));
        },
        py::arg("E"), py::arg("G"), py::arg("p") = 2, py::arg("max_degree") = 2, nogil());
    py::class_<GenericResult>(m, "GenericResult")
        .def_property_readonly("dims", [](const GenericResult& g) { return g.dims.dims; })
        .def_property_readonly("certificate", [](const GenericResult& g) { return g.cert.str(); })
        .def_readonly("n", &GenericResult::n)
        .def("to_dict", &generic_dict);

    m.def(
        "twist_map",
        [](const std::string& f, const std::string& g, int r, int max_degree, int p) {
            auto rep = twist_map(parse_expr(f), parse_expr(g), r, max_degree, Field::get(p));
            std::vector<std::tuple<long long, long long, long long>> out;
            for (const auto& d : rep.degrees) out.emplace_back(d.source, d.target, d.rank);
            return out;
        },
        py::arg("F"), py::arg("G"), py::arg("r"), py::arg("max_degree"), py::arg("p") = 2, nogil(),
        "(source, target, rank) per degree of Ext(F^(r), G^(r)) -> Ext(F^(r+1), G^(r+1)).");

    m.def(
        "fqcat_ext",
        [](const std::string& f, const std::string& g, int q, int N, int max_degree) {
            auto cat = std::make_shared<const TruncCat>(q, N);
            auto k = cat->fq();
            return cat_ext(restrict_functor(parse_expr(f), cat, k), restrict_functor(parse_expr(g), cat, k),
                           max_degree)
                .dims;
        },
        py::arg("F"), py::arg("G"), py::arg("q"), py::arg("N"), py::arg("max_degree") = 0, nogil(),
        "Ext between the restrictions of F and G to F_q-spaces of dimension at most N.");

    m.def(
        "strong_phi",
        [](const std::string& f, const std::string& g, int q, int N, int max_degree) {
            ComparisonReport rep;
            {
                py::gil_scoped_release release;
                rep = strong_phi(parse_expr(f), parse_expr(g), q, N, degrees(max_degree));
            }
            return report_dict(rep);
        },
        py::arg("F"), py::arg("G"), py::arg("q"), py::arg("N") = 2, py::arg("max_degree") = 0);
    m.def(
        "gen_comp_map",
        [](const std::string& f, const std::string& g, int q, int s, int N, int max_degree) {
            ComparisonReport rep;
            {
                py::gil_scoped_release release;
                rep = gen_comp_map(parse_expr(f), parse_expr(g), q, s, N, degrees(max_degree));
            }
            return report_dict(rep);
        },
        py::arg("F"), py::arg("G"), py::arg("q"), py::arg("s"), py::arg("N") = 2, py::arg("max_degree") = 0);

    m.def(
        "ffss_series",
        [](const std::string& pair, long long v_dim, int r, int p, int max_degree, int weight) {
            return ffss_series(parse_ffss_pair(pair), v_dim, r, p, max_degree, weight).by_weight.at(weight).dims;
        },
        py::arg("pair"), py::arg("v_dim"), py::arg("r"), py::arg("p"), py::arg("max_degree"), py::arg("weight"));
    m.def(
        "gl_exterior_homology", [](int d, int l, int m_, int max_degree) { return gl_exterior_homology(d, l, m_, max_degree).dims; },
        py::arg("d"), py::arg("l"), py::arg("m"), py::arg("max_degree"));
    m.def(
        "e_infty_ext",
        [](const std::string& g, int max_degree, int p) { return e_infty_ext(parse_expr(g), max_degree, p).dims; },
        py::arg("G"), py::arg("max_degree"), py::arg("p") = 2);

    m.def(
        "_run_job",
        [](const std::string& job_json) {
            RunResult res;
            {
                py::gil_scoped_release release;
                res = run(Job::from_json(nlohmann::json::parse(job_json)));
            }
            return std::make_pair(res.document.dump(), res.exit_code);
        },
        py::arg("job_json"));

    m.def(
        "acceptance",
        [](const std::vector<int>& only) {
            std::vector<CriterionResult> res;
            {
                py::gil_scoped_release release;
                res = acceptance_suite(1, only);
            }
            py::list out;
            for (const auto& c : res) {
                py::dict d;
                d["criterion"] = c.id;
                d["pass"] = c.pass;
                d["seconds"] = c.seconds;
                d["limit_seconds"] = c.limit_seconds;
                d["detail"] = c.detail;
                out.append(d);
            }
            return out;
        },
        py::arg("only") = std::vector<int>{});
}
