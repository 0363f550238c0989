#include <pybind11/pybind11.h>

#include "robba/errors.hpp"
#include "robba/json_io.hpp"

namespace py = pybind11;
using namespace robba;

// Thin JSON-string boundary: every value crosses as the same interchange
// format the command line speaks, so exactness survives the trip.
namespace {

Json parse(const std::string& text) {
    try {
        return Json::parse(text);
    } catch (const Json::exception& e) {
        throw parse_error(std::string("invalid JSON: ") + e.what());
    }
}

std::string dump(const Json& j) { return j.dump(2); }

long long budget_for(const NablaModule& M, long long budget) {
    return budget > 0 ? budget : default_budget(static_cast<long long>(M.field->prime()));
}

std::string py_radius(const std::string& module_json, const std::string& samples_csv,
                      long long budget) {
    NablaModule M = module_from_json(parse(module_json));
    std::vector<Rat> s_list;
    std::string item;
    std::istringstream is(samples_csv);
    while (std::getline(is, item, ','))
        if (!item.empty()) s_list.push_back(parse_rat(item));
    if (s_list.empty()) s_list = {M.s_min, M.s_max};
    return dump(profile_to_json(generic_radius_profile(M, s_list, budget_for(M, budget))));
}

std::string py_break(const std::string& module_json, const std::string& s1, const std::string& s2,
                     long long budget) {
    NablaModule M = module_from_json(parse(module_json));
    return dump(break_to_json(
        highest_break_estimate(M, parse_rat(s1), parse_rat(s2), budget_for(M, budget))));
}

std::string py_polygon(const std::string& breaks_json) {
    return dump(polygon_to_json(hasse_arf_polygon(breaks_from_json(parse(breaks_json)))));
}

std::string py_antecedent(const std::string& module_json, long long order) {
    return dump(antecedent_to_json(frobenius_antecedent(module_from_json(parse(module_json)), order)));
}

std::string py_reduce(const std::string& module_json, long long order) {
    NablaModule M = module_from_json(parse(module_json));
    return dump(reduce_to_json(approximate_reduce(M.N, M.s_min, M.s_max, order)));
}

std::string py_solve(const std::string& input_json, long long order) {
    Json j = parse(input_json);
    FieldPtr k = field_from_json(j.at("field"));
    std::vector<LaurentSeries> P;
    for (const auto& c : j.at("poly")) P.push_back(series_from_json(k, c));
    Rat s_lo = parse_rat(j.at("window").at(0).get<std::string>());
    Rat s_hi = parse_rat(j.at("window").at(1).get<std::string>());
    return dump(hensel_to_json(hensel_lift(P, order, s_lo, s_hi)));
}

std::string py_herbrand(const std::string& input_json) {
    Json j = parse(input_json);
    std::string op = j.at("op").get<std::string>();
    if (op == "eval") {
        Rat v = herbrand_eval(herbrand_from_json(j.at("fn")),
                              parse_rat(j.at("u").get<std::string>()));
        Json out;
        out["value"] = rat_str(v);
        return dump(out);
    }
    HerbrandFn f;
    if (op == "phi_from_lower") {
        std::vector<long long> orders;
        for (const auto& o : j.at("orders")) orders.push_back(o.get<long long>());
        f = phi_from_lower(orders);
    } else if (op == "artin_schreier") {
        f = artin_schreier_phi(j.at("d").get<long long>(), j.at("p").get<long long>());
    } else if (op == "psi") {
        f = psi(herbrand_from_json(j.at("fn")));
    } else if (op == "compose") {
        f = compose_phi(herbrand_from_json(j.at("outer")), herbrand_from_json(j.at("inner")));
    } else {
        throw parse_error("unknown herbrand op: " + op);
    }
    return dump(herbrand_to_json(f));
}

std::string py_check(long long cases, unsigned long long seed) {
    return dump(report_to_json(run_property_corpus(cases, seed)));
}

} // namespace

PYBIND11_MODULE(robba, m) {
    m.doc() = "exact differential-module calculator on p-adic annuli";
    py::register_exception<parse_error>(m, "ParseError", PyExc_ValueError);
    py::register_exception<precondition_error>(m, "PreconditionError", PyExc_ValueError);
    py::register_exception<precision_error>(m, "PrecisionError", PyExc_ArithmeticError);

    m.def("radius", &py_radius, py::arg("module_json"), py::arg("samples") = "",
          py::arg("budget") = 0, "spectral radius profile; samples as comma-separated rationals");
    m.def("highest_break", &py_break, py::arg("module_json"), py::arg("s1"), py::arg("s2"),
          py::arg("budget") = 0, "two-sample highest-break estimate");
    m.def("polygon", &py_polygon, py::arg("breaks_json"), "break polygon from break data");
    m.def("herbrand", &py_herbrand, py::arg("input_json"), "transfer-function calculus");
    m.def("antecedent", &py_antecedent, py::arg("module_json"), py::arg("order") = 32,
          "descend through the Frobenius");
    m.def("reduce", &py_reduce, py::arg("module_json"), py::arg("order") = 32,
          "certified basis reduction");
    m.def("solve", &py_solve, py::arg("input_json"), py::arg("order") = 32,
          "lift a root of a monic polynomial");
    m.def("check", &py_check, py::arg("cases") = 200, py::arg("seed") = 0x5eedULL,
          "run the property corpus");
}
