#include "robba/json_io.hpp"

#include "robba/errors.hpp"

namespace robba {

namespace {

long long to_ll(const Json& j, const char* what) {
    if (!j.is_number_integer())
        throw parse_error(std::string(what) + ": expected an integer");
    return j.get<long long>();
}

std::string to_str(const Json& j, const char* what) {
    if (!j.is_string())
        throw parse_error(std::string(what) + ": expected a string");
    return j.get<std::string>();
}

Rat rat_field(const Json& j, const char* what) { return parse_rat(to_str(j, what)); }

} // namespace

std::string ext_to_str(const ExtRat& x) { return ext_str(x); }

ExtRat ext_from_str(const std::string& s) {
    if (s == "inf" || s == "+inf") return ExtRat::infinity();
    return ExtRat(parse_rat(s));
}

Json field_to_json(const FieldPtr& k) {
    Json j;
    j["p"] = static_cast<long long>(k->prime());
    if (k->kind() == CoeffField::Kind::Rational) {
        j["kind"] = "Q";
    } else {
        j["kind"] = "ext";
        Json mp = Json::array();
        for (const auto& c : k->minpoly()) mp.push_back(rat_str(c));
        j["minpoly"] = mp;
    }
    return j;
}

FieldPtr field_from_json(const Json& j) {
    if (!j.is_object()) throw parse_error("field: expected an object");
    auto p = to_ll(j.at("p"), "field.p");
    if (p < 2) throw parse_error("field.p: expected a prime >= 2");
    auto kind = to_str(j.at("kind"), "field.kind");
    if (kind == "Q") return CoeffField::rationals(static_cast<unsigned long>(p));
    if (kind != "ext") throw parse_error("field.kind: expected \"Q\" or \"ext\"");
    const Json& mp = j.at("minpoly");
    if (!mp.is_array()) throw parse_error("field.minpoly: expected an array");
    std::vector<Rat> coeffs;
    for (const auto& c : mp) coeffs.push_back(rat_field(c, "field.minpoly[]"));
    return CoeffField::extension(static_cast<unsigned long>(p), std::move(coeffs));
}

Json elem_to_json(const FieldElem& x) {
    if (x.field()->degree() == 1) return rat_str(x.rational_part());
    Json j = Json::array();
    for (const auto& c : x.coeffs()) j.push_back(rat_str(c));
    return j;
}

FieldElem elem_from_json(const FieldPtr& k, const Json& j) {
    if (j.is_string()) return k->rational(parse_rat(j.get<std::string>()));
    if (!j.is_array()) throw parse_error("element: expected a string or an array of strings");
    std::vector<Rat> coeffs;
    for (const auto& c : j) coeffs.push_back(rat_field(c, "element[]"));
    return k->element(std::move(coeffs));
}

namespace {

Json window_to_json(const Window& w) {
    if (w.is_empty()) return nullptr;
    Json j = Json::array();
    j.push_back(w.lo ? Json(*w.lo) : Json("-inf"));
    j.push_back(w.hi ? Json(*w.hi) : Json("+inf"));
    return j;
}

Window window_from_json(const Json& j) {
    if (j.is_null()) return Window::none();
    if (!j.is_array() || j.size() != 2)
        throw parse_error("window: expected null or a two-entry array");
    Window w;
    if (!(j[0].is_string() && j[0].get<std::string>() == "-inf"))
        w.lo = to_ll(j[0], "window[0]");
    if (!(j[1].is_string() && j[1].get<std::string>() == "+inf"))
        w.hi = to_ll(j[1], "window[1]");
    if (w.is_empty()) throw parse_error("window: lower bound exceeds upper bound");
    return w;
}

} // namespace

Json series_to_json(const LaurentSeries& f) {
    Json coeffs = Json::object();
    for (const auto& [e, c] : f.terms()) coeffs[std::to_string(e)] = elem_to_json(c);
    Json j;
    j["coeffs"] = std::move(coeffs);
    j["exact"] = f.exact();
    j["window"] = window_to_json(f.window());
    if (f.tail()) {
        const TailBound& t = *f.tail();
        Json tb;
        tb["s_lo"] = rat_str(t.s_lo);
        tb["s_hi"] = rat_str(t.s_hi);
        tb["b_lo"] = ext_to_str(t.b_lo);
        tb["b_hi"] = ext_to_str(t.b_hi);
        j["tail"] = std::move(tb);
    }
    return j;
}

LaurentSeries series_from_json(const FieldPtr& k, const Json& j) {
    if (!j.is_object()) throw parse_error("series: expected an object");
    std::map<long long, FieldElem> terms;
    const Json& coeffs = j.at("coeffs");
    if (!coeffs.is_object()) throw parse_error("series.coeffs: expected an object");
    for (const auto& [key, val] : coeffs.items()) {
        long long e;
        try {
            std::size_t pos = 0;
            e = std::stoll(key, &pos);
            if (pos != key.size()) throw std::invalid_argument(key);
        } catch (const std::exception&) {
            throw parse_error("series.coeffs: exponent key is not an integer: " + key);
        }
        terms.emplace(e, elem_from_json(k, val));
    }
    bool exact = true;
    if (j.contains("exact")) {
        if (!j.at("exact").is_boolean()) throw parse_error("series.exact: expected a boolean");
        exact = j.at("exact").get<bool>();
    }
    Window w = j.contains("window") ? window_from_json(j.at("window")) : Window::all();
    std::optional<TailBound> tail;
    if (j.contains("tail") && !j.at("tail").is_null()) {
        const Json& tb = j.at("tail");
        TailBound t{rat_field(tb.at("s_lo"), "tail.s_lo"), rat_field(tb.at("s_hi"), "tail.s_hi"),
                    ext_from_str(to_str(tb.at("b_lo"), "tail.b_lo")),
                    ext_from_str(to_str(tb.at("b_hi"), "tail.b_hi"))};
        if (t.s_lo > t.s_hi) throw parse_error("tail: anchors out of order");
        tail = t;
    }
    return LaurentSeries::make(k, std::move(terms), exact, w, tail);
}

Json module_to_json(const NablaModule& M) {
    Json rows = Json::array();
    for (const auto& row : M.N) {
        Json r = Json::array();
        for (const auto& e : row) r.push_back(series_to_json(e));
        rows.push_back(std::move(r));
    }
    Json j;
    j["field"] = field_to_json(M.field);
    j["rank"] = M.rank;
    j["operator"] = M.form == OpForm::ddt ? "d/dt" : "t d/dt";
    j["matrix"] = std::move(rows);
    j["window"] = Json::array({rat_str(M.s_min), rat_str(M.s_max)});
    return j;
}

NablaModule module_from_json(const Json& j) {
    if (!j.is_object()) throw parse_error("module: expected an object");
    FieldPtr k = field_from_json(j.at("field"));
    auto op = to_str(j.at("operator"), "module.operator");
    OpForm form;
    if (op == "d/dt") form = OpForm::ddt;
    else if (op == "t d/dt") form = OpForm::theta;
    else throw parse_error("module.operator: expected \"d/dt\" or \"t d/dt\"");
    const Json& rows = j.at("matrix");
    if (!rows.is_array()) throw parse_error("module.matrix: expected an array of rows");
    Matrix N;
    for (const auto& row : rows) {
        if (!row.is_array()) throw parse_error("module.matrix: expected an array of rows");
        std::vector<LaurentSeries> r;
        for (const auto& e : row) r.push_back(series_from_json(k, e));
        N.push_back(std::move(r));
    }
    const Json& win = j.at("window");
    if (!win.is_array() || win.size() != 2)
        throw parse_error("module.window: expected [s_min, s_max]");
    Rat s_min = rat_field(win[0], "module.window[0]");
    Rat s_max = rat_field(win[1], "module.window[1]");
    NablaModule M = make_module(k, form, std::move(N), s_min, s_max);
    if (j.contains("rank") && to_ll(j.at("rank"), "module.rank") != M.rank)
        throw parse_error("module.rank: does not match the matrix dimension");
    return M;
}

Json herbrand_to_json(const HerbrandFn& f) {
    Json verts = Json::array();
    for (const auto& [u, y] : f.vertices)
        verts.push_back(Json::array({rat_str(u), rat_str(y)}));
    Json j;
    j["vertices"] = std::move(verts);
    j["final_slope"] = rat_str(f.final_slope);
    return j;
}

HerbrandFn herbrand_from_json(const Json& j) {
    if (!j.is_object()) throw parse_error("herbrand: expected an object");
    HerbrandFn f;
    const Json& verts = j.at("vertices");
    if (!verts.is_array()) throw parse_error("herbrand.vertices: expected an array");
    for (const auto& v : verts) {
        if (!v.is_array() || v.size() != 2)
            throw parse_error("herbrand.vertices: expected [u, y] pairs");
        f.vertices.emplace_back(rat_field(v[0], "vertex.u"), rat_field(v[1], "vertex.y"));
    }
    f.final_slope = rat_field(j.at("final_slope"), "herbrand.final_slope");
    return f.normalized();
}

Json matrix_to_json(const Matrix& A) {
    Json rows = Json::array();
    for (const auto& row : A) {
        Json r = Json::array();
        for (const auto& e : row) r.push_back(series_to_json(e));
        rows.push_back(std::move(r));
    }
    return rows;
}

Json profile_to_json(const RadiusProfile& profile) {
    Json rows = Json::array();
    for (const auto& q : profile.samples) {
        Json row;
        row["s"] = rat_str(q.s);
        row["lambda_spec"] = rat_str(q.lambda_spec);
        row["lambda_ring"] = rat_str(q.lambda_ring);
        row["lambda_tail"] = ext_to_str(q.lambda_tail);
        row["r"] = rat_str(q.r);
        row["r_minus_s"] = rat_str(q.r - q.s);
        row["iterations"] = q.iterations;
        row["tail_window"] = q.tail_window;
        rows.push_back(std::move(row));
    }
    Json out;
    out["samples"] = std::move(rows);
    return out;
}

Json break_to_json(const BreakEstimate& est) {
    Json out;
    out["beta"] = rat_str(est.beta);
    out["delta"] = rat_str(est.delta);
    out["consistent"] = est.consistent;
    out["budget_used"] = est.budget_used;
    Json rows = Json::array();
    Json a, b;
    a["s"] = rat_str(est.s_small);
    a["beta"] = rat_str(est.beta_small);
    b["s"] = rat_str(est.s_large);
    b["beta"] = rat_str(est.beta_large);
    rows.push_back(std::move(a));
    rows.push_back(std::move(b));
    out["samples"] = std::move(rows);
    return out;
}

Json polygon_to_json(const HasseArfPolygon& poly) {
    Json verts = Json::array();
    for (const auto& [x, y] : poly.vertices)
        verts.push_back(Json::array({rat_str(x), rat_str(y)}));
    Json out;
    out["vertices"] = std::move(verts);
    out["integer_vertices"] = poly.integer_vertices;
    return out;
}

Json reduce_to_json(const ReduceResult& res) {
    Json out;
    out["ok"] = res.ok;
    out["multiplier"] = matrix_to_json(res.U);
    out["margin_lo"] = ext_to_str(res.margin_lo);
    out["margin_hi"] = ext_to_str(res.margin_hi);
    out["diagnostics"] = res.diagnostics;
    return out;
}

Json antecedent_to_json(const AntecedentResult& res) {
    Json out;
    out["module"] = module_to_json(res.F);
    out["basis"] = matrix_to_json(res.W);
    out["det_margin"] = ext_to_str(res.det_margin);
    out["junk_lambda"] = ext_to_str(res.junk_lambda);
    Json rc = Json::array();
    for (const auto& [s, r] : res.radius_check)
        rc.push_back(Json::array({rat_str(s), rat_str(r)}));
    out["radius_check"] = std::move(rc);
    return out;
}

Json hensel_to_json(const HenselResult& res) {
    Json out;
    out["root"] = series_to_json(res.z);
    out["margin"] = rat_str(res.margin);
    Json steps = Json::array();
    for (const auto& st : res.steps) {
        Json row;
        row["residual_lo"] = ext_to_str(st.residual_lo);
        row["residual_hi"] = ext_to_str(st.residual_hi);
        steps.push_back(std::move(row));
    }
    out["steps"] = std::move(steps);
    return out;
}

Json report_to_json(const CheckReport& rep) {
    Json out;
    out["cases"] = rep.cases;
    out["checks_passed"] = rep.checks_passed;
    out["checks_failed"] = rep.checks_failed;
    out["failures"] = rep.failures;
    return out;
}

Json breaks_to_json(const BreakData& b) {
    Json j = Json::array();
    for (const auto& [br, mult] : b) j.push_back(Json::array({rat_str(br), mult}));
    return j;
}

BreakData breaks_from_json(const Json& j) {
    if (!j.is_array()) throw parse_error("breaks: expected an array of [break, mult]");
    BreakData b;
    for (const auto& row : j) {
        if (!row.is_array() || row.size() != 2)
            throw parse_error("breaks: expected [break, mult] pairs");
        b.emplace_back(rat_field(row[0], "break"), to_ll(row[1], "mult"));
    }
    return b;
}

} // namespace robba
