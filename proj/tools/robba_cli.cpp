#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "robba/checks.hpp"
#include "robba/errors.hpp"
#include "robba/json_io.hpp"

using namespace robba;

namespace {

// --input accepts a file path, "-" for stdin, or inline JSON (recognized by
// a leading brace or bracket).
Json load_input(const std::string& input) {
    std::string text;
    if (input.empty()) throw parse_error("no input given; pass --input");
    if (input == "-") {
        std::ostringstream os;
        os << std::cin.rdbuf();
        text = os.str();
    } else if (input.front() == '{' || input.front() == '[') {
        text = input;
    } else {
        std::ifstream in(input);
        if (!in) throw parse_error("cannot open input file: " + input);
        std::ostringstream os;
        os << in.rdbuf();
        text = os.str();
    }
    try {
        return Json::parse(text);
    } catch (const Json::exception& e) {
        throw parse_error(std::string("input is not valid JSON: ") + e.what());
    }
}

std::vector<Rat> parse_samples(const std::string& text) {
    std::vector<Rat> out;
    std::string item;
    std::istringstream is(text);
    while (std::getline(is, item, ',')) {
        if (!item.empty()) out.push_back(parse_rat(item));
    }
    return out;
}

struct Sink {
    std::ofstream file;
    std::ostream* os = &std::cout;
    explicit Sink(const std::string& path) {
        if (path.empty()) return;
        file.open(path);
        if (!file) throw error("cannot open output file: " + path);
        os = &file;
    }
    std::ostream& stream() { return *os; }
};

void emit_json(Sink& sink, const Json& j) { sink.stream() << j.dump(2) << "\n"; }

long long effective_budget(long long budget, const FieldPtr& k) {
    return budget > 0 ? budget : default_budget(static_cast<long long>(k->prime()));
}

int cmd_radius(const std::string& input, const std::string& format, long long budget,
               const std::string& samples, Sink& sink) {
    NablaModule M = module_from_json(load_input(input));
    std::vector<Rat> s_list = parse_samples(samples);
    if (s_list.empty()) s_list = {M.s_min, M.s_max};
    auto profile = generic_radius_profile(M, s_list, effective_budget(budget, M.field));
    if (format == "csv") {
        sink.stream() << "s,lambda_spec,r,r_minus_s,iterations\n";
        for (const auto& q : profile.samples)
            sink.stream() << rat_str(q.s) << ',' << rat_str(q.lambda_spec) << ',' << rat_str(q.r)
                          << ',' << rat_str(q.r - q.s) << ',' << q.iterations << "\n";
        return 0;
    }
    emit_json(sink, profile_to_json(profile));
    return 0;
}

int cmd_break(const std::string& input, const std::string& format, long long budget,
              const std::string& samples, Sink& sink) {
    NablaModule M = module_from_json(load_input(input));
    std::vector<Rat> s_list = parse_samples(samples.empty() ? "1/16,1/32" : samples);
    if (s_list.size() != 2) throw parse_error("break needs exactly two sample radii");
    auto est = highest_break_estimate(M, s_list[0], s_list[1], effective_budget(budget, M.field));
    if (format == "csv") {
        sink.stream() << "beta,beta_small,beta_large,delta,consistent,budget\n"
                      << rat_str(est.beta) << ',' << rat_str(est.beta_small) << ','
                      << rat_str(est.beta_large) << ',' << rat_str(est.delta) << ','
                      << (est.consistent ? 1 : 0) << ',' << est.budget_used << "\n";
        return 0;
    }
    emit_json(sink, break_to_json(est));
    return 0;
}

int cmd_polygon(const std::string& input, const std::string& format, Sink& sink) {
    BreakData breaks = breaks_from_json(load_input(input));
    auto poly = hasse_arf_polygon(breaks);
    if (format == "csv") {
        sink.stream() << "x,y\n";
        for (const auto& [x, y] : poly.vertices)
            sink.stream() << rat_str(x) << ',' << rat_str(y) << "\n";
        return 0;
    }
    emit_json(sink, polygon_to_json(poly));
    return 0;
}

int cmd_herbrand(const std::string& input, const std::string& format, Sink& sink) {
    Json j = load_input(input);
    if (!j.is_object() || !j.contains("op"))
        throw parse_error("herbrand input needs an \"op\" key");
    std::string op = j.at("op").get<std::string>();
    if (op == "eval") {
        Rat u = parse_rat(j.at("u").get<std::string>());
        Rat v = herbrand_eval(herbrand_from_json(j.at("fn")), u);
        if (format == "csv") {
            sink.stream() << "value\n" << rat_str(v) << "\n";
        } else {
            Json out;
            out["value"] = rat_str(v);
            emit_json(sink, out);
        }
        return 0;
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
    if (format == "csv") {
        sink.stream() << "u,y\n";
        for (const auto& [u, y] : f.vertices)
            sink.stream() << rat_str(u) << ',' << rat_str(y) << "\n";
        return 0;
    }
    emit_json(sink, herbrand_to_json(f));
    return 0;
}

int cmd_antecedent(const std::string& input, const std::string& format, long long order,
                   Sink& sink) {
    NablaModule M = module_from_json(load_input(input));
    auto res = frobenius_antecedent(M, order);
    if (format == "csv") {
        sink.stream() << "s,r\n";
        for (const auto& [s, r] : res.radius_check)
            sink.stream() << rat_str(s) << ',' << rat_str(r) << "\n";
        return 0;
    }
    emit_json(sink, antecedent_to_json(res));
    return 0;
}

int cmd_reduce(const std::string& input, const std::string& format, long long order, Sink& sink) {
    NablaModule M = module_from_json(load_input(input));
    auto res = approximate_reduce(M.N, M.s_min, M.s_max, order);
    if (format == "csv") {
        sink.stream() << "ok,margin_lo,margin_hi\n"
                      << (res.ok ? 1 : 0) << ',' << ext_to_str(res.margin_lo) << ','
                      << ext_to_str(res.margin_hi) << "\n";
        return 0;
    }
    emit_json(sink, reduce_to_json(res));
    return 0;
}

int cmd_solve(const std::string& input, const std::string& format, long long order, Sink& sink) {
    Json j = load_input(input);
    FieldPtr k = field_from_json(j.at("field"));
    const Json& pj = j.at("poly");
    if (!pj.is_array() || pj.size() < 2)
        throw parse_error("solve.poly: expected the coefficient list of a monic polynomial");
    std::vector<LaurentSeries> P;
    for (const auto& c : pj) P.push_back(series_from_json(k, c));
    const Json& win = j.at("window");
    if (!win.is_array() || win.size() != 2)
        throw parse_error("solve.window: expected [s_lo, s_hi]");
    Rat s_lo = parse_rat(win[0].get<std::string>());
    Rat s_hi = parse_rat(win[1].get<std::string>());
    auto res = hensel_lift(P, order, s_lo, s_hi);
    if (format == "csv") {
        sink.stream() << "step,residual_lo,residual_hi\n";
        for (std::size_t i = 0; i < res.steps.size(); ++i)
            sink.stream() << i << ',' << ext_to_str(res.steps[i].residual_lo) << ','
                          << ext_to_str(res.steps[i].residual_hi) << "\n";
        return 0;
    }
    emit_json(sink, hensel_to_json(res));
    return 0;
}

Int parse_int(const std::string& s) {
    try {
        return Int(s);
    } catch (const std::invalid_argument&) {
        throw parse_error("not an integer: " + s);
    }
}

int cmd_bound(const std::string& input, const std::string& format, Sink& sink) {
    Json j = load_input(input);
    std::string op = j.at("op").get<std::string>();
    std::string value;
    if (op == "abelian") {
        value = bound_abelian_image(j.at("p").get<long long>(), j.at("n").get<long long>(),
                                    j.at("ell").get<long long>())
                    .get_str();
    } else if (op == "frobenius_order") {
        Int q = parse_int(j.at("q").get<std::string>());
        value = bound_frobenius_order(q, j.at("d").get<long long>()).get_str();
    } else if (op == "frobenius_break") {
        value = rat_str(bound_frobenius_break(j.at("p").get<long long>(),
                                              parse_rat(j.at("eps").get<std::string>())));
    } else if (op == "full") {
        Int f_n = parse_int(j.at("f_n").get<std::string>());
        value = bound_full_image(f_n, j.at("p").get<long long>(), j.at("n").get<long long>(),
                                 j.at("ell").get<long long>())
                    .get_str();
    } else {
        throw parse_error("unknown bound op: " + op);
    }
    if (format == "csv") {
        sink.stream() << "value\n" << value << "\n";
        return 0;
    }
    Json out;
    out["value"] = value;
    emit_json(sink, out);
    return 0;
}

int cmd_check(const std::string& format, long long budget, Sink& sink) {
    long long cases = budget > 0 ? budget : 200;
    CheckReport rep = run_property_corpus(cases, 0x5eedULL);
    if (format == "csv") {
        sink.stream() << "cases,passed,failed\n"
                      << rep.cases << ',' << rep.checks_passed << ',' << rep.checks_failed << "\n";
    } else {
        emit_json(sink, report_to_json(rep));
    }
    return rep.checks_failed == 0 ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact differential-module calculator on p-adic annuli"};
    app.require_subcommand(1);

    std::string input, format = "json", samples, out_path;
    long long budget = 0; // 0 = 8 p^2 for the module's p
    long long order = 32;
    app.add_option("--input,-i", input, "file path, '-' for stdin, or inline JSON");
    app.add_option("--format,-f", format, "json or csv")
        ->check(CLI::IsMember({"json", "csv"}));
    app.add_option("--budget,-S", budget, "iteration budget (default 8 p^2)");
    app.add_option("--order,-k", order, "truncation order (default 32)");
    app.add_option("--samples", samples, "comma-separated radii, e.g. 1/16,1/32");
    app.add_option("--out,-o", out_path, "output file (default stdout)");

    auto* c_radius = app.add_subcommand("radius", "spectral radius profile of a module");
    auto* c_break = app.add_subcommand("break", "two-sample highest-break estimate");
    auto* c_polygon = app.add_subcommand("polygon", "break polygon from break data");
    auto* c_herbrand = app.add_subcommand("herbrand", "transfer-function calculus");
    auto* c_antecedent = app.add_subcommand("antecedent", "descend through the Frobenius");
    auto* c_reduce = app.add_subcommand("reduce", "certified basis reduction of a matrix");
    auto* c_solve = app.add_subcommand("solve", "lift a root of a monic polynomial");
    auto* c_bound = app.add_subcommand("bound", "closed-form group-theoretic bounds");
    auto* c_check = app.add_subcommand("check", "run the built-in property corpus");
    for (auto* sub : app.get_subcommands({})) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        Sink sink(out_path);
        if (c_radius->parsed()) return cmd_radius(input, format, budget, samples, sink);
        if (c_break->parsed()) return cmd_break(input, format, budget, samples, sink);
        if (c_polygon->parsed()) return cmd_polygon(input, format, sink);
        if (c_herbrand->parsed()) return cmd_herbrand(input, format, sink);
        if (c_antecedent->parsed()) return cmd_antecedent(input, format, order, sink);
        if (c_reduce->parsed()) return cmd_reduce(input, format, order, sink);
        if (c_solve->parsed()) return cmd_solve(input, format, order, sink);
        if (c_bound->parsed()) return cmd_bound(input, format, sink);
        if (c_check->parsed()) return cmd_check(format, budget, sink);
        return 5;
    } catch (const parse_error& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 2;
    } catch (const Json::exception& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 2;
    } catch (const precondition_error& e) {
        std::cerr << "precondition failed: " << e.what() << "\n";
        return 3;
    } catch (const precision_error& e) {
        std::cerr << "precision exhausted: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 5;
    }
}
