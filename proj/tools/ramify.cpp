#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "ramify/ramify.hpp"

using namespace ramify;

namespace {

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    require(in.good(), errc::validation, "cannot open '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        fail(errc::validation, "cannot parse '" + path + "': " + e.what());
    }
    return j;
}

void emit_json(const run_config& cfg, json body) {
    json out{{"config", cfg.to_json()}};
    for (auto& [k, v] : body.items()) out[k] = v;
    std::cout << out.dump(2) << "\n";
}

void emit_csv(const run_config& cfg, const std::string& rows) {
    std::cout << cfg.csv_header() << rows;
}

std::pair<unsigned long, unsigned long> parse_range(const std::string& s) {
    auto dots = s.find("..");
    if (dots == std::string::npos) {
        unsigned long n = std::stoul(s);
        return {n, n};
    }
    return {std::stoul(s.substr(0, dots)), std::stoul(s.substr(dots + 2))};
}

any_tower tower_from_file(const std::string& path, const run_config& cfg) {
    json doc = read_json_file(path);
    if (doc.contains("base") && !doc["base"].contains("precision"))
        doc["base"]["precision"] = cfg.precision;
    return load_tower(doc);
}

// --- per-subcommand reports ---------------------------------------------------

template <class B>
json field_info(const tower<B>& t) {
    json steps = json::array();
    for (std::size_t s = 0; s < t.levels(); ++s) {
        steps.push_back(json{
            {"step", s},
            {"kind", t.kind(s) == step_kind::eisenstein ? "eisenstein" : "unramified"},
            {"degree", t.step_degree(s)},
            {"v_generator", rat_to_json(t.generator_valuation(s))}});
    }
    return json{{"base", t.base().to_json()},
                {"degree", t.degree()},
                {"e", t.e()},
                {"f", t.f()},
                {"uniformizer_valuation", rat_to_json(t.uniformizer_valuation())},
                {"steps", steps}};
}

template <class B>
int run_different(const tower<B>& t, const run_config& cfg, bool cross) {
    different_report r = different_tower(t, cross);
    if (cfg.output == output_mode::csv_mode) {
        std::string rows = "step,v_delta_num,v_delta_den,cross_check\n";
        for (const auto& e : r.steps)
            rows += std::to_string(e.step) + "," + e.value.get_num().get_str() + "," +
                    e.value.get_den().get_str() + "," + (e.cross_check_agrees ? "true" : "false") +
                    "\n";
        emit_csv(cfg, rows);
        return 0;
    }
    if (cfg.output == output_mode::pretty_mode) {
        for (const auto& e : r.steps)
            std::cout << "step " << e.step << ": v(delta) = " << e.value.get_str()
                      << (r.cross_checked ? (e.cross_check_agrees ? "  [methods agree]"
                                                                  : "  [METHOD MISMATCH]")
                                          : "")
                      << "\n";
        std::cout << "total v(delta) = " << r.total.get_str() << "\n";
        return 0;
    }
    json j = r.to_json();
    json body{{"total", j["total"]},
              {"cross_checked", j["cross_checked"]},
              {"all_agree", j["all_agree"]},
              {"steps", j["steps"]}};
    emit_json(cfg, body);
    return 0;
}

template <class B>
int run_omega(const tower<B>& t, const run_config& cfg) {
    auto [parts, rep] = omega_tower(t);
    if (cfg.output == output_mode::csv_mode) {
        std::string rows = "step,v_delta_num,v_delta_den,zero\n";
        for (const auto& o : parts)
            rows += std::to_string(o.step) + "," + o.v_delta.get_num().get_str() + "," +
                    o.v_delta.get_den().get_str() + "," + (o.zero ? "true" : "false") + "\n";
        emit_csv(cfg, rows);
        return 0;
    }
    if (cfg.output == output_mode::pretty_mode) {
        for (const auto& o : parts)
            std::cout << "step " << o.step << ": Omega " << (o.zero ? "= 0" : "!= 0")
                      << ", v(delta) = " << o.v_delta.get_str() << "\n";
        std::cout << "total v(delta) = " << rep.total.get_str()
                  << (rep.additivity_checked ? " (additivity verified)" : " (ADDITIVITY FAILED)")
                  << "\n";
        return 0;
    }
    json steps = json::array();
    for (const auto& o : parts) steps.push_back(o.to_json());
    emit_json(cfg, json{{"total", rat_to_json(rep.total)},
                        {"additivity_checked", rep.additivity_checked},
                        {"steps", steps}});
    return 0;
}

template <class B>
int run_dual_basis(const tower<B>& t, const run_config& cfg) {
    json steps = json::array();
    std::string rows = "step,disc_num,disc_den,clearing_power,orthogonal\n";
    for (std::size_t s = 0; s < t.levels(); ++s) {
        trace_data<B> td = make_trace_data(t, s);
        json gram = json::array();
        for (std::size_t i = 0; i < td.gram.rows(); ++i) {
            json row = json::array();
            for (std::size_t j = 0; j < td.gram.cols(); ++j)
                row.push_back(td.gram.at(i, j).to_exact().to_json());
            gram.push_back(row);
        }
        json dual = json::array();
        for (const auto& e : td.dual_basis) dual.push_back(e.to_exact().to_json());
        steps.push_back(json{{"step", s},
                             {"gram", gram},
                             {"dual_basis", dual},
                             {"discriminant_valuation", rat_to_json(td.discriminant_valuation)},
                             {"denominator_clearing_power", td.denominator_clearing_power},
                             {"orthogonality_certified", td.orthogonality_certified}});
        rows += std::to_string(s) + "," + td.discriminant_valuation.get_num().get_str() + "," +
                td.discriminant_valuation.get_den().get_str() + "," +
                std::to_string(td.denominator_clearing_power) + "," +
                (td.orthogonality_certified ? "true" : "false") + "\n";
    }
    if (cfg.output == output_mode::csv_mode) {
        emit_csv(cfg, rows);
        return 0;
    }
    if (cfg.output == output_mode::pretty_mode) {
        std::cout << rows;
        return 0;
    }
    emit_json(cfg, json{{"steps", steps}});
    return 0;
}

template <class B>
int run_idempotent(const tower<B>& t, const run_config& cfg,
                   const std::optional<mpq_class>& eps) {
    json steps = json::array();
    std::string rows = "step,etale,v_delta_num,v_delta_den,certified_or_threshold\n";
    for (std::size_t s = 0; s < t.levels(); ++s) {
        idempotent_report<B> rep = idempotent(t, s);
        json row{{"step", s}, {"etale", rep.etale}};
        mpq_class vd = rep.etale ? mpq_class(0) : rep.threshold->v_delta;
        if (rep.etale) {
            row["laws_certified"] = rep.laws_certified;
            json coeffs = json::array();
            for (const auto& c : *rep.idempotent) coeffs.push_back(c.to_exact().to_json());
            row["idempotent"] = coeffs;
        } else {
            row["threshold"] = json{{"v_delta", rat_to_json(rep.threshold->v_delta)},
                                    {"admitted_at", rat_to_json(rep.threshold->at_valuation)},
                                    {"rejected_below",
                                     rat_to_json(rep.threshold->below_valuation)}};
        }
        if (eps) {
            tensor_square<B> ts(t, s);
            mpq_class piv = t.data()->uniformizer_valuation(s + 1);
            mpq_class kq = *eps / piv;
            require(kq.get_den() == 1, errc::validation,
                    "--eps valuation is outside the step's value group");
            elem<B> epse = t.uniformizer(s + 1).pow(kq.get_num());
            row["eps"] = rat_to_json(*eps);
            row["eps_admits"] = epsilon_idempotent_integral(ts, epse);
        }
        steps.push_back(row);
        rows += std::to_string(s) + "," + (rep.etale ? "true" : "false") + "," +
                vd.get_num().get_str() + "," + vd.get_den().get_str() + "," +
                (rep.etale ? (rep.laws_certified ? "laws-certified" : "LAWS-FAILED")
                           : "threshold") +
                "\n";
    }
    if (cfg.output == output_mode::csv_mode) {
        emit_csv(cfg, rows);
        return 0;
    }
    if (cfg.output == output_mode::pretty_mode) {
        std::cout << rows;
        return 0;
    }
    emit_json(cfg, json{{"steps", steps}});
    return 0;
}

elem<padic_base> parse_x_expr(const padic_tower& t, const std::string& expr) {
    if (expr == "gen") return t.top_generator();
    if (expr == "unif") return t.uniformizer();
    if (expr.rfind("gen+", 0) == 0)
        return t.top_generator() + t.from_rational(parse_rational(expr.substr(4)));
    if (expr.rfind("gen-", 0) == 0)
        return t.top_generator() - t.from_rational(parse_rational(expr.substr(4)));
    return t.from_rational(parse_rational(expr));
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"ramify: exact ramification invariants of local-field towers"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_file;
    long precision_flag = 32;
    std::string threshold_flag = "1/4";
    std::string budget_flag = "1000000";
    std::string output_flag = "json";
    bool csv_short = false, json_short = false;
    auto* opt_config = app.add_option("--config", config_file, "flat key=value config file");
    auto* opt_precision = app.add_option("--precision", precision_flag, "base digits (>= 8)");
    auto* opt_threshold =
        app.add_option("--threshold", threshold_flag, "deeply-ramified threshold (rational)");
    auto* opt_budget = app.add_option("--budget", budget_flag, "witness search budget");
    auto* opt_output = app.add_option("--output", output_flag, "json | csv | pretty");
    app.add_flag("--csv", csv_short, "shorthand for --output csv");
    app.add_flag("--json", json_short, "shorthand for --output json");

    // vg
    auto* vg = app.add_subcommand("vg", "value-group conditions");
    std::string group_spec;
    vg->add_option("--group", group_spec, "group spec, e.g. Z, Q, Z[1/3], Z[1/3]xZ")->required();

    // field
    auto* field = app.add_subcommand("field", "tower inspection");
    std::string tower_file, family_name, base_file, emit_file;
    unsigned long p_flag = 0, n_flag = 0;
    field->add_option("--tower", tower_file, "tower description file");
    field->add_option("--family", family_name, "built-in family name");
    field->add_option("--p", p_flag, "prime");
    field->add_option("--n", n_flag, "family level");
    field->add_option("--base", base_file, "base tower file for constant families");
    field->add_option("--emit", emit_file, "write the tower description to a file");

    // differential subcommands
    bool cross_check = false;
    auto* different = app.add_subcommand("different", "different valuations per step");
    different->add_option("--tower", tower_file, "tower description file")->required();
    different->add_flag("--cross-check", cross_check, "run the trace-dual method as well");
    auto* omega = app.add_subcommand("omega", "Kähler module presentations");
    omega->add_option("--tower", tower_file, "tower description file")->required();
    auto* dualb = app.add_subcommand("dual-basis", "trace form, dual basis, discriminant");
    dualb->add_option("--tower", tower_file, "tower description file")->required();
    auto* idem = app.add_subcommand("idempotent", "diagonal idempotent / epsilon threshold");
    idem->add_option("--tower", tower_file, "tower description file")->required();
    std::string eps_flag;
    idem->add_option("--eps", eps_flag, "epsilon valuation to test (rational)");

    // tower-scan
    auto* tscan = app.add_subcommand("tower-scan", "relative-different scan of a family");
    std::string kprime_file, range_flag = "1..4";
    tscan->add_option("--family", family_name, "cyclotomic | p_radical | unramified | constant")
        ->required();
    tscan->add_option("--p", p_flag, "prime")->required();
    tscan->add_option("--kprime", kprime_file, "K' recipe file")->required();
    tscan->add_option("--n", range_flag, "level range lo..hi");
    tscan->add_option("--base", base_file, "base tower file for constant families");

    // frobenius
    auto* frob = app.add_subcommand("frobenius", "p-th root witness search mod p");
    std::string x_expr;
    unsigned long mmax_flag = 0;
    frob->add_option("--family", family_name, "family name")->required();
    frob->add_option("--p", p_flag, "prime")->required();
    frob->add_option("--x", x_expr, "target: gen | unif | gen+R | gen-R | rational")->required();
    frob->add_option("--n", n_flag, "level of x (default 1)");
    frob->add_option("--mmax", mmax_flag, "search level bound")->required();
    frob->add_option("--base", base_file, "base tower file for constant families");

    // defect
    auto* defect = app.add_subcommand("defect", "symbolic defect classification");
    std::string problem_file;
    defect->add_option("--problem", problem_file, "defect problem file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        std::cout << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n\n" << app.help();
        return 64;
    }

    try {
        run_config cfg;
        if (*opt_config) {
            for (const auto& [k, v] : parse_config_file(config_file)) {
                if (k == "precision" && *opt_precision) continue;
                if (k == "threshold" && *opt_threshold) continue;
                if (k == "budget" && *opt_budget) continue;
                if (k == "output" && *opt_output) continue;
                apply_config_entry(cfg, k, v);
            }
        }
        if (*opt_precision) cfg.precision = precision_flag;
        if (*opt_threshold) cfg.threshold = parse_rational(threshold_flag);
        if (*opt_budget) cfg.budget = mpz_class(budget_flag);
        if (*opt_output) apply_config_entry(cfg, "output", output_flag);
        if (csv_short) cfg.output = output_mode::csv_mode;
        if (json_short) cfg.output = output_mode::json_mode;
        cfg.validate();

        auto family_of = [&]() {
            std::optional<json> base;
            if (!base_file.empty()) base = read_json_file(base_file);
            return tower_family::from_name(family_name, p_flag, cfg.precision, base);
        };

        if (app.got_subcommand(vg)) {
            value_group g = value_group::parse(group_spec);
            auto chain = convex_subgroups(g);
            json chain_j = json::array();
            for (const auto& c : chain) chain_j.push_back(json{{"zero_prefix", c.zero_prefix}});
            emit_json(cfg, json{{"group", g.to_json()},
                                {"dr_condition", dr_valuegroup_condition(g)},
                                {"convex_chain_length", chain.size()},
                                {"convex_chain", chain_j}});
            return 0;
        }

        if (app.got_subcommand(defect)) {
            defect_problem pb = defect_problem::from_json(read_json_file(problem_file));
            emit_json(cfg, defect_report_to_json(pb.classify()));
            return 0;
        }

        if (app.got_subcommand(field)) {
            any_tower t = [&]() -> any_tower {
                if (!tower_file.empty()) return tower_from_file(tower_file, cfg);
                require(!family_name.empty(), errc::validation,
                        "field needs --tower or --family");
                return family_of().make(n_flag);
            }();
            return std::visit(
                [&](const auto& tw) {
                    if (!emit_file.empty()) {
                        std::ofstream out(emit_file);
                        require(out.good(), errc::validation,
                                "cannot write '" + emit_file + "'");
                        out << tw.to_json().dump(2) << "\n";
                    }
                    emit_json(cfg, field_info(tw));
                    return 0;
                },
                t);
        }

        if (app.got_subcommand(different))
            return std::visit([&](const auto& tw) { return run_different(tw, cfg, cross_check); },
                              tower_from_file(tower_file, cfg));
        if (app.got_subcommand(omega))
            return std::visit([&](const auto& tw) { return run_omega(tw, cfg); },
                              tower_from_file(tower_file, cfg));
        if (app.got_subcommand(dualb))
            return std::visit([&](const auto& tw) { return run_dual_basis(tw, cfg); },
                              tower_from_file(tower_file, cfg));
        if (app.got_subcommand(idem)) {
            std::optional<mpq_class> eps;
            if (!eps_flag.empty()) eps = parse_rational(eps_flag);
            return std::visit([&](const auto& tw) { return run_idempotent(tw, cfg, eps); },
                              tower_from_file(tower_file, cfg));
        }

        if (app.got_subcommand(tscan)) {
            auto [lo, hi] = parse_range(range_flag);
            kprime_recipe rec = kprime_recipe::from_json(read_json_file(kprime_file));
            tower_scan s = scan(family_of(), rec, lo, hi, cfg.threshold, true);
            if (cfg.output == output_mode::csv_mode)
                emit_csv(cfg, s.to_csv());
            else if (cfg.output == output_mode::pretty_mode) {
                for (const auto& r : s.rows) {
                    std::cout << "n=" << r.n << ": ";
                    if (r.v_delta)
                        std::cout << "v(delta) = " << r.v_delta->get_str() << "\n";
                    else
                        std::cout << "error: " << r.error << "\n";
                }
                std::cout << "verdict: " << scan_verdict_name(s.verdict) << "\n";
            } else
                emit_json(cfg, s.to_json());
            return 0;
        }

        if (app.got_subcommand(frob)) {
            if (n_flag == 0) n_flag = 1;
            tower_family fam = family_of();
            padic_tower fn = fam.make(n_flag);
            elem<padic_base> x = parse_x_expr(fn, x_expr);
            frobenius_witness w = frobenius_search(fam, n_flag, x, mmax_flag, cfg.budget);
            emit_json(cfg, w.to_json());
            return 0;
        }

        fail(errc::validation, "no subcommand dispatched");
    } catch (const error& e) {
        std::cerr << "error: " << e.what() << "\n";
        switch (e.code()) {
        case errc::precision_exhausted:
        case errc::division_by_zero_at_precision:
        case errc::singular_gram:
            return 3;
        default:
            return 2;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
