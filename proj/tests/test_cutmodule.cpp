#include <catch2/catch_amalgamated.hpp>

#include "ramify/cutmodule.hpp"

using namespace ramify;

namespace {

std::vector<mpq_class> geometric(const mpq_class& base, unsigned long p, int terms) {
    std::vector<mpq_class> seq;
    for (int k = 1; k <= terms; ++k) seq.push_back(base + mpq_class(1, pow_ui(p, k)));
    return seq;
}

} // namespace

TEST_CASE("ramification ideal cuts") {
    value_group g = value_group::p_div(3);

    cut open0 = ramification_ideal(geometric(0, 3, 5), 0, false, g);
    CHECK(cut_equal(open0, cut::open_at(g, 0)));

    cut lim1 = ramification_ideal(geometric(1, 3, 5), 1, false, g);
    CHECK(lim1.boundary1() == 1);
    CHECK_FALSE(lim1.boundary_attained());

    cut closed2 = ramification_ideal({mpq_class(2)}, 2, true, g);
    CHECK(closed2.kind() == cut_kind::principal_closed);
    CHECK(closed2.boundary1() == 2);

    CHECK_THROWS_AS(ramification_ideal(geometric(1, 3, 4), 2, false, g), error);
    CHECK_THROWS_AS(ramification_ideal({mpq_class(2)}, 1, true, g), error);
}

TEST_CASE("defect classification of the paper's model sequences") {
    value_group g = value_group::p_div(3);

    auto indep = defect_classify(geometric(0, 3, 6), 0, false, 3, g);
    CHECK(indep.verdict == defect_kind::independent);
    CHECK(indep.omega.is_zero());
    CHECK(indep.omega.almost_zero());
    CHECK(indep.omega.gap().is_zero());

    auto dep = defect_classify(geometric(1, 3, 6), 1, false, 3, g);
    CHECK(dep.verdict == defect_kind::dependent);
    CHECK_FALSE(dep.omega.is_zero());
    CHECK(dep.omega.gap().value == 2); // p - 1

    auto principal = defect_classify({mpq_class(2)}, 2, true, 3, g);
    CHECK(principal.verdict == defect_kind::dependent);
    CHECK(principal.omega.gap().value == 4); // 3*2 - 2
}

TEST_CASE("almost-zero predicate on cut modules") {
    value_group g = value_group::p_div(3);

    cut closed1 = cut::closed_at(g, 1);
    CHECK(cut_module::quotient(closed1, closed1).almost_zero());

    cut open0 = cut::open_at(g, 0);
    CHECK(cut_module::quotient(open0, cut_power(open0, 3)).almost_zero());

    cut closed3 = cut::closed_at(g, 3);
    cut_module m = cut_module::quotient(closed1, closed3);
    CHECK_FALSE(m.almost_zero());
    CHECK(m.gap().value == 2);

    // containment violations are rejected at construction
    CHECK_THROWS_AS(cut_module::quotient(closed3, closed1), error);

    // boundary case: closed/open at the same boundary is almost zero but not zero
    cut_module edge = cut_module::quotient(cut::closed_at(g, 1), cut::open_at(g, 1));
    CHECK(edge.almost_zero());
    CHECK_FALSE(edge.is_zero());
}

TEST_CASE("three-way agreement on a generated grid") {
    // Independent <=> I^p = I <=> Omega almost zero, for every instance.
    value_group g = value_group::p_div(3);
    int checked = 0;
    for (long num = 0; num <= 9; ++num) {
        mpq_class base(num, 3);
        for (bool attained : {false, true}) {
            std::vector<mpq_class> seq;
            mpq_class inf = base;
            if (attained) {
                if (base == 0) continue; // positive values only
                seq = {base};
            } else {
                seq = geometric(base, 3, 5);
            }
            auto rep = defect_classify(seq, inf, attained, 3, g);
            bool indep = rep.verdict == defect_kind::independent;
            CHECK(indep == cut_equal(rep.ideal_power, rep.ideal));
            CHECK(indep == rep.omega.almost_zero());
            CHECK(indep == rep.omega.is_zero());
            ++checked;
        }
    }
    CHECK(checked >= 15);
}

TEST_CASE("defect problem json") {
    json j = json::parse(R"({"p": 3,
        "sequence": {"terms": [[4,3],[10,9],[28,27]], "infimum": [1,1], "attained": false}})");
    defect_problem pb = defect_problem::from_json(j);
    auto rep = pb.classify();
    CHECK(rep.verdict == defect_kind::dependent);
    json out = defect_report_to_json(rep);
    CHECK(out["verdict"] == "Dependent");
    CHECK(out["gap"] == json::array({2, 1}));
    CHECK(out["omega_zero"] == false);
}
