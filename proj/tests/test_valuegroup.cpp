#include <catch2/catch_amalgamated.hpp>

#include "ramify/valuegroup.hpp"

using namespace ramify;

namespace {

// Denotational oracle: two rank-1 cuts describe the same ideal iff they agree
// as membership predicates. Sampled on a grid of rationals around both
// boundaries, which decides equality for principal/limit cuts over dense
// groups and gives an implementation-independent check of cut_equal.
bool same_denoted_set(const cut& a, const cut& b) {
    std::vector<mpq_class> probes;
    for (const auto& c : {a, b}) {
        const mpq_class& bd = c.boundary1();
        probes.push_back(bd);
        for (long num = 1; num <= 3; ++num) {
            probes.push_back(bd + mpq_class(num, 27));
            mpq_class below = bd - mpq_class(num, 27);
            if (below >= 0) probes.push_back(below);
        }
    }
    for (const auto& x : probes) {
        if (a.contains({x}) != b.contains({x})) return false;
    }
    return true;
}

std::vector<cut> cut_grid(const value_group& g) {
    std::vector<cut> cuts;
    for (long num : {0, 1, 2, 3, 5}) {
        mpq_class b(num, 3);
        cuts.push_back(cut::closed_at(g, b));
        cuts.push_back(cut::open_at(g, b));
        std::vector<mpq_class> seq;
        for (int k = 1; k <= 4; ++k) seq.push_back(b + mpq_class(1, pow_ui(3, k)));
        cuts.push_back(cut::limit(g, seq, b, false));
    }
    return cuts;
}

} // namespace

TEST_CASE("convex subgroup chains of lex groups") {
    value_group z2({{coord_div::integers, 0}, {coord_div::integers, 0}});
    auto chain = convex_subgroups(z2);
    REQUIRE(chain.size() == 3);
    CHECK(chain.front().zero_prefix == 2); // {0}
    CHECK(chain.back().zero_prefix == 0);  // whole group

    auto chain1 = convex_subgroups(value_group::integers());
    REQUIRE(chain1.size() == 2);

    value_group mixed({{coord_div::p_divisible, 3}, {coord_div::integers, 0}});
    CHECK(convex_subgroups(mixed).size() == 3);

    // chain is strictly increasing and totally ordered: length k+1 for rank k
    for (std::size_t k = 1; k <= 5; ++k) {
        std::vector<value_group::factor> fs(k, {coord_div::integers, 0ul});
        auto ch = convex_subgroups(value_group(fs));
        REQUIRE(ch.size() == k + 1);
        for (std::size_t i = 0; i + 1 < ch.size(); ++i)
            CHECK(ch[i].zero_prefix > ch[i + 1].zero_prefix);
    }
}

TEST_CASE("deeply-ramified value group condition") {
    CHECK_FALSE(dr_valuegroup_condition(value_group::integers()));
    CHECK(dr_valuegroup_condition(value_group::p_div(3)));
    CHECK(dr_valuegroup_condition(value_group::rationals()));
    CHECK_FALSE(dr_valuegroup_condition(
        value_group({{coord_div::p_divisible, 3}, {coord_div::integers, 0}})));

    // generated grid: condition is false exactly when some coordinate is Z
    std::vector<coord_div> tags = {coord_div::integers, coord_div::p_divisible,
                                   coord_div::full_rationals};
    for (auto t0 : tags)
        for (auto t1 : tags) {
            value_group g({{t0, t0 == coord_div::p_divisible ? 5ul : 0ul},
                           {t1, t1 == coord_div::p_divisible ? 5ul : 0ul}});
            bool has_z = t0 == coord_div::integers || t1 == coord_div::integers;
            CHECK(dr_valuegroup_condition(g) == !has_z);
        }
}

TEST_CASE("group element admission") {
    value_group g({{coord_div::p_divisible, 3}, {coord_div::integers, 0}});
    CHECK_NOTHROW(g.validate_element({mpq_class(1, 9), mpq_class(4)}));
    CHECK_THROWS_AS(g.validate_element({mpq_class(1, 2), mpq_class(0)}), error);
    CHECK_THROWS_AS(g.validate_element({mpq_class(0), mpq_class(1, 3)}), error);
}

TEST_CASE("cut canonicalization") {
    value_group g = value_group::p_div(3);

    // limit cut attaining its infimum collapses to principal-closed
    cut attained = cut::limit(g, {mpq_class(2), mpq_class(3, 2) - mpq_class(1, 2)}, 1, true);
    CHECK(attained.kind() == cut_kind::principal_closed);
    CHECK(attained.boundary1() == 1);

    // inconsistent declarations are rejected, never silently guessed
    CHECK_THROWS_AS(cut::limit(g, {mpq_class(1), mpq_class(2)}, 0, false), error);
    CHECK_THROWS_AS(cut::limit(g, {mpq_class(1), mpq_class(1, 3)}, 1, false), error);
    CHECK_THROWS_AS(cut::limit(g, {mpq_class(2), mpq_class(1)}, 0, true), error);
}

TEST_CASE("cut_power on principal and limit cuts") {
    value_group g = value_group::p_div(3);

    cut c1 = cut_power(cut::closed_at(g, 1), 3);
    CHECK(c1.kind() == cut_kind::principal_closed);
    CHECK(c1.boundary1() == 3);

    // {1/3^k} with infimum 0, cubed: equal as cuts to the input
    std::vector<mpq_class> seq;
    for (int k = 1; k <= 5; ++k) seq.push_back(mpq_class(1, pow_ui(3, k)));
    cut lim0 = cut::limit(g, seq, 0, false);
    CHECK(cut_equal(cut_power(lim0, 3), lim0));
    CHECK(same_denoted_set(cut_power(lim0, 3), lim0));

    // {1+1/3^k} with infimum 1, cubed: moves to infimum 3, not equal
    std::vector<mpq_class> seq1;
    for (int k = 1; k <= 5; ++k) seq1.push_back(1 + mpq_class(1, pow_ui(3, k)));
    cut lim1 = cut::limit(g, seq1, 1, false);
    cut lim1p = cut_power(lim1, 3);
    CHECK_FALSE(cut_equal(lim1p, lim1));
    CHECK(lim1p.boundary1() == 3);
    CHECK_FALSE(lim1p.boundary_attained());

    // composition law over the grid
    for (const auto& c : cut_grid(g))
        for (unsigned long a : {2ul, 3ul})
            for (unsigned long b : {3ul, 5ul})
                CHECK(cut_equal(cut_power(cut_power(c, a), b), cut_power(c, a * b)));
}

TEST_CASE("cut_equal decides canonical forms and matches the denotation") {
    value_group g = value_group::p_div(3);

    std::vector<mpq_class> seq;
    for (int k = 1; k <= 4; ++k) seq.push_back(mpq_class(1, pow_ui(3, k)));
    cut lim0 = cut::limit(g, seq, 0, false);
    CHECK(cut_equal(cut::open_at(g, 0), lim0));
    CHECK_FALSE(cut_equal(cut::closed_at(g, 0), cut::open_at(g, 0)));
    CHECK(cut_equal(cut::closed_at(g, 2), cut::closed_at(g, 2)));

    auto grid = cut_grid(g);
    for (const auto& a : grid) {
        CHECK(cut_equal(a, a));
        for (const auto& b : grid) {
            CHECK(cut_equal(a, b) == cut_equal(b, a));
            CHECK(cut_equal(a, b) == same_denoted_set(a, b));
            for (const auto& c : grid)
                if (cut_equal(a, b) && cut_equal(b, c)) CHECK(cut_equal(a, c));
        }
    }

    // cuts over distinct groups are not comparable
    CHECK_THROWS_AS(cut_equal(cut::closed_at(g, 1), cut::closed_at(value_group::rationals(), 1)),
                    error);
}

TEST_CASE("star is the closure operator of Hom(I, -)") {
    value_group g = value_group::p_div(3);

    // the maximal ideal {v > 0} closes up to the whole ring {v >= 0}
    cut maxideal = cut::open_at(g, 0);
    cut st = star(maxideal);
    CHECK(st.kind() == cut_kind::principal_closed);
    CHECK(st.boundary1() == 0);

    cut closed = cut::closed_at(g, mpq_class(5, 3));
    CHECK(cut_equal(star(closed), closed));

    for (const auto& c : cut_grid(g)) {
        cut s = star(c);
        CHECK(cut_equal(star(s), s));    // idempotent
        CHECK(cut_contains(s, c));       // extensive
        for (const auto& d : cut_grid(g))
            if (cut_contains(c, d)) CHECK(cut_contains(star(c), star(d))); // monotone
    }
}

TEST_CASE("cut json round trip") {
    value_group g = value_group::p_div(3);
    std::vector<mpq_class> seq;
    for (int k = 1; k <= 3; ++k) seq.push_back(1 + mpq_class(1, pow_ui(3, k)));
    cut c = cut::limit(g, seq, 1, false);
    json j = c.to_json();
    cut back = cut_from_json(j);
    CHECK(cut_equal(c, back));
    CHECK(back.to_json() == j);
}

TEST_CASE("group spec parsing") {
    CHECK_FALSE(dr_valuegroup_condition(value_group::parse("Z")));
    CHECK(dr_valuegroup_condition(value_group::parse("Z[1/3]")));
    CHECK_FALSE(dr_valuegroup_condition(value_group::parse("Z[1/3]xZ")));
    CHECK(value_group::parse("Z[1/3]xZ").rank() == 2);
    CHECK(value_group::parse("Q").rank() == 1);
    CHECK_THROWS_AS(value_group::parse("Z[1/0]"), error);
}
