#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "ramify/snf.hpp"

using namespace ramify;

namespace {

using pmat = level_matrix<padic_base>;

exact_elem r(long n) { return exact_elem::rational(n); }

// Independent 2x2 oracle by exhaustive pivoting: d1 = min entry valuation,
// d1 + d2 = v(det).
std::pair<mpq_class, mpq_class> snf2x2_oracle(const pmat& m) {
    mpq_class d1;
    bool first = true;
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) {
            valuation_t v = m.at(i, j).valuation();
            if (!v.exact) continue;
            if (first || v.value < d1) {
                d1 = v.value;
                first = false;
            }
        }
    elem det = m.at(0, 0) * m.at(1, 1) - m.at(0, 1) * m.at(1, 0);
    return {d1, det.valuation().value - d1};
}

bool matrices_congruent(const pmat& x, const pmat& y, long digits) {
    for (std::size_t i = 0; i < x.rows(); ++i)
        for (std::size_t j = 0; j < x.cols(); ++j)
            if (!congruent(x.at(i, j), y.at(i, j), digits)) return false;
    return true;
}

} // namespace

TEST_CASE("snf of diag(p, p^2) over Z_p") {
    padic_tower q3(padic_base{3, 32});
    pmat m = pmat::from_exact(q3, 0, {{r(3), r(0)}, {r(0), r(9)}});
    auto s = smith_normal_form(m);
    REQUIRE(s.diag_valuations.size() == 2);
    CHECK(s.diag_valuations[0] == 1);
    CHECK(s.diag_valuations[1] == 2);
    CHECK(matrices_congruent(s.u * m * s.v, s.d, 16));
}

TEST_CASE("snf with a redundant relation") {
    padic_tower q2(padic_base{2, 32});
    pmat m = pmat::from_exact(q2, 0, {{r(2), r(2)}, {r(2), r(2)}});
    presented_module pm(m);
    CHECK(pm.invariants().finite == std::vector<mpq_class>{1});
    CHECK(pm.snf().rank == 1); // one relation redundant
    CHECK(pm.invariants().free_rank == 1);
}

TEST_CASE("snf of a unit-bearing matrix over Z_3, resolved by the 2x2 oracle") {
    padic_tower q3(padic_base{3, 32});
    pmat m = pmat::from_exact(q3, 0, {{r(2), r(1)}, {r(1), r(2)}});
    auto [d1, d2] = snf2x2_oracle(m);
    CHECK(d1 == 0);
    CHECK(d2 == 1); // det = 3
    auto s = smith_normal_form(m);
    REQUIRE(s.diag_valuations.size() == 2);
    CHECK(s.diag_valuations[0] == d1);
    CHECK(s.diag_valuations[1] == d2);
    CHECK(matrices_congruent(s.u * m * s.v, s.d, 16));
}

TEST_CASE("snf over an extension level") {
    padic_tower q2(padic_base{2, 32});
    padic_tower t = q2.extend({r(-2), r(0), r(1)}, step_kind::eisenstein);
    pmat m(t, 1, 2, 2);
    m.at(0, 0) = t.top_generator();
    m.at(0, 1) = t.from_rational(2);
    m.at(1, 1) = t.top_generator().pow(3);
    auto [d1, d2] = snf2x2_oracle(m);
    auto s = smith_normal_form(m);
    REQUIRE(s.diag_valuations.size() == 2);
    CHECK(s.diag_valuations[0] == d1);
    CHECK(s.diag_valuations[1] == d2);
    CHECK(s.diag_valuations[0] == mpq_class(1, 2));
    CHECK(s.diag_valuations[1] == mpq_class(3, 2));
}

TEST_CASE("fitting ideals of O/p + O/p^2") {
    padic_tower q3(padic_base{3, 32});
    presented_module pm(pmat::from_exact(q3, 0, {{r(3), r(0)}, {r(0), r(9)}}));
    auto f = fitting_ideals(pm);
    REQUIRE(f.size() == 3);
    CHECK(f[0] == mpq_class(3));
    CHECK(f[1] == mpq_class(1));
    CHECK(f[2] == mpq_class(0));
}

TEST_CASE("fitting ideals of the zero module are the unit ideal") {
    padic_tower q3(padic_base{3, 32});
    presented_module pm(pmat::from_exact(q3, 0, {{r(1), r(0)}, {r(0), r(1)}}));
    CHECK(pm.is_zero());
    auto f = fitting_ideals(pm);
    for (const auto& fi : f) {
        REQUIRE(fi.has_value());
        CHECK(*fi == 0);
    }
}

TEST_CASE("F0 multiplicativity over direct sums") {
    padic_tower q5(padic_base{5, 32});
    std::mt19937 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        long a = 1 + rng() % 4, b = rng() % 4;
        pmat ma = pmat::from_exact(q5, 0, {{r(static_cast<long>(pow_ui(5, a).get_si()))}});
        pmat mb = pmat::from_exact(q5, 0, {{r(static_cast<long>(pow_ui(5, b).get_si()))}});
        pmat sum(q5, 0, 2, 2);
        sum.at(0, 0) = ma.at(0, 0);
        sum.at(1, 1) = mb.at(0, 0);
        auto f = fitting_ideals(presented_module(sum));
        auto fa = fitting_ideals(presented_module(ma));
        auto fb = fitting_ideals(presented_module(mb));
        REQUIRE((f[0] && fa[0] && fb[0]));
        CHECK(*f[0] == *fa[0] + *fb[0]);
    }
}

TEST_CASE("invariants stable under random unimodular transforms") {
    padic_tower q3(padic_base{3, 32});
    std::mt19937 rng(42);
    pmat m = pmat::from_exact(q3, 0, {{r(3), r(6), r(1)}, {r(9), r(3), r(0)}, {r(0), r(27), r(3)}});
    auto base_inv = presented_module(m).invariants();
    for (int trial = 0; trial < 25; ++trial) {
        pmat w = m;
        for (int op = 0; op < 6; ++op) {
            std::size_t i = rng() % 3, j = rng() % 3;
            long c = static_cast<long>(rng() % 5) - 2;
            if (i == j) continue;
            if (rng() % 2 == 0)
                for (std::size_t k = 0; k < 3; ++k)
                    w.at(i, k) = w.at(i, k) + q3.from_rational(c, 0) * w.at(j, k);
            else
                for (std::size_t k = 0; k < 3; ++k)
                    w.at(k, i) = w.at(k, i) + q3.from_rational(c, 0) * w.at(k, j);
        }
        CHECK(presented_module(w).invariants() == base_inv);
    }
}

TEST_CASE("length is presentation independent") {
    padic_tower q3(padic_base{3, 32});
    // O/(3) + O/(9) presented two different ways
    presented_module d(pmat::from_exact(q3, 0, {{r(3), r(0)}, {r(0), r(9)}}));
    presented_module mixed(pmat::from_exact(q3, 0, {{r(3), r(3)}, {r(0), r(9)}}));
    CHECK(d.invariants().length() == mixed.invariants().length());
    CHECK(d.invariants() == mixed.invariants());
}

TEST_CASE("uncertified pivots fail loudly") {
    padic_tower q3(padic_base{3, 8});
    pmat m(q3, 0, 1, 1);
    elem x = q3.from_rational(mpq_class(7));
    elem z = x - x; // bound 8, above the default guard of 4: treated as zero
    m.at(0, 0) = z;
    CHECK(smith_normal_form(m).rank == 0);
    // dividing pushes the bound below the guard: neither zero nor pivotable
    m.at(0, 0) = z * q3.from_rational(mpq_class(1, pow_ui(3, 5)));
    CHECK_THROWS_AS(smith_normal_form(m), error);
    try {
        smith_normal_form(m);
    } catch (const error& e) {
        CHECK(e.code() == errc::precision_exhausted);
    }
}
