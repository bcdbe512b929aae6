#include <catch2/catch_amalgamated.hpp>

#include "ramify/scalar_laurent.hpp"
#include "ramify/scalar_padic.hpp"

using namespace ramify;

TEST_CASE("padic valuation of integers and rationals") {
    padic_base b{3, 32};
    CHECK(b.from_rational(9).valuation().value == 2);
    CHECK(b.from_rational(mpq_class(1, 3)).valuation().value == -1);
    CHECK(b.from_rational(mpq_class(10, 7)).valuation().value == 0);
    CHECK_FALSE(b.from_rational(0).valuation().exact);
    CHECK(b.from_rational(0).valuation().value == 32);
}

TEST_CASE("padic ring laws at precision") {
    padic_base b{3, 5};
    padic_scalar x = b.from_rational(1 + 3);
    padic_scalar y = b.from_rational(1 - 3);
    padic_scalar prod = x * y;
    CHECK(prod.precision() == 5);
    CHECK(congruent(prod, b.from_rational(1 - 9), 5));

    // v(xy) = v(x) + v(y), v(x+y) >= min with equality when distinct
    padic_base b32{3, 32};
    long seeds[] = {2, 5, 7, 12, 45, 81, 90};
    for (long i : seeds)
        for (long j : seeds) {
            padic_scalar u = b32.from_rational(mpq_class(i, 7));
            padic_scalar v = b32.from_rational(mpq_class(j * 3, 5));
            CHECK((u * v).valuation().value ==
                  u.valuation().value + v.valuation().value);
            valuation_t s = (u + v).valuation();
            mpq_class m = std::min(u.valuation().value, v.valuation().value);
            CHECK(s.value >= m);
            if (u.valuation().value != v.valuation().value) CHECK(s.value == m);
        }
}

TEST_CASE("padic cancellation reports a precision bound, not a number") {
    padic_base b{3, 32};
    padic_scalar x = b.from_rational(mpq_class(22, 7));
    padic_scalar z = x + (-x);
    CHECK(z.zero_at_precision());
    valuation_t v = z.valuation();
    CHECK_FALSE(v.exact);
    CHECK(v.value == 32);
}

TEST_CASE("padic inversion") {
    padic_base b{2, 32};
    padic_scalar x = b.from_rational(mpq_class(7, 5));
    CHECK(congruent(x * x.inv(), b.one(), 30));

    padic_scalar y = b.from_rational(4); // v = 2
    padic_scalar yi = y.inv();
    CHECK(yi.valuation().value == -2);
    CHECK(yi.precision() == 32 - 4);

    CHECK_THROWS_AS(b.zero().inv(), error);
    try {
        b.zero().inv();
    } catch (const error& e) {
        CHECK(e.code() == errc::division_by_zero_at_precision);
    }
}

TEST_CASE("padic precision propagation through multiplication") {
    padic_base b{5, 10};
    padic_scalar x = b.from_rational(5);        // v=1, prec 10
    padic_scalar y = b.from_rational(mpq_class(1, 25)); // v=-2, prec 10
    padic_scalar z = x * y;
    CHECK(z.valuation().value == -1);
    CHECK(z.precision() == std::min(10 + (-2), 10 + 1));
}

TEST_CASE("padic representative round trips") {
    padic_base b{3, 20};
    for (long n : {1, 2, 7, -5, 81, 22}) {
        mpq_class q(n, 7);
        padic_scalar s = b.from_rational(q);
        padic_scalar back = b.from_exact(s.representative());
        CHECK(congruent(s, back, 20));
    }
}

TEST_CASE("raising precision never changes certified digits") {
    padic_base lo{3, 16}, hi{3, 40};
    mpq_class q(17, 11);
    padic_scalar a = lo.from_rational(q);
    padic_scalar c = hi.from_rational(q).truncated(16);
    CHECK(congruent(a, c, 16));
}

TEST_CASE("laurent basics") {
    laurent_base b{3, 16};
    laurent_scalar t = b.uniformizer();
    CHECK(t.valuation().value == 1);
    laurent_scalar x = b.one() + t;          // 1 + t
    laurent_scalar y = x * x;                // 1 + 2t + t^2
    CHECK(y.valuation().value == 0);
    laurent_scalar probe = y - b.one() - t - t - t * t;
    CHECK(probe.zero_at_precision());

    laurent_scalar xi = x.inv();
    CHECK((x * xi - b.one()).zero_at_precision());

    // char p: integer 3 is zero
    CHECK(b.from_rational(3).zero_at_precision());
    CHECK(b.from_rational(mpq_class(4, 5)).valuation().value == 0);
    CHECK_THROWS_AS(b.from_rational(mpq_class(1, 3)), error);
}

TEST_CASE("laurent negative exponents and exact terms") {
    laurent_base b{5, 12};
    exact_scalar e = exact_scalar::t_terms({{2, -3}, {1, 0}, {4, 2}});
    laurent_scalar s = b.from_exact(e);
    CHECK(s.valuation().value == -3);
    laurent_scalar back = b.from_exact(s.representative());
    CHECK((s - back).zero_at_precision());

    laurent_scalar si = s.inv();
    CHECK((s * si - b.one()).zero_at_precision());
    CHECK(si.valuation().value == 3);
}
