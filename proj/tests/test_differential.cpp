#include <catch2/catch_amalgamated.hpp>

#include "ramify/differential.hpp"

using namespace ramify;

namespace {

exact_poly xx_minus(long c) {
    return {exact_elem::rational(c), exact_elem::rational(0), exact_elem::rational(1)};
}

padic_tower sqrt2_over(unsigned long p) {
    padic_tower q(padic_base{p, 32});
    return q.extend(xx_minus(-2), p == 3 ? step_kind::unramified : step_kind::eisenstein);
}

} // namespace

TEST_CASE("trace data of Q3(sqrt 2) on the power basis") {
    padic_tower t = sqrt2_over(3);
    trace_data td = make_trace_data(t, 0);
    // Tr(1) = 2, Tr(theta) = 0, Tr(theta^2) = Tr(2) = 4
    CHECK(congruent(td.gram.at(0, 0), t.from_rational(2, 0), 20));
    CHECK(td.gram.at(0, 1).zero_at_precision());
    CHECK(congruent(td.gram.at(1, 1), t.from_rational(4, 0), 20));
    // dual basis {1/2, theta/4}
    CHECK(congruent(td.dual_basis[0], t.from_rational(mpq_class(1, 2)), 20));
    elem expected = t.top_generator() * t.from_rational(mpq_class(1, 4));
    CHECK(congruent(td.dual_basis[1], expected, 20));
    CHECK(td.orthogonality_certified);
    CHECK(td.discriminant_valuation == 0); // det = 8, a unit in Z_3
    CHECK(td.denominator_clearing_power == 0);
}

TEST_CASE("trace data of a degree-1 step") {
    padic_tower q3(padic_base{3, 32});
    padic_tower t = q3.extend({exact_elem::rational(-3), exact_elem::rational(1)},
                              step_kind::eisenstein);
    trace_data td = make_trace_data(t, 0);
    REQUIRE(td.basis.size() == 1);
    CHECK(congruent(td.gram.at(0, 0), t.from_rational(1, 0), 20));
    CHECK(congruent(td.dual_basis[0], t.one(), 20));
}

TEST_CASE("trace data of Q2(sqrt 2): discriminant valuation 3") {
    padic_tower t = sqrt2_over(2);
    trace_data td = make_trace_data(t, 0);
    CHECK(td.discriminant_valuation == 3); // v(8)
    CHECK(td.orthogonality_certified);
    CHECK(td.denominator_clearing_power == 2); // dual contains theta/4, v = -3/2
}

TEST_CASE("step differents by both methods") {
    // Q_p(zeta_p)/Q_p: v(delta) = (p-2)/(p-1)
    for (unsigned long p : {3ul, 5ul}) {
        padic_tower t = make_cyclotomic(p, 1, 32);
        different_entry e = different_step(t, 0, true);
        CHECK(e.value == mpq_class(p - 2, p - 1));
        CHECK(e.cross_check_agrees);
    }
    // Q5(sqrt 5) tame: 1/2; Q2(sqrt 2) wild: 3/2
    padic_tower q5(padic_base{5, 32});
    padic_tower t5 = q5.extend(xx_minus(-5), step_kind::eisenstein);
    CHECK(different_step(t5, 0, true).value == mpq_class(1, 2));
    padic_tower t2 = sqrt2_over(2);
    different_entry e2 = different_step(t2, 0, true);
    CHECK(e2.value == mpq_class(3, 2));
    CHECK(e2.cross_check_agrees);
    // unramified steps are etale: v(delta) = 0
    CHECK(different_step(sqrt2_over(3), 0, true).value == 0);
}

TEST_CASE("transitivity across the 2-adic radical tower") {
    padic_tower q2(padic_base{2, 32});
    padic_tower t1 = q2.extend(xx_minus(-2), step_kind::eisenstein);
    exact_poly step2{detail::neg_theta(2), exact_elem::rational(0), exact_elem::rational(1)};
    padic_tower t = t1.extend(step2, step_kind::eisenstein);
    different_report r = different_tower(t, true);
    REQUIRE(r.steps.size() == 2);
    CHECK(r.steps[0].value == mpq_class(3, 2));
    CHECK(r.steps[1].value == mpq_class(5, 4));
    CHECK(r.total == mpq_class(11, 4));
    CHECK(r.all_agree);

    // single-step presentation x^4 - 2 gives the same total
    exact_poly quartic{exact_elem::rational(-2), exact_elem::rational(0),
                       exact_elem::rational(0), exact_elem::rational(0),
                       exact_elem::rational(1)};
    padic_tower single = q2.extend(quartic, step_kind::eisenstein);
    CHECK(different_tower(single, true).total == mpq_class(11, 4));
}

TEST_CASE("tower of two unramified steps has zero different") {
    padic_tower u = make_unramified(3, 2, 32);
    different_report r = different_tower(u, true);
    CHECK(r.total == 0);
    CHECK(r.all_agree);
}

TEST_CASE("cyclotomic tower total: Q3(zeta_9)/Q3 = 3/2") {
    padic_tower t = make_cyclotomic(3, 2, 32);
    different_report r = different_tower(t, true);
    CHECK(r.total == mpq_class(3, 2)); // 2 - 1/(3-1)
    CHECK(r.all_agree);
}

TEST_CASE("omega presentations") {
    // unramified: zero module
    omega_presentation ou = omega_step(sqrt2_over(3), 0);
    CHECK(ou.zero);
    CHECK(ou.invariants.length() == 0);

    // Q3(zeta_3): nonzero cyclic with v(delta) = 1/2
    padic_tower t = make_cyclotomic(3, 1, 32);
    omega_presentation o = omega_step(t, 0);
    CHECK_FALSE(o.zero);
    CHECK(o.v_delta == mpq_class(1, 2));
    // length of O_L/(delta) over the base equals deg * v(delta)
    CHECK(o.invariants.length() == 1);
    CHECK(o.invariants.free_rank == 0);

    // discrete counterexample: M = Q5(sqrt 5) over L = Q5, q = 2 tame, omega nonzero
    padic_tower q5(padic_base{5, 32});
    padic_tower m = q5.extend(xx_minus(-5), step_kind::eisenstein);
    omega_presentation oc = omega_step(m, 0);
    CHECK_FALSE(oc.zero);
    CHECK(oc.v_delta == mpq_class(1, 2)); // (q-1)/q

    // tower omega: additivity shadow
    padic_tower t9 = make_cyclotomic(3, 2, 32);
    auto [parts, rep] = omega_tower(t9);
    REQUIRE(parts.size() == 2);
    CHECK(rep.additivity_checked);
    CHECK(rep.total == mpq_class(3, 2));
}

TEST_CASE("tensor square model") {
    padic_tower t = sqrt2_over(2);
    tensor_square ts(t, 0);

    // mu kills the diagonal generator
    CHECK(ts.mu(ts.diagonal_generator()).zero_at_precision());

    // mu(g) = g(theta) for assorted g
    elem theta = t.top_generator();
    for (long c0 : {1, 3, -2})
        for (long c1 : {0, 2, 7}) {
            typename tensor_square<padic_base>::element g{
                t.from_rational(c0), t.from_rational(c1)};
            elem expected = t.from_rational(c0) + t.from_rational(c1) * theta;
            CHECK(congruent(ts.mu(g), expected, 20));
        }

    // h(theta) = f'(theta)
    CHECK(congruent(ts.cofactor_at_theta(), derivative_at_generator(t, 0), 20));

    // J/J^2 invariants match the omega invariants
    CHECK(jj2_invariants(t, 0) == omega_step(t, 0).invariants);
}

TEST_CASE("idempotent in the unramified case") {
    padic_tower t = sqrt2_over(3);
    idempotent_report rep = idempotent(t, 0);
    REQUIRE(rep.etale);
    REQUIRE(rep.idempotent.has_value());
    CHECK(rep.laws_certified);
    // e = (x + theta)/(2 theta) = (theta x + 2)/4
    const auto& e = *rep.idempotent;
    CHECK(congruent(e[0], t.from_rational(mpq_class(1, 2)), 20));
    elem expected1 = t.top_generator() * t.from_rational(mpq_class(1, 4));
    CHECK(congruent(e[1], expected1, 20));
}

TEST_CASE("epsilon threshold in the ramified case") {
    padic_tower t = sqrt2_over(2);
    idempotent_report rep = idempotent(t, 0);
    REQUIRE_FALSE(rep.etale);
    REQUIRE(rep.threshold.has_value());
    CHECK(rep.threshold->v_delta == mpq_class(3, 2));
    CHECK(rep.threshold->at_valuation == mpq_class(3, 2));
    CHECK(rep.threshold->below_valuation == mpq_class(1));

    // the paper's scan: eps = 4 admits, eps = 2 does not
    tensor_square ts(t, 0);
    CHECK(epsilon_idempotent_integral(ts, t.from_rational(4)));
    CHECK_FALSE(epsilon_idempotent_integral(ts, t.from_rational(2)));
}

TEST_CASE("degree-1 step idempotent is 1") {
    padic_tower q3(padic_base{3, 32});
    padic_tower t = q3.extend({exact_elem::rational(-3), exact_elem::rational(1)},
                              step_kind::eisenstein);
    idempotent_report rep = idempotent(t, 0);
    REQUIRE(rep.etale);
    CHECK(rep.laws_certified);
    CHECK(congruent((*rep.idempotent)[0], t.one(), 20));
}

TEST_CASE("omega zero iff v(delta)=0 iff exact idempotent, across a small corpus") {
    std::vector<padic_tower> corpus;
    corpus.push_back(sqrt2_over(3));
    corpus.push_back(sqrt2_over(2));
    corpus.push_back(make_cyclotomic(3, 1, 32));
    corpus.push_back(make_cyclotomic(5, 1, 32));
    corpus.push_back(make_p_radical(3, 1, 32));
    corpus.push_back(make_unramified(5, 1, 32));
    for (const auto& t : corpus)
        for (std::size_t s = 0; s < t.levels(); ++s) {
            omega_presentation o = omega_step(t, s);
            idempotent_report rep = idempotent(t, s);
            CHECK(o.zero == (o.v_delta == 0));
            CHECK(o.zero == rep.etale);
            if (rep.etale) CHECK(rep.laws_certified);
            CHECK(jj2_invariants(t, s) == o.invariants);
        }
}
