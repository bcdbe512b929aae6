#pragma once

#include <utility>
#include <vector>

#include "ramify/errors.hpp"
#include "ramify/matrixops.hpp"
#include "ramify/tower.hpp"

namespace ramify {

namespace detail {

/// Multiplication in K[y]/(y^p - y - a), elements as coefficient vectors of
/// degree < p over the tower's top level.
template <class B>
std::vector<elem<B>> as_mulmod(const tower<B>& t, const std::vector<elem<B>>& x,
                               const std::vector<elem<B>>& y, const elem<B>& a,
                               unsigned long p) {
    std::vector<elem<B>> prod(2 * p - 1, t.zero());
    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = 0; j < p; ++j) prod[i + j] = prod[i + j] + x[i] * y[j];
    for (std::size_t k = prod.size(); k-- > p;) {
        // y^k = y^(k-p+1) + a y^(k-p)
        elem<B> lead = prod[k];
        prod[k - p + 1] = prod[k - p + 1] + lead;
        prod[k - p] = prod[k - p] + lead * a;
    }
    prod.resize(p);
    return prod;
}

} // namespace detail

template <class B>
struct artin_schreier_extension {
    tower<B> extended;
    elem<B> generator_image; // the Artin-Schreier root y in the new tower
};

/// Admits an Artin-Schreier step y^p - y - a with v(a) < 0 and the w-value of
/// a coprime to p, through the equivalent Eisenstein presentation generated
/// by the uniformizer z = pi^r y^s (minimal polynomial by characteristic
/// polynomial of the multiplication matrix).
template <class B>
artin_schreier_extension<B> extend_artin_schreier(const tower<B>& t, const exact_elem& a_exact) {
    unsigned long p = t.base().p;
    elem<B> a = t.from_exact(a_exact);
    valuation_t va = a.valuation();
    require(va.exact && va.value < 0, errc::validation,
            "Artin-Schreier right-hand side must have negative valuation");
    unsigned long e_abs = t.e();
    mpq_class mw_q = -va.value * static_cast<long>(e_abs);
    require(mw_q.get_den() == 1, errc::validation, "v(a) is outside the value group");
    mpz_class mw = mw_q.get_num();
    require(mpz_class(mw % p) != 0, errc::validation,
            "Artin-Schreier admission needs gcd(w(a), p) = 1");

    // z = pi^r y^s with r p - s w(a) = 1, 0 < s < p
    mpz_class s, r, g;
    mpz_class pz(p);
    mpz_gcdext(g.get_mpz_t(), r.get_mpz_t(), s.get_mpz_t(), pz.get_mpz_t(), mpz_class(-mw).get_mpz_t());
    require(g == 1, errc::validation, "no uniformizer substitution exists");
    // normalize s into (0, p)
    while (s <= 0) {
        s += p;
        r += mw;
    }
    while (s >= pz) {
        s -= p;
        r -= mw;
    }

    // multiplication-by-y companion matrix on 1, y, ..., y^(p-1)
    level_matrix<B> my(t, t.levels(), p, p);
    for (std::size_t i = 0; i + 1 < p; ++i) my.at(i + 1, i) = t.one();
    my.at(0, p - 1) = a;
    my.at(1, p - 1) = t.one();

    level_matrix<B> mz = level_matrix<B>::identity(t, t.levels(), p);
    for (mpz_class i = 0; i < s; ++i) mz = mz * my;
    elem<B> pir = t.uniformizer().pow(r);
    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = 0; j < p; ++j) mz.at(i, j) = mz.at(i, j) * pir;

    std::vector<elem<B>> cp = charpoly(mz);
    exact_poly poly;
    poly.reserve(cp.size());
    for (const auto& c : cp) poly.push_back(c.to_exact());
    tower<B> ext = t.extend(poly, step_kind::eisenstein);

    // express y in the z-power basis: solve (z^0 ... z^(p-1)) w = y
    std::vector<std::vector<elem<B>>> zpow;
    std::vector<elem<B>> zrep(p, t.zero());
    zrep[static_cast<std::size_t>(s.get_ui())] = pir;
    std::vector<elem<B>> acc(p, t.zero());
    acc[0] = t.one();
    for (std::size_t i = 0; i < p; ++i) {
        zpow.push_back(acc);
        if (i + 1 < p) acc = detail::as_mulmod(t, acc, zrep, a, p);
    }
    level_matrix<B> basis(t, t.levels(), p, p);
    for (std::size_t j = 0; j < p; ++j)
        for (std::size_t i = 0; i < p; ++i) basis.at(i, j) = zpow[j][i];
    std::vector<elem<B>> rhs(p, t.zero());
    rhs[1] = t.one();
    std::vector<elem<B>> w = solve_linear(basis, rhs);

    elem<B> z = ext.top_generator();
    elem<B> y = ext.zero();
    elem<B> zp = ext.one();
    for (std::size_t i = 0; i < p; ++i) {
        y = y + ext.embed(w[i]) * zp;
        if (i + 1 < p) zp = zp * z;
    }
    return {std::move(ext), std::move(y)};
}

} // namespace ramify
