#pragma once

#include <gmpxx.h>

#include <utility>
#include <variant>
#include <vector>

#include "ramify/errors.hpp"
#include "ramify/json.hpp"

namespace ramify {

/// Precision-independent description of a base scalar: an exact rational for
/// p-adic bases, or a t-polynomial (list of (coefficient, exponent) terms)
/// for Laurent bases. Runtime scalars materialize from these at the tower's
/// working precision, and every runtime scalar can be snapshotted back.
struct exact_scalar {
    mpq_class rat;
    std::vector<std::pair<long, long>> tpoly; // (coeff, t-exponent) terms
    bool is_tpoly = false;

    static exact_scalar rational(mpq_class q) { return {std::move(q), {}, false}; }
    static exact_scalar t_terms(std::vector<std::pair<long, long>> terms) {
        return {mpq_class(0), std::move(terms), true};
    }

    json to_json() const {
        if (!is_tpoly) return rat_to_json(rat);
        json terms = json::array();
        for (const auto& [c, e] : tpoly) terms.push_back(json::array({c, e}));
        return json{{"t", terms}};
    }

    static exact_scalar from_json(const json& j) {
        if (j.is_object() && j.contains("t")) {
            std::vector<std::pair<long, long>> terms;
            for (const auto& t : j["t"]) {
                require(t.is_array() && t.size() == 2, errc::validation,
                        "t-polynomial term must be [coeff, exponent]");
                terms.emplace_back(t[0].get<long>(), t[1].get<long>());
            }
            return t_terms(std::move(terms));
        }
        return rational(rat_from_json(j));
    }

    bool operator==(const exact_scalar&) const = default;
};

/// Exact description of a tower element: a scalar at level 0, or the
/// coefficient vector of the power basis at higher levels. Step defining
/// polynomials are stored this way so a tower can be rebuilt at any
/// precision.
struct exact_elem {
    // leaf when coeffs empty
    exact_scalar leaf;
    std::vector<exact_elem> coeffs;

    static exact_elem scalar(exact_scalar s) { return {std::move(s), {}}; }
    static exact_elem rational(mpq_class q) {
        return scalar(exact_scalar::rational(std::move(q)));
    }
    static exact_elem t_terms(std::vector<std::pair<long, long>> terms) {
        return scalar(exact_scalar::t_terms(std::move(terms)));
    }
    static exact_elem vec(std::vector<exact_elem> cs) { return {exact_scalar{}, std::move(cs)}; }

    bool is_leaf() const { return coeffs.empty(); }

    json to_json() const {
        if (is_leaf()) return leaf.to_json();
        json arr = json::array();
        for (const auto& c : coeffs) arr.push_back(c.to_json());
        return arr;
    }

    /// A JSON coefficient is a [num, den] pair, a {"t": ...} object, or an
    /// array of coefficients (one per power of the previous generator).
    static exact_elem from_json(const json& j) {
        if (j.is_array() && j.size() == 2 && !j[0].is_array() && !j[0].is_object()) {
            return rational(rat_from_json(j));
        }
        if (j.is_object()) return scalar(exact_scalar::from_json(j));
        require(j.is_array(), errc::validation, "bad element encoding: " + j.dump());
        std::vector<exact_elem> cs;
        for (const auto& c : j) cs.push_back(from_json(c));
        return vec(std::move(cs));
    }

    bool operator==(const exact_elem&) const = default;
};

using exact_poly = std::vector<exact_elem>; // constant-first coefficients

} // namespace ramify
