#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>

#include <json.hpp>

#include "ramify/errors.hpp"
#include "ramify/rational.hpp"

namespace ramify {

// Reports must be byte-deterministic, so we keep insertion order everywhere.
using json = nlohmann::ordered_json;

/// Integers that fit in 64 bits are emitted as JSON numbers; anything larger
/// becomes a decimal string so nothing is ever rounded.
inline json mpz_to_json(const mpz_class& z) {
    if (z.fits_slong_p()) return json(static_cast<std::int64_t>(z.get_si()));
    return json(z.get_str());
}

inline mpz_class mpz_from_json(const json& j) {
    if (j.is_number_integer()) return mpz_class(static_cast<long>(j.get<std::int64_t>()));
    if (j.is_string()) return mpz_class(j.get<std::string>());
    fail(errc::validation, "expected integer or decimal string, got " + j.dump());
}

/// Exact rationals travel as [num, den] pairs.
inline json rat_to_json(const mpq_class& q) {
    return json::array({mpz_to_json(q.get_num()), mpz_to_json(q.get_den())});
}

inline mpq_class rat_from_json(const json& j) {
    require(j.is_array() && j.size() == 2, errc::validation,
            "expected [num, den] pair, got " + j.dump());
    return mpq_from_pair(mpz_from_json(j[0]), mpz_from_json(j[1]));
}

} // namespace ramify
