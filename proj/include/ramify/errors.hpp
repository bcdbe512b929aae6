#pragma once

#include <stdexcept>
#include <string>

namespace ramify {

enum class errc {
    validation,
    non_eisenstein,
    not_unramified,
    precision_exhausted,
    division_by_zero_at_precision,
    singular_gram,
    undecidable,
    inconsistent_infimum,
    tower_mismatch,
    recipe_reducible,
    unsupported_recipe,
};

/// Library-wide exception. `code()` distinguishes the failure class so the
/// CLI can map it to an exit status.
class error : public std::runtime_error {
public:
    error(errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
    errc code() const { return code_; }

private:
    errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& what) { throw error(code, what); }

inline void require(bool cond, errc code, const std::string& what) {
    if (!cond) fail(code, what);
}

} // namespace ramify
