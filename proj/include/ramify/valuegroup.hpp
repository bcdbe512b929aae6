#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "ramify/errors.hpp"
#include "ramify/json.hpp"
#include "ramify/rational.hpp"

namespace ramify {

/// Per-coordinate divisibility of a representable value group.
enum class coord_div {
    integers,      // Z
    p_divisible,   // Z[1/p]
    full_rationals // Q
};

/// Finite-rank lex product of Z, Z[1/p] and Q factors. Elements are rational
/// tuples whose i-th denominator is allowed by the i-th tag; comparison is
/// lexicographic. Immutable after construction.
class value_group {
public:
    struct factor {
        coord_div div;
        unsigned long p = 0; // prime, only for p_divisible
    };

    explicit value_group(std::vector<factor> factors) : factors_(std::move(factors)) {
        require(!factors_.empty(), errc::validation, "value group needs rank >= 1");
        for (const auto& f : factors_)
            if (f.div == coord_div::p_divisible)
                require(f.p >= 2, errc::validation, "p-divisible coordinate needs a prime");
    }

    static value_group integers() { return value_group({{coord_div::integers, 0}}); }
    static value_group p_div(unsigned long p) { return value_group({{coord_div::p_divisible, p}}); }
    static value_group rationals() { return value_group({{coord_div::full_rationals, 0}}); }

    std::size_t rank() const { return factors_.size(); }
    const std::vector<factor>& factors() const { return factors_; }

    bool admits(std::size_t i, const mpq_class& x) const {
        const factor& f = factors_.at(i);
        switch (f.div) {
        case coord_div::integers: return x.get_den() == 1;
        case coord_div::p_divisible: {
            mpz_class den = x.get_den();
            while (den != 1 && mpz_divisible_ui_p(den.get_mpz_t(), f.p))
                mpz_divexact_ui(den.get_mpz_t(), den.get_mpz_t(), f.p);
            return den == 1;
        }
        case coord_div::full_rationals: return true;
        }
        return false;
    }

    void validate_element(const std::vector<mpq_class>& x) const {
        require(x.size() == rank(), errc::validation, "element arity does not match group rank");
        for (std::size_t i = 0; i < x.size(); ++i)
            require(admits(i, x[i]), errc::validation,
                    "coordinate " + std::to_string(i) + " denominator not admitted");
    }

    /// Lexicographic comparison; returns <0, 0 or >0.
    static int cmp(const std::vector<mpq_class>& a, const std::vector<mpq_class>& b) {
        for (std::size_t i = 0; i < a.size(); ++i) {
            int c = ::cmp(a[i], b[i]);
            if (c != 0) return c;
        }
        return 0;
    }

    bool operator==(const value_group& o) const {
        if (factors_.size() != o.factors_.size()) return false;
        for (std::size_t i = 0; i < factors_.size(); ++i)
            if (factors_[i].div != o.factors_[i].div || factors_[i].p != o.factors_[i].p)
                return false;
        return true;
    }

    json to_json() const {
        json div = json::array();
        for (const auto& f : factors_) {
            switch (f.div) {
            case coord_div::integers: div.push_back("Z"); break;
            case coord_div::p_divisible: div.push_back("Z[1/" + std::to_string(f.p) + "]"); break;
            case coord_div::full_rationals: div.push_back("Q"); break;
            }
        }
        return json{{"rank", rank()}, {"divisibility", div}};
    }

    /// Parses the factor grammar used by the CLI: "Z", "Z[1/3]", "Q",
    /// lex products joined with 'x', e.g. "Z[1/3]xZ".
    static value_group parse(const std::string& spec) {
        std::vector<factor> fs;
        std::size_t pos = 0;
        while (pos < spec.size()) {
            std::size_t next = spec.find('x', pos);
            std::string tok = spec.substr(pos, next == std::string::npos ? next : next - pos);
            if (tok == "Z")
                fs.push_back({coord_div::integers, 0});
            else if (tok == "Q")
                fs.push_back({coord_div::full_rationals, 0});
            else if (tok.rfind("Z[1/", 0) == 0 && tok.back() == ']') {
                unsigned long p = std::stoul(tok.substr(4, tok.size() - 5));
                fs.push_back({coord_div::p_divisible, p});
            } else
                fail(errc::validation, "cannot parse group factor '" + tok + "'");
            if (next == std::string::npos) break;
            pos = next + 1;
        }
        return value_group(std::move(fs));
    }

private:
    std::vector<factor> factors_;
};

/// One convex subgroup of a lex group: the coordinate-suffix subgroup whose
/// first `zero_prefix` coordinates vanish. zero_prefix == rank is {0},
/// zero_prefix == 0 is the whole group.
struct convex_subgroup {
    std::size_t zero_prefix;
};

/// Full chain of convex subgroups, smallest first: {0} = suffix(k) up to
/// G = suffix(0); length rank+1.
inline std::vector<convex_subgroup> convex_subgroups(const value_group& g) {
    std::vector<convex_subgroup> chain;
    for (std::size_t i = g.rank() + 1; i-- > 0;) chain.push_back({i});
    return chain;
}

/// Value-group half of the deeply-ramified criterion: no quotient of
/// consecutive convex subgroups is isomorphic to Z. Consecutive quotients of
/// a lex product are the coordinate factors, so this reduces to the tags.
inline bool dr_valuegroup_condition(const value_group& g) {
    for (const auto& f : g.factors())
        if (f.div == coord_div::integers) return false;
    return true;
}

enum class cut_kind { principal_closed, principal_open, limit };

/// An upward-closed subset of the non-negative part of a value group; the
/// symbolic form of an ideal of the valuation ring. Construction
/// canonicalizes:
///  - a limit cut whose declared infimum is attained by its sequence becomes
///    principal-closed at the infimum,
///  - an unattained limit cut denotes {x > inf} and compares equal to
///    principal-open at the infimum (the generator sequence is kept as
///    provenance).
/// Limit cuts require rank 1. All values are immutable after construction.
class cut {
public:
    static cut principal_closed(value_group g, std::vector<mpq_class> boundary) {
        g.validate_element(boundary);
        return cut(std::move(g), cut_kind::principal_closed, std::move(boundary), {});
    }

    static cut principal_open(value_group g, std::vector<mpq_class> boundary) {
        g.validate_element(boundary);
        return cut(std::move(g), cut_kind::principal_open, std::move(boundary), {});
    }

    // rank-1 convenience constructors
    static cut closed_at(value_group g, mpq_class b) {
        return principal_closed(std::move(g), {std::move(b)});
    }
    static cut open_at(value_group g, mpq_class b) {
        return principal_open(std::move(g), {std::move(b)});
    }

    /// Limit cut from a strictly decreasing sequence with a declared infimum.
    /// The tool never infers limits: the infimum must be stated, and the
    /// sequence is only checked for consistency against it.
    static cut limit(value_group g, std::vector<mpq_class> seq, mpq_class infimum,
                     bool attained) {
        require(g.rank() == 1, errc::validation, "limit cuts require a rank-1 group");
        require(!seq.empty(), errc::validation, "limit cut needs a nonempty sequence");
        for (const auto& t : seq) g.validate_element({t});
        g.validate_element({infimum});
        for (std::size_t i = 0; i + 1 < seq.size(); ++i)
            require(seq[i] > seq[i + 1], errc::inconsistent_infimum,
                    "limit sequence must be strictly decreasing");
        for (const auto& t : seq)
            require(t >= infimum, errc::inconsistent_infimum,
                    "limit sequence drops below its declared infimum");
        if (attained)
            require(seq.back() == infimum, errc::inconsistent_infimum,
                    "infimum declared attained but not reached by the sequence");
        else
            require(seq.back() > infimum, errc::inconsistent_infimum,
                    "infimum declared unattained but the sequence reaches it");
        if (attained) {
            cut c(std::move(g), cut_kind::principal_closed, {infimum}, std::move(seq));
            return c;
        }
        return cut(std::move(g), cut_kind::limit, {std::move(infimum)}, std::move(seq));
    }

    const value_group& group() const { return group_; }
    cut_kind kind() const { return kind_; }
    const std::vector<mpq_class>& boundary() const { return boundary_; }
    const mpq_class& boundary1() const { return boundary_.at(0); }
    const std::vector<mpq_class>& sequence() const { return sequence_; }

    /// Whether the boundary value itself belongs to the denoted set.
    bool boundary_attained() const { return kind_ == cut_kind::principal_closed; }

    /// Membership of a group element in the denoted upward-closed set.
    bool contains(const std::vector<mpq_class>& x) const {
        group_.validate_element(x);
        int c = value_group::cmp(x, boundary_);
        if (c > 0) return true;
        if (c < 0) return false;
        return boundary_attained();
    }

    json to_json() const {
        json j = group_.to_json();
        json c;
        switch (kind_) {
        case cut_kind::principal_closed: c["kind"] = "principal-closed"; break;
        case cut_kind::principal_open: c["kind"] = "principal-open"; break;
        case cut_kind::limit: c["kind"] = "limit"; break;
        }
        if (group_.rank() == 1)
            c["boundary"] = rat_to_json(boundary_[0]);
        else {
            json b = json::array();
            for (const auto& q : boundary_) b.push_back(rat_to_json(q));
            c["boundary"] = b;
        }
        if (!sequence_.empty()) {
            json terms = json::array();
            for (const auto& q : sequence_) terms.push_back(rat_to_json(q));
            c["sequence"] = json{{"terms", terms},
                                 {"infimum", rat_to_json(boundary_[0])},
                                 {"attained", kind_ == cut_kind::principal_closed}};
        }
        j["cut"] = c;
        return j;
    }

private:
    cut(value_group g, cut_kind k, std::vector<mpq_class> b, std::vector<mpq_class> seq)
        : group_(std::move(g)), kind_(k), boundary_(std::move(b)), sequence_(std::move(seq)) {}

    value_group group_;
    cut_kind kind_;
    std::vector<mpq_class> boundary_;
    std::vector<mpq_class> sequence_; // provenance only; not used by predicates
};

/// The cut of the m-th ideal power: every boundary datum scaled by m.
inline cut cut_power(const cut& c, unsigned long m) {
    require(m >= 1, errc::validation, "cut_power needs m >= 1");
    if (c.kind() == cut_kind::limit)
        require(c.group().rank() == 1, errc::validation, "limit cut_power requires rank 1");
    std::vector<mpq_class> b;
    b.reserve(c.boundary().size());
    for (const auto& q : c.boundary()) b.push_back(q * static_cast<long>(m));
    switch (c.kind()) {
    case cut_kind::principal_closed: return cut::principal_closed(c.group(), std::move(b));
    case cut_kind::principal_open: return cut::principal_open(c.group(), std::move(b));
    case cut_kind::limit: {
        std::vector<mpq_class> seq;
        seq.reserve(c.sequence().size());
        for (const auto& q : c.sequence()) seq.push_back(q * static_cast<long>(m));
        return cut::limit(c.group(), std::move(seq), std::move(b[0]), false);
    }
    }
    fail(errc::validation, "unreachable cut kind");
}

/// Equality of the denoted sets, decided on canonical forms. An unattained
/// limit cut denotes the same set as principal-open at its infimum. Cuts over
/// distinct groups are not comparable; that case raises Undecidable rather
/// than guessing.
inline bool cut_equal(const cut& a, const cut& b) {
    if (!(a.group() == b.group()))
        fail(errc::undecidable, "cuts over distinct value groups are not comparable");
    bool a_open = a.kind() != cut_kind::principal_closed;
    bool b_open = b.kind() != cut_kind::principal_closed;
    return a_open == b_open && value_group::cmp(a.boundary(), b.boundary()) == 0;
}

/// Ideal containment a >= b of the denoted sets (a contains b).
inline bool cut_contains(const cut& a, const cut& b) {
    if (!(a.group() == b.group()))
        fail(errc::undecidable, "cuts over distinct value groups are not comparable");
    int c = value_group::cmp(a.boundary(), b.boundary());
    if (c < 0) return true;
    if (c > 0) return false;
    return a.boundary_attained() || !b.boundary_attained();
}

/// Star functor on a cut ideal inside the fraction field:
/// {x : v(x) + g >= boundary for all g > 0}, i.e. the closed cut at the
/// boundary. Idempotent and extensive on canonical cuts.
inline cut star(const cut& c) {
    return cut::principal_closed(c.group(), c.boundary());
}

inline cut cut_from_json(const json& j) {
    require(j.contains("rank") && j.contains("divisibility") && j.contains("cut"),
            errc::validation, "cut document needs rank, divisibility, cut");
    std::vector<value_group::factor> fs;
    for (const auto& d : j["divisibility"]) {
        std::string s = d.get<std::string>();
        if (s == "Z")
            fs.push_back({coord_div::integers, 0});
        else if (s == "Q")
            fs.push_back({coord_div::full_rationals, 0});
        else if (s.rfind("Z[1/", 0) == 0 && s.back() == ']')
            fs.push_back({coord_div::p_divisible, std::stoul(s.substr(4, s.size() - 5))});
        else
            fail(errc::validation, "unknown divisibility tag '" + s + "'");
    }
    value_group g(std::move(fs));
    require(j["rank"].get<std::size_t>() == g.rank(), errc::validation,
            "rank does not match divisibility list");
    const json& c = j["cut"];
    std::string kind = c.at("kind").get<std::string>();
    auto read_boundary = [&]() {
        std::vector<mpq_class> b;
        if (g.rank() == 1)
            b.push_back(rat_from_json(c.at("boundary")));
        else
            for (const auto& q : c.at("boundary")) b.push_back(rat_from_json(q));
        return b;
    };
    if (kind == "principal-closed") return cut::principal_closed(g, read_boundary());
    if (kind == "principal-open") return cut::principal_open(g, read_boundary());
    if (kind == "limit") {
        const json& s = c.at("sequence");
        std::vector<mpq_class> terms;
        for (const auto& t : s.at("terms")) terms.push_back(rat_from_json(t));
        return cut::limit(g, std::move(terms), rat_from_json(s.at("infimum")),
                          s.at("attained").get<bool>());
    }
    fail(errc::validation, "unknown cut kind '" + kind + "'");
}

} // namespace ramify
