#pragma once

#include <gmpxx.h>

#include <utility>
#include <vector>

#include "ramify/errors.hpp"
#include "ramify/json.hpp"
#include "ramify/valuegroup.hpp"

namespace ramify {

/// The least g >= 0 with g + I contained in J, for cut ideals I >= J over a
/// rank-1 group. On canonical boundaries this is max(0, bJ - bI); when both
/// cuts are limit cuts with equal infima the gap is 0 by definition of the
/// denoted sets.
struct annihilator_gap {
    mpq_class value;
    bool attained; // whether g = value itself already maps I into J

    bool is_zero() const { return value == 0; }
};

/// Symbolic direct sum of quotients I/J of cut ideals over one rank-1 value
/// group. Models Omega-style modules in the defect calculus.
class cut_module {
public:
    struct summand {
        cut numerator;   // I
        cut denominator; // J, contained in I
    };

    explicit cut_module(std::vector<summand> summands) : summands_(std::move(summands)) {
        for (const auto& s : summands_) {
            require(s.numerator.group() == s.denominator.group(), errc::validation,
                    "cut module summand mixes value groups");
            require(s.numerator.group().rank() == 1, errc::validation,
                    "cut modules are rank-1 only");
            require(cut_contains(s.numerator, s.denominator), errc::validation,
                    "cut module summand violates containment I >= J");
        }
    }

    static cut_module zero() { return cut_module(std::vector<summand>{}); }
    static cut_module quotient(cut num, cut den) {
        return cut_module({summand{std::move(num), std::move(den)}});
    }

    const std::vector<summand>& summands() const { return summands_; }

    static annihilator_gap gap_of(const summand& s) {
        mpq_class diff = s.denominator.boundary1() - s.numerator.boundary1();
        if (diff < 0) diff = 0;
        // g + I <= J with g = diff is attained exactly when no strictness is
        // lost at the boundary: I open always suffices; I closed needs J
        // closed (or the summand to be trivially zero, I == J as sets).
        bool attained;
        if (!s.numerator.boundary_attained())
            attained = true;
        else
            attained = s.denominator.boundary_attained();
        return {diff, attained};
    }

    /// Largest annihilator gap across summands (0 for the zero module).
    annihilator_gap gap() const {
        annihilator_gap g{mpq_class(0), true};
        for (const auto& s : summands_) {
            annihilator_gap sg = gap_of(s);
            if (sg.value > g.value) g = sg;
        }
        return g;
    }

    /// Almost-zero test: IM = 0 for the maximal ideal I, i.e. every summand
    /// has annihilator gap 0.
    bool almost_zero() const {
        for (const auto& s : summands_)
            if (!gap_of(s).is_zero()) return false;
        return true;
    }

    /// Reported as the zero module: every summand has equal numerator and
    /// denominator cuts.
    bool is_zero() const {
        for (const auto& s : summands_)
            if (!cut_equal(s.numerator, s.denominator)) return false;
        return true;
    }

    json to_json() const {
        json arr = json::array();
        for (const auto& s : summands_) {
            annihilator_gap g = gap_of(s);
            arr.push_back(json{{"numerator", s.numerator.to_json()["cut"]},
                               {"denominator", s.denominator.to_json()["cut"]},
                               {"gap", rat_to_json(g.value)}});
        }
        return json{{"summands", arr},
                    {"gap", rat_to_json(gap().value)},
                    {"almost_zero", almost_zero()},
                    {"zero", is_zero()}};
    }

private:
    std::vector<summand> summands_;
};

/// The ramification ideal of a decreasing value sequence with declared
/// infimum sigma >= 0: the cut generated upward by the sequence.
inline cut ramification_ideal(const std::vector<mpq_class>& seq, const mpq_class& infimum,
                              bool attained, const value_group& g) {
    require(g.rank() == 1, errc::validation, "ramification ideal requires a rank-1 group");
    require(infimum >= 0, errc::validation, "ramification ideal needs infimum >= 0");
    for (const auto& t : seq)
        require(t > 0, errc::validation, "ramification sequence values must be positive");
    if (attained && !seq.empty() && seq.back() == infimum)
        return cut::closed_at(g, infimum);
    if (attained) {
        // A declared-attained infimum must actually appear in the data.
        fail(errc::inconsistent_infimum,
             "infimum declared attained but not reached by the sequence");
    }
    return cut::limit(g, seq, infimum, false);
}

enum class defect_kind { independent, dependent };

struct defect_report {
    defect_kind verdict;
    cut ideal;       // I
    cut ideal_power; // I^p
    cut_module omega; // I / I^p
};

/// Classification of a symbolic defect datum: independent iff I^p = I,
/// equivalently iff Omega = I/I^p is (almost) zero.
inline defect_report defect_classify(const std::vector<mpq_class>& seq,
                                     const mpq_class& infimum, bool attained,
                                     unsigned long p, const value_group& g) {
    cut ideal = ramification_ideal(seq, infimum, attained, g);
    cut power = cut_power(ideal, p);
    bool independent = cut_equal(power, ideal);
    cut_module omega = independent ? cut_module::zero() : cut_module::quotient(ideal, power);
    return {independent ? defect_kind::independent : defect_kind::dependent,
            std::move(ideal), std::move(power), std::move(omega)};
}

/// Problem documents look like
/// {"p": 3, "sequence": {"terms": [[4,3],[10,9]], "infimum": [1,1], "attained": false}}.
struct defect_problem {
    unsigned long p;
    std::vector<mpq_class> terms;
    mpq_class infimum;
    bool attained;

    static defect_problem from_json(const json& j) {
        defect_problem pb;
        require(j.contains("p") && j.contains("sequence"), errc::validation,
                "defect problem needs p and sequence");
        pb.p = j["p"].get<unsigned long>();
        require(pb.p >= 2, errc::validation, "defect problem needs a prime p >= 2");
        const json& s = j["sequence"];
        for (const auto& t : s.at("terms")) pb.terms.push_back(rat_from_json(t));
        pb.infimum = rat_from_json(s.at("infimum"));
        pb.attained = s.at("attained").get<bool>();
        return pb;
    }

    defect_report classify() const {
        return defect_classify(terms, infimum, attained, p, value_group::p_div(p));
    }
};

inline json defect_report_to_json(const defect_report& r) {
    annihilator_gap g = r.omega.gap();
    return json{{"verdict", r.verdict == defect_kind::independent ? "Independent" : "Dependent"},
                {"omega_zero", r.omega.is_zero()},
                {"gap", rat_to_json(g.value)},
                {"ideal", r.ideal.to_json()["cut"]},
                {"ideal_power", r.ideal_power.to_json()["cut"]},
                {"omega", r.omega.to_json()}};
}

} // namespace ramify
