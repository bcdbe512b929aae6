#pragma once

#include <fstream>
#include <map>
#include <string>

#include "ramify/errors.hpp"
#include "ramify/json.hpp"
#include "ramify/rational.hpp"

namespace ramify {

enum class output_mode { json_mode, csv_mode, pretty_mode };

/// Effective run configuration. Precedence: flags > config file > defaults;
/// the result is echoed into every report header.
struct run_config {
    long precision = 32;
    mpq_class threshold = mpq_class(1, 4);
    mpz_class budget = mpz_class(1000000);
    output_mode output = output_mode::json_mode;

    void validate() const {
        require(precision >= 8, errc::validation, "precision must be at least 8");
        require(threshold > 0, errc::validation, "threshold must be positive");
        require(budget > 0, errc::validation, "budget must be positive");
    }

    const char* output_name() const {
        switch (output) {
        case output_mode::json_mode: return "json";
        case output_mode::csv_mode: return "csv";
        case output_mode::pretty_mode: return "pretty";
        }
        return "?";
    }

    json to_json() const {
        return json{{"precision", precision},
                    {"threshold", rat_to_json(threshold)},
                    {"budget", mpz_to_json(budget)},
                    {"output", output_name()}};
    }

    std::string csv_header() const {
        return "# config precision=" + std::to_string(precision) + " threshold=" +
               threshold.get_num().get_str() + "/" + threshold.get_den().get_str() +
               " budget=" + budget.get_str() + "\n";
    }
};

/// Flat key=value config files; '#' starts a comment.
inline std::map<std::string, std::string> parse_config_file(const std::string& path) {
    std::ifstream in(path);
    require(in.good(), errc::validation, "cannot open config file '" + path + "'");
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        auto last = line.find_last_not_of(" \t\r");
        line = line.substr(first, last - first + 1);
        auto eq = line.find('=');
        require(eq != std::string::npos, errc::validation,
                "config line is not key=value: '" + line + "'");
        kv[line.substr(0, eq)] = line.substr(eq + 1);
    }
    return kv;
}

inline void apply_config_entry(run_config& cfg, const std::string& key,
                               const std::string& value) {
    if (key == "precision")
        cfg.precision = std::stol(value);
    else if (key == "threshold")
        cfg.threshold = parse_rational(value);
    else if (key == "budget")
        cfg.budget = mpz_class(value);
    else if (key == "output") {
        if (value == "json")
            cfg.output = output_mode::json_mode;
        else if (value == "csv")
            cfg.output = output_mode::csv_mode;
        else if (value == "pretty")
            cfg.output = output_mode::pretty_mode;
        else
            fail(errc::validation, "unknown output mode '" + value + "'");
    } else
        fail(errc::validation, "unknown config key '" + key + "'");
}

} // namespace ramify
