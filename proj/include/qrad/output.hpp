#pragma once

#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qrad/errors.hpp"

namespace qrad {

inline constexpr const char* version_string = "0.1.0";

/// CSV table assembled fully in memory; nothing touches the filesystem
/// until write(), so a failed run leaves no partial file behind. Header
/// lines carry the tool version, the scenario hash, and column units;
/// bodies are reproducible byte for byte unless a timestamp is requested.
class CsvWriter {
public:
    CsvWriter(std::string scenario_hash, std::string units, std::string stamp = "")
    {
        std::ostringstream os;
        os << "# qrad " << version_string << " | scenario=" << scenario_hash
           << " | units: " << units;
        if (!stamp.empty()) os << " | stamp=" << stamp;
        os << "\n";
        header_ = os.str();
    }

    void columns(const std::vector<std::string>& names)
    {
        for (std::size_t i = 0; i < names.size(); ++i) {
            if (i) body_ << ",";
            body_ << names[i];
        }
        body_ << "\n";
    }

    void row(const std::vector<double>& vals)
    {
        body_ << std::setprecision(17);
        for (std::size_t i = 0; i < vals.size(); ++i) {
            if (i) body_ << ",";
            body_ << vals[i];
        }
        body_ << "\n";
    }

    void raw_row(const std::string& line) { body_ << line << "\n"; }

    std::string str() const { return header_ + body_.str(); }

    void write(const std::string& path) const
    {
        std::ofstream out(path);
        if (!out) throw validation_error("cannot write output file: " + path);
        out << str();
    }

private:
    std::string header_;
    std::ostringstream body_;
};

/// Run manifest: one JSON per CLI invocation listing what was produced.
struct RunManifest {
    std::string subcommand;
    std::string scenario_hash;
    nlohmann::json config_snapshot;
    std::vector<std::string> outputs;
    double wall_seconds = 0.0;

    nlohmann::json to_json() const
    {
        return {{"subcommand", subcommand},
                {"scenario_hash", scenario_hash},
                {"config", config_snapshot},
                {"outputs", outputs},
                {"wall_seconds", wall_seconds},
                {"tool_version", version_string}};
    }
};

} // namespace qrad
