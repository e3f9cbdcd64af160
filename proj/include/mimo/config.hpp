#pragma once

#include <optional>
#include <string>

#include "mimo/sim.hpp"

namespace mimo {

/// Command-line overrides applied on top of the config file.
struct ConfigOverrides {
    std::optional<std::string> snr;
    std::optional<std::uint64_t> seed;
    std::optional<int> nc;
    std::optional<std::string> detector;
    int threads = 0;
};

/// Parse a "key = value" config file ('#' comments, blank lines ignored),
/// apply overrides, and validate for the given tool. Unknown keys and missing
/// required fields raise std::invalid_argument naming the key.
SimConfig load_config(const std::string& path, const ConfigOverrides& ov, const std::string& tool);

/// Same, but from config text already in memory (path used in messages).
SimConfig parse_config_text(const std::string& text, const ConfigOverrides& ov, const std::string& tool);

/// "a,b,c" or "start:step:stop" (inclusive).
std::vector<double> parse_grid(const std::string& text);

}  // namespace mimo
