#include "mimo/config.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace mimo {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument(msg); }

long long to_int(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const long long x = std::stoll(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (...) {
        fail("config: field '" + key + "' expects an integer, got '" + v + "'");
    }
}

double to_real(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (...) {
        fail("config: field '" + key + "' expects a number, got '" + v + "'");
    }
}

std::vector<double> split_reals(const std::string& key, const std::string& v) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(to_real(key, item));
    }
    return out;
}

const char* kKnownKeys[] = {"m",          "k",           "modulation", "detector",        "snr",
                            "seed",       "min_trials",  "min_errors", "max_trials",      "nc",
                            "delta_d",    "llr_clamp",   "region_threshold", "channel",   "taps",
                            "subcarriers", "code",       "code_rate",  "block_info_bits", "r_diag"};

}  // namespace

std::vector<double> parse_grid(const std::string& text) {
    const std::string v = trim(text);
    if (v.find(':') != std::string::npos) {
        std::vector<double> parts = split_reals("snr", [&] {
            std::string t = v;
            for (char& ch : t)
                if (ch == ':') ch = ',';
            return t;
        }());
        if (parts.size() != 3) fail("config: snr range expects start:step:stop");
        const double start = parts[0], step = parts[1], stop = parts[2];
        if (step <= 0.0 || stop < start) fail("config: snr range expects positive step and stop >= start");
        std::vector<double> grid;
        for (double x = start; x <= stop + 1e-9; x += step) grid.push_back(x);
        return grid;
    }
    std::vector<double> grid = split_reals("snr", v);
    if (grid.empty()) fail("config: snr grid is empty");
    return grid;
}

SimConfig parse_config_text(const std::string& text, const ConfigOverrides& ov, const std::string& tool) {
    std::map<std::string, std::string> kv;
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            fail("config: line " + std::to_string(lineno) + " is not 'key = value': '" + line + "'");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        bool known = false;
        for (const char* k : kKnownKeys)
            if (key == k) known = true;
        if (!known) fail("config: unknown key '" + key + "'");
        if (kv.count(key)) fail("config: duplicate key '" + key + "'");
        kv[key] = val;
    }

    auto has = [&](const char* key) { return kv.count(key) != 0; };
    auto get = [&](const char* key) -> const std::string& { return kv.at(key); };
    auto required = [&](const char* key) -> const std::string& {
        if (!has(key)) fail("config: missing required field '" + std::string(key) + "'");
        return get(key);
    };

    SimConfig cfg;
    cfg.m = static_cast<int>(to_int("m", required("m")));
    cfg.k = static_cast<int>(to_int("k", required("k")));
    cfg.modulation = static_cast<int>(to_int("modulation", required("modulation")));

    std::string snr_text = ov.snr ? *ov.snr : (has("snr") ? get("snr") : "");
    if (snr_text.empty()) fail("config: missing required field 'snr'");
    cfg.snr_grid_db = parse_grid(snr_text);

    std::string det;
    if (ov.detector)
        det = *ov.detector;
    else if (has("detector"))
        det = get("detector");
    const bool detector_needed = tool == "ber" || tool == "throughput" || tool == "llr";
    if (det.empty()) {
        if (detector_needed) fail("config: missing required field 'detector'");
        cfg.detector = DetectorKind::dare;  // complexity / bound instrument the tree detector
    } else {
        const auto kind = detector_from_name(det);
        if (!kind) fail("config: unknown detector '" + det + "'");
        cfg.detector = *kind;
    }

    if (ov.seed)
        cfg.seed = *ov.seed;
    else if (has("seed"))
        cfg.seed = static_cast<std::uint64_t>(to_int("seed", get("seed")));
    if (has("min_trials")) cfg.min_trials = static_cast<std::uint64_t>(to_int("min_trials", get("min_trials")));
    if (has("min_errors")) cfg.min_errors = static_cast<std::uint64_t>(to_int("min_errors", get("min_errors")));
    if (has("max_trials")) cfg.max_trials = static_cast<std::uint64_t>(to_int("max_trials", get("max_trials")));

    if (ov.nc)
        cfg.dare.n_c = *ov.nc;
    else if (has("nc"))
        cfg.dare.n_c = static_cast<int>(to_int("nc", get("nc")));
    if (cfg.dare.n_c < 1) fail("config: nc must be >= 1");
    if (has("delta_d")) cfg.dare.delta_d = to_real("delta_d", get("delta_d"));
    if (has("llr_clamp")) cfg.dare.llr_clamp = to_real("llr_clamp", get("llr_clamp"));
    if (has("region_threshold")) cfg.dare.region_threshold = to_real("region_threshold", get("region_threshold"));

    cfg.channel.kind = ChannelModel::Kind::rayleigh_flat;
    if (has("channel")) {
        const std::string& ch = get("channel");
        if (ch == "flat")
            cfg.channel.kind = ChannelModel::Kind::rayleigh_flat;
        else if (ch == "multitap")
            cfg.channel.kind = ChannelModel::Kind::rayleigh_multitap;
        else
            fail("config: channel must be 'flat' or 'multitap', got '" + ch + "'");
    }
    cfg.channel.taps = has("taps") ? static_cast<int>(to_int("taps", get("taps"))) : 1;
    cfg.channel.subcarriers = has("subcarriers") ? static_cast<int>(to_int("subcarriers", get("subcarriers"))) : 1;
    if (cfg.channel.kind == ChannelModel::Kind::rayleigh_flat) {
        if (cfg.channel.taps != 1) fail("config: flat channel requires taps = 1");
    } else {
        if (cfg.channel.taps < 1) fail("config: taps must be >= 1");
        if (cfg.channel.subcarriers < 1) fail("config: subcarriers must be >= 1");
    }
    cfg.channel.m = cfg.m;
    cfg.channel.k = cfg.k;

    const std::string code_kind = has("code") ? get("code") : "none";
    if (code_kind == "conv") {
        CodeSpec spec;
        const std::string& rate = required("code_rate");
        if (rate == "1/2")
            spec.rate = CodeSpec::Rate::half;
        else if (rate == "3/4")
            spec.rate = CodeSpec::Rate::three_quarters;
        else
            fail("config: code_rate must be '1/2' or '3/4', got '" + rate + "'");
        spec.block_info_bits = static_cast<int>(to_int("block_info_bits", required("block_info_bits")));
        if (spec.block_info_bits < 1) fail("config: block_info_bits must be >= 1");
        cfg.code = spec;
    } else if (code_kind != "none") {
        fail("config: code must be 'none' or 'conv', got '" + code_kind + "'");
    }

    if (has("r_diag")) {
        cfg.r_diag = split_reals("r_diag", get("r_diag"));
        if (tool != "bound") fail("config: r_diag only applies to the bound tool");
    }

    cfg.threads = ov.threads;

    if (tool == "throughput" && !cfg.code) fail("config: missing required field 'code' (throughput is a coded run)");
    if (tool != "throughput" && cfg.code) fail("config: only the throughput tool accepts a code block");
    return cfg;
}

SimConfig load_config(const std::string& path, const ConfigOverrides& ov, const std::string& tool) {
    std::string text;
    if (!path.empty()) {
        std::ifstream in(path);
        if (!in) fail("config: cannot read '" + path + "'");
        std::stringstream buf;
        buf << in.rdbuf();
        text = buf.str();
    }
    return parse_config_text(text, ov, tool);
}

}  // namespace mimo
