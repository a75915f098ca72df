// Copyright (C) 2026 The amskv Authors
// SPDX-License-Identifier: Apache-2.0

#include "amskv/config.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace amskv {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

Index parse_count(std::string_view key, std::string_view value, int line) {
    long long out = 0;
    const auto* end = value.data() + value.size();
    auto [ptr, ec] = std::from_chars(value.data(), end, out);
    if (ec != std::errc() || ptr != end)
        throw ConfigError("'" + std::string(key) + "' expects an integer, got '" + std::string(value) + "'", line);
    return static_cast<Index>(out);
}

double parse_real(std::string_view key, std::string_view value, int line) {
    double out = 0.0;
    const auto* end = value.data() + value.size();
    auto [ptr, ec] = std::from_chars(value.data(), end, out);
    if (ec != std::errc() || ptr != end || !std::isfinite(out))
        throw ConfigError("'" + std::string(key) + "' expects a real number, got '" + std::string(value) + "'", line);
    return out;
}

bool parse_flag(std::string_view key, std::string_view value, int line) {
    if (value == "true" || value == "1" || value == "on") return true;
    if (value == "false" || value == "0" || value == "off") return false;
    throw ConfigError("'" + std::string(key) + "' expects true/false, got '" + std::string(value) + "'", line);
}

std::string format_real(double v) {
    std::array<char, 64> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), ptr);
}

}  // namespace

void CacheShape::validate() const {
    if (batch < 1 || kv_heads < 1 || seq_len < 1 || head_dim < 1)
        throw ContractViolation("cache shape fields must all be >= 1");
}

void CompressionConfig::validate() const {
    if (t_keep && *t_keep < 1) throw ConfigError("t_keep must be >= 1");
    if (t_keep && *t_keep < n_sink) throw ConfigError("t_keep must be >= n_sink");
    if (interval < 1) throw ConfigError("interval must be >= 1");
    if (!(segment_mass > 0.0 && segment_mass <= 1.0)) throw ConfigError("segment_mass must lie in (0, 1]");
    if (min_seg_len < 1) throw ConfigError("min_seg_len must be >= 1");
    if (max_seg_len < min_seg_len) throw ConfigError("max_seg_len must be >= min_seg_len");
    if (min_quota < 0) throw ConfigError("min_quota must be >= 0");
    if (n_sink < 0 || n_last < 0) throw ConfigError("n_sink and n_last must be >= 0");
    if (!(ema_decay > 0.0 && ema_decay < 1.0)) throw ConfigError("ema_decay must lie in (0, 1)");
    if (!(mass_mix >= 0.0 && mass_mix <= 1.0)) throw ConfigError("mass_mix must lie in [0, 1]");
    if (window < 1) throw ConfigError("window must be >= 1");
    if (hs_buffer < window) throw ConfigError("hs_buffer must be >= window");
    if (!(epsilon > 0.0)) throw ConfigError("epsilon must be > 0");
    if (smooth_kernel < 1 || smooth_kernel % 2 == 0) throw ConfigError("smooth_kernel must be odd and >= 1");
    if (chunk_len < 1) throw ConfigError("chunk_len must be >= 1");
}

Index CompressionConfig::keep_budget() const {
    if (!t_keep) throw ConfigError("t_keep is not set");
    return *t_keep;
}

CompressionConfig default_config() { return CompressionConfig{}; }

const std::vector<std::string_view>& config_keys() {
    static const std::vector<std::string_view> keys = {
        "t_keep",      "interval",  "segment_mass", "min_seg_len",  "max_seg_len",
        "min_quota",   "n_sink",    "n_last",       "ema_decay",    "mass_mix",
        "window",      "hs_buffer", "epsilon",      "smooth_kernel", "chunk_len",
        "ema_on",      "mass_weighted_quotas_on",   "fixed_length_segments_on",
    };
    return keys;
}

void set_config_value(CompressionConfig& cfg, std::string_view key, std::string_view value, int line) {
    value = trim(value);
    if (key == "t_keep") {
        if (value == "unset" || value.empty())
            cfg.t_keep.reset();
        else
            cfg.t_keep = parse_count(key, value, line);
    } else if (key == "interval") cfg.interval = parse_count(key, value, line);
    else if (key == "segment_mass") cfg.segment_mass = parse_real(key, value, line);
    else if (key == "min_seg_len") cfg.min_seg_len = parse_count(key, value, line);
    else if (key == "max_seg_len") cfg.max_seg_len = parse_count(key, value, line);
    else if (key == "min_quota") cfg.min_quota = parse_count(key, value, line);
    else if (key == "n_sink") cfg.n_sink = parse_count(key, value, line);
    else if (key == "n_last") cfg.n_last = parse_count(key, value, line);
    else if (key == "ema_decay") cfg.ema_decay = parse_real(key, value, line);
    else if (key == "mass_mix") cfg.mass_mix = parse_real(key, value, line);
    else if (key == "window") cfg.window = parse_count(key, value, line);
    else if (key == "hs_buffer") cfg.hs_buffer = parse_count(key, value, line);
    else if (key == "epsilon") cfg.epsilon = parse_real(key, value, line);
    else if (key == "smooth_kernel") cfg.smooth_kernel = parse_count(key, value, line);
    else if (key == "chunk_len") cfg.chunk_len = parse_count(key, value, line);
    else if (key == "ema_on") cfg.ema_on = parse_flag(key, value, line);
    else if (key == "mass_weighted_quotas_on") cfg.mass_weighted_quotas_on = parse_flag(key, value, line);
    else if (key == "fixed_length_segments_on") cfg.fixed_length_segments_on = parse_flag(key, value, line);
    else throw ConfigError("unknown key '" + std::string(key) + "'", line);
}

std::string get_config_value(const CompressionConfig& cfg, std::string_view key) {
    auto flag = [](bool b) { return std::string(b ? "true" : "false"); };
    if (key == "t_keep") return cfg.t_keep ? std::to_string(*cfg.t_keep) : "unset";
    if (key == "interval") return std::to_string(cfg.interval);
    if (key == "segment_mass") return format_real(cfg.segment_mass);
    if (key == "min_seg_len") return std::to_string(cfg.min_seg_len);
    if (key == "max_seg_len") return std::to_string(cfg.max_seg_len);
    if (key == "min_quota") return std::to_string(cfg.min_quota);
    if (key == "n_sink") return std::to_string(cfg.n_sink);
    if (key == "n_last") return std::to_string(cfg.n_last);
    if (key == "ema_decay") return format_real(cfg.ema_decay);
    if (key == "mass_mix") return format_real(cfg.mass_mix);
    if (key == "window") return std::to_string(cfg.window);
    if (key == "hs_buffer") return std::to_string(cfg.hs_buffer);
    if (key == "epsilon") return format_real(cfg.epsilon);
    if (key == "smooth_kernel") return std::to_string(cfg.smooth_kernel);
    if (key == "chunk_len") return std::to_string(cfg.chunk_len);
    if (key == "ema_on") return flag(cfg.ema_on);
    if (key == "mass_weighted_quotas_on") return flag(cfg.mass_weighted_quotas_on);
    if (key == "fixed_length_segments_on") return flag(cfg.fixed_length_segments_on);
    throw ConfigError("unknown key '" + std::string(key) + "'");
}

CompressionConfig parse_config(std::string_view text, CompressionConfig base) {
    int line_no = 0;
    std::size_t pos = 0;
    std::map<std::string, int, std::less<>> set_on;  // key -> last line that set it
    while (pos <= text.size()) {
        auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        std::string_view line = text.substr(pos, nl - pos);
        pos = nl + 1;
        ++line_no;

        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;

        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ConfigError("expected key=value", line_no);
        const auto key = trim(line.substr(0, eq));
        set_config_value(base, key, line.substr(eq + 1), line_no);
        set_on[std::string(key)] = line_no;
    }
    try {
        base.validate();
    } catch (const ConfigError& e) {
        // Range messages lead with the offending key; point at the line that set it.
        const std::string_view what = e.what();
        std::size_t best = 0;
        int line = 0;
        for (const auto& [key, at] : set_on)
            if (what.starts_with(key) && key.size() > best) {
                best = key.size();
                line = at;
            }
        if (line == 0) throw;
        throw ConfigError(std::string(what), line);
    }
    return base;
}

CompressionConfig load_config_file(const std::filesystem::path& path, CompressionConfig base) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), std::move(base));
}

std::string serialize_config(const CompressionConfig& cfg) {
    std::string out;
    for (auto key : config_keys()) {
        out += key;
        out += '=';
        out += get_config_value(cfg, key);
        out += '\n';
    }
    return out;
}

}  // namespace amskv
