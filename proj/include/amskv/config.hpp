// Copyright (C) 2026 The amskv Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "amskv/types.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace amskv {

struct CacheShape {
    Index batch = 1;
    Index kv_heads = 1;
    Index seq_len = 1;
    Index head_dim = 1;

    void validate() const;
};

/**
 * Knobs for one compression policy. Defaults follow the reference AMS
 * configuration; `t_keep` has no default and must be supplied by the caller.
 *
 * The three mode flags select the ablation variants: disabling EMA credit,
 * replacing mass-proportional quotas with length-proportional ones, and
 * replacing adaptive segments with fixed segments of `max_seg_len`.
 */
struct CompressionConfig {
    std::optional<Index> t_keep;
    Index interval = 512;
    double segment_mass = 0.1;
    Index min_seg_len = 16;
    Index max_seg_len = 256;
    Index min_quota = 1;
    Index n_sink = 4;
    Index n_last = 8;
    double ema_decay = 0.9;
    double mass_mix = 0.9;
    Index window = 128;
    /// Maximum number of recent attention rows retained between events (>= window).
    Index hs_buffer = 256;
    double epsilon = 1e-6;
    Index smooth_kernel = 3;
    /// Chunk length for the fixed-chunk baseline.
    Index chunk_len = 16;
    bool ema_on = true;
    bool mass_weighted_quotas_on = true;
    bool fixed_length_segments_on = false;

    /// Throws ConfigError naming the first field outside its range.
    void validate() const;

    /// t_keep or a ConfigError if it was never set.
    Index keep_budget() const;

    bool operator==(const CompressionConfig&) const = default;
};

CompressionConfig default_config();

/// Names of every addressable field, in serialization order.
const std::vector<std::string_view>& config_keys();

/// Sets one field from its text form. Unknown keys and malformed values throw
/// ConfigError (tagged with `line` when non-zero). Does not validate ranges.
void set_config_value(CompressionConfig& cfg, std::string_view key, std::string_view value, int line = 0);

/// Reads the text form of one field.
std::string get_config_value(const CompressionConfig& cfg, std::string_view key);

/// Applies a flat `key=value` document on top of `base` and validates the result.
/// Blank lines and `#` comments are ignored.
CompressionConfig parse_config(std::string_view text, CompressionConfig base = default_config());

CompressionConfig load_config_file(const std::filesystem::path& path, CompressionConfig base = default_config());

/// Flat `key=value` text; reals use the shortest representation that parses back exactly.
std::string serialize_config(const CompressionConfig& cfg);

}  // namespace amskv
