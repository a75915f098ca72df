// Copyright (C) 2026 The amskv Authors
// SPDX-License-Identifier: Apache-2.0

#include "amskv/scorers.hpp"

namespace amskv {

ScorerKind parse_scorer(std::string_view name) {
    if (name == "recent") return ScorerKind::recent;
    if (name == "expected") return ScorerKind::expected;
    if (name == "keydiff") return ScorerKind::keydiff;
    if (name == "constant") return ScorerKind::constant;
    throw ConfigError("unknown scorer '" + std::string(name) + "' (expected recent|expected|keydiff|constant)");
}

std::string_view to_string(ScorerKind kind) {
    switch (kind) {
        case ScorerKind::recent: return "recent";
        case ScorerKind::expected: return "expected";
        case ScorerKind::keydiff: return "keydiff";
        case ScorerKind::constant: return "constant";
    }
    return "unknown";
}

}  // namespace amskv
