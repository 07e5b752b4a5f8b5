// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace csifb {

enum class Strategy { rd, ecsq, af, perfect };

inline std::string to_string(Strategy s) {
    switch (s) {
        case Strategy::rd: return "rd";
        case Strategy::ecsq: return "ecsq";
        case Strategy::af: return "af";
        case Strategy::perfect: return "perfect";
    }
    return "?";
}

inline Strategy parse_strategy(const std::string& name) {
    if (name == "rd") return Strategy::rd;
    if (name == "ecsq") return Strategy::ecsq;
    if (name == "af") return Strategy::af;
    if (name == "perfect") return Strategy::perfect;
    throw std::invalid_argument("unknown strategy: " + name);
}

} // namespace csifb
