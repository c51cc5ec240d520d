#pragma once

// Layered JSON configuration: built-in defaults, then a config file, then
// --set key=value overrides. Files and overrides may only touch keys that the
// defaults define; arrays are replaced wholesale.

#include <cstdlib>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "asyfreq/errors.hpp"

namespace asyfreq::cli {

using nlohmann::json;

inline void overlay(json& base, const json& patch, const std::string& prefix = "") {
    if (!patch.is_object()) throw ValidationError("config" + (prefix.empty() ? "" : " '" + prefix + "'") +
                                                  ": expected an object");
    for (const auto& [key, value] : patch.items()) {
        const std::string path = prefix.empty() ? key : prefix + "." + key;
        if (!base.contains(key)) throw ValidationError("unknown config key '" + path + "'");
        auto& target = base[key];
        if (target.is_object() && value.is_object()) {
            overlay(target, value, path);
        } else {
            target = value;
        }
    }
}

inline json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ValidationError(path + ": " + e.what());
    }
}

/// Applies "a.b.0.c=value". The value is parsed as JSON when possible and
/// taken as a string otherwise. Every path segment must already exist.
inline void apply_override(json& config, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) throw ValidationError("--set expects key=value, got '" + assignment + "'");
    const std::string path = assignment.substr(0, eq);
    const std::string text = assignment.substr(eq + 1);
    json* node = &config;
    std::size_t start = 0;
    while (start <= path.size()) {
        const auto dot = path.find('.', start);
        const std::string seg = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (node->is_object() && node->contains(seg)) {
            node = &(*node)[seg];
        } else if (node->is_array() && !seg.empty() && seg.find_first_not_of("0123456789") == std::string::npos &&
                   std::stoul(seg) < node->size()) {
            node = &(*node)[std::stoul(seg)];
        } else {
            throw ValidationError("--set: unknown config key '" + path + "'");
        }
        if (dot == std::string::npos) break;
        start = dot + 1;
    }
    json value = json::parse(text, nullptr, false);
    *node = value.is_discarded() ? json(text) : value;
}

inline json resolve(json defaults, const std::string& config_path, const std::vector<std::string>& overrides) {
    if (!config_path.empty()) overlay(defaults, read_json_file(config_path));
    for (const auto& o : overrides) apply_override(defaults, o);
    return defaults;
}

/// Worker count: explicit flag, else ASYFREQ_WORKERS, else 0 (all hardware threads).
inline unsigned workers_from(int flag) {
    if (flag >= 0) return static_cast<unsigned>(flag);
    if (const char* env = std::getenv("ASYFREQ_WORKERS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end == env || *end != '\0' || v < 0) throw ValidationError("ASYFREQ_WORKERS must be a nonnegative integer");
        return static_cast<unsigned>(v);
    }
    return 0;
}

}  // namespace asyfreq::cli
