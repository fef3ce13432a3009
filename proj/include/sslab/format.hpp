#pragma once

#include <cstdio>
#include <string>

namespace sslab::format {

/// 17 significant digits, '.' decimal separator; round-trips doubles exactly.
inline std::string number(double value) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.17g", value);
    return buffer;
}

/// RFC 4180 quoting: fields containing commas, quotes or newlines are quoted
/// with embedded quotes doubled.
inline std::string csv_field(const std::string& text) {
    if (text.find_first_of(",\"\n\r") == std::string::npos) return text;
    std::string quoted = "\"";
    for (char c : text) {
        if (c == '"') quoted += '"';
        quoted += c;
    }
    quoted += '"';
    return quoted;
}

} // namespace sslab::format
