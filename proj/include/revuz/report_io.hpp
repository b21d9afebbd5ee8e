#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "revuz/assumptions.hpp"
#include "revuz/verify.hpp"

namespace revuz {

// Shortest round-trip decimal form of v ("%.17g" trimmed via a re-parse
// check). Non-finite values render as "nan", "inf", "-inf".
std::string fmt_double(double v);

// FNV-1a 64-bit hash, used to stamp outputs with a configuration digest.
std::uint64_t fnv1a64(std::string_view text);

std::string hex_digest(std::uint64_t h);

// JSON serialization. Non-finite numbers become null.
std::string to_json_string(const VerifyReport& report, int indent = 2);
std::string to_json_string(const TrendReport& report, int indent = 2);

// Human-readable aligned table.
std::string to_text(const VerifyReport& report);
std::string to_text(const TrendReport& report);

// One row per VerifyRow. `config_digest` lands in a leading comment line
// together with suite, scenario and seed so that a data file identifies the
// run that produced it.
std::string to_csv(const VerifyReport& report, std::string_view config_digest);

void write_text_file(const std::string& path, std::string_view content);

}  // namespace revuz
