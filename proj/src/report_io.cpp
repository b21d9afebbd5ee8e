#include "revuz/report_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

#include "json.hpp"

namespace revuz {

namespace {

std::string printf_double(const char* fmt, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), fmt, v);
  return buf;
}

// Fixed-width cell for table output; NaN prints as a dash.
std::string cell(double v) {
  if (std::isnan(v)) return "-";
  return printf_double("%.6g", v);
}

void append_padded(std::string& out, const std::string& s, std::size_t width,
                   bool left) {
  if (left) out += s;
  if (s.size() < width) out.append(width - s.size(), ' ');
  if (!left) out += s;
}

nlohmann::json row_to_json(const VerifyRow& row) {
  auto num = [](double v) {
    return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
  };
  return nlohmann::json{{"label", row.label},       {"exact", num(row.exact)},
                        {"estimate", num(row.estimate)},
                        {"std_error", num(row.std_error)},
                        {"bound", num(row.bound)},  {"ratio", num(row.ratio)},
                        {"margin", num(row.margin)}, {"pass", row.pass}};
}

}  // namespace

std::string fmt_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  for (int precision : {15, 16, 17}) {
    char fmt[8];
    std::snprintf(fmt, sizeof(fmt), "%%.%dg", precision);
    std::string s = printf_double(fmt, v);
    if (std::strtod(s.c_str(), nullptr) == v) return s;
  }
  return printf_double("%.17g", v);
}

std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string hex_digest(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

std::string to_json_string(const VerifyReport& report, int indent) {
  nlohmann::json j{{"suite", report.suite},
                   {"scenario", report.scenario},
                   {"seed", report.seed},
                   {"tolerance", report.tolerance},
                   {"pass", report.pass},
                   {"notes", report.notes},
                   {"rows", nlohmann::json::array()}};
  for (const auto& row : report.rows) j["rows"].push_back(row_to_json(row));
  return j.dump(indent) + "\n";
}

std::string to_json_string(const TrendReport& report, int indent) {
  nlohmann::json j{{"name", report.name},
                   {"satisfied", report.satisfied},
                   {"notes", report.notes},
                   {"rows", nlohmann::json::array()}};
  for (const auto& row : report.rows) {
    j["rows"].push_back(nlohmann::json{
        {"label", row.label},
        {"value", std::isfinite(row.value) ? nlohmann::json(row.value)
                                           : nlohmann::json(nullptr)},
        {"ok", row.ok}});
  }
  return j.dump(indent) + "\n";
}

std::string to_text(const VerifyReport& report) {
  static constexpr const char* kHeaders[] = {"exact",  "estimate", "std_err",
                                             "bound",  "ratio",    "margin"};
  std::vector<std::vector<std::string>> cells;
  cells.reserve(report.rows.size());
  for (const auto& row : report.rows) {
    cells.push_back({cell(row.exact), cell(row.estimate), cell(row.std_error),
                     cell(row.bound), cell(row.ratio), cell(row.margin)});
  }

  std::size_t label_width = 5;
  for (const auto& row : report.rows)
    label_width = std::max(label_width, row.label.size());
  std::size_t width[6];
  for (int c = 0; c < 6; ++c) {
    width[c] = std::char_traits<char>::length(kHeaders[c]);
    for (const auto& r : cells) width[c] = std::max(width[c], r[c].size());
  }

  std::ostringstream out;
  out << "suite=" << report.suite << " scenario=" << report.scenario
      << " seed=" << report.seed << " tolerance=" << fmt_double(report.tolerance)
      << " => " << (report.pass ? "PASS" : "FAIL") << "\n";
  for (const auto& note : report.notes) out << "note: " << note << "\n";

  std::string line;
  append_padded(line, "check", label_width, true);
  for (int c = 0; c < 6; ++c) {
    line += "  ";
    append_padded(line, kHeaders[c], width[c], false);
  }
  line += "  result";
  out << line << "\n" << std::string(line.size(), '-') << "\n";

  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    line.clear();
    append_padded(line, report.rows[i].label, label_width, true);
    for (int c = 0; c < 6; ++c) {
      line += "  ";
      append_padded(line, cells[i][c], width[c], false);
    }
    line += report.rows[i].pass ? "  ok" : "  FAIL";
    out << line << "\n";
  }
  return out.str();
}

std::string to_text(const TrendReport& report) {
  std::size_t label_width = 5;
  for (const auto& row : report.rows)
    label_width = std::max(label_width, row.label.size());

  std::ostringstream out;
  out << "check=" << report.name << " => "
      << (report.satisfied ? "PASS" : "FAIL") << "\n";
  for (const auto& note : report.notes) out << "note: " << note << "\n";
  for (const auto& row : report.rows) {
    std::string line;
    append_padded(line, row.label, label_width, true);
    line += "  ";
    append_padded(line, cell(row.value), 12, false);
    line += row.ok ? "  ok" : "  FAIL";
    out << line << "\n";
  }
  return out.str();
}

std::string to_csv(const VerifyReport& report, std::string_view config_digest) {
  auto field = [](double v) {
    return std::isnan(v) ? std::string() : fmt_double(v);
  };
  std::ostringstream out;
  out << "# suite=" << report.suite << " scenario=" << report.scenario
      << " seed=" << report.seed << " config=" << config_digest << "\n";
  out << "label,exact,estimate,std_error,bound,ratio,margin,pass\n";
  for (const auto& row : report.rows) {
    out << '"' << row.label << '"' << ',' << field(row.exact) << ','
        << field(row.estimate) << ',' << field(row.std_error) << ','
        << field(row.bound) << ',' << field(row.ratio) << ','
        << field(row.margin) << ',' << (row.pass ? 1 : 0) << "\n";
  }
  return out.str();
}

void write_text_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw IoError("short write to '" + path + "'");
}

}  // namespace revuz
