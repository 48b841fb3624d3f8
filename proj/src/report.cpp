#include "gad/report.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace gad {

using nlohmann::json;

int epochs_to_loss_drop(std::span<const double> losses, double fraction) {
  if (losses.size() < 2) return 0;
  const double drop = losses.front() - losses.back();
  if (!(drop > 0.0)) return 0;
  for (std::size_t e = 0; e < losses.size(); ++e)
    if (losses.front() - losses[e] >= fraction * drop) return static_cast<int>(e);
  return static_cast<int>(losses.size()) - 1;
}

ReportRow summarize_report(const json& doc, std::string name) {
  ReportRow row;
  row.name = std::move(name);
  try {
    row.config = doc.at("config");
    const json& r = doc.at("report");
    row.final_val_acc = r.at("final_val_acc").get<double>();
    row.final_test_acc = r.at("final_test_acc").get<double>();
    row.best_val_epoch = r.at("best_val_epoch").get<int>();
    row.bytes_without = r.at("comm").at("bytes_without").get<std::int64_t>();
    row.bytes_with = r.at("comm").at("bytes_with").get<std::int64_t>();
    row.comm_reduction =
        row.bytes_without > 0
            ? 1.0 - static_cast<double>(row.bytes_with) / static_cast<double>(row.bytes_without)
            : 0.0;
    std::vector<double> losses;
    for (const auto& e : r.at("epochs")) losses.push_back(e.at("train_loss").get<double>());
    row.epochs = static_cast<int>(losses.size());
    row.final_train_loss = losses.empty() ? 0.0 : losses.back();
    row.epochs_to_90 = epochs_to_loss_drop(losses);
  } catch (const json::exception& e) {
    throw std::runtime_error("malformed report " + row.name + ": " + e.what());
  }
  return row;
}

std::vector<std::string> config_differences(const json& a, const json& b) {
  std::vector<std::string> keys;
  for (const auto& [key, value] : a.items())
    if (!b.contains(key) || b.at(key) != value) keys.push_back(key);
  for (const auto& [key, value] : b.items())
    if (!a.contains(key)) keys.push_back(key);
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
  return keys;
}

namespace {

std::string fixed(double x, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

std::string join(const std::vector<std::string>& parts, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? sep : "") + parts[i];
  return out;
}

std::vector<std::vector<std::string>> cells(std::span<const ReportRow> rows) {
  std::vector<std::string> header{"report",    "test_acc",     "val_acc",  "train_loss",
                                  "bytes_with", "bytes_without", "comm_red", "best_val_epoch",
                                  "epochs_to_90"};
  const bool compare = rows.size() > 1;
  if (compare) {
    header.push_back("delta_test");
    header.push_back("differs");
  }
  std::vector<std::vector<std::string>> out{header};
  for (const auto& r : rows) {
    std::vector<std::string> line{r.name,
                                  fixed(r.final_test_acc, 4),
                                  fixed(r.final_val_acc, 4),
                                  fixed(r.final_train_loss, 6),
                                  std::to_string(r.bytes_with),
                                  std::to_string(r.bytes_without),
                                  fixed(100.0 * r.comm_reduction, 2) + "%",
                                  std::to_string(r.best_val_epoch),
                                  std::to_string(r.epochs_to_90)};
    if (compare) {
      const double delta = r.final_test_acc - rows[0].final_test_acc;
      line.push_back((delta >= 0 ? "+" : "") + fixed(delta, 4));
      const auto diff = config_differences(rows[0].config, r.config);
      line.push_back(diff.empty() ? "-" : join(diff, ";"));
    }
    out.push_back(std::move(line));
  }
  return out;
}

}  // namespace

std::string format_table(std::span<const ReportRow> rows) {
  const auto table = cells(rows);
  std::vector<std::size_t> width(table[0].size(), 0);
  for (const auto& line : table)
    for (std::size_t c = 0; c < line.size(); ++c) width[c] = std::max(width[c], line[c].size());
  std::ostringstream out;
  for (const auto& line : table) {
    for (std::size_t c = 0; c < line.size(); ++c) {
      if (c) out << "  ";
      if (c == 0)
        out << line[c] << std::string(width[c] - line[c].size(), ' ');
      else
        out << std::string(width[c] - line[c].size(), ' ') << line[c];
    }
    out << '\n';
  }
  return out.str();
}

std::string to_csv(std::span<const ReportRow> rows) {
  std::ostringstream out;
  for (const auto& line : cells(rows)) {
    for (std::size_t c = 0; c < line.size(); ++c) {
      if (c) out << ',';
      const bool quote = line[c].find_first_of(",\"") != std::string::npos;
      if (!quote) {
        out << line[c];
        continue;
      }
      out << '"';
      for (char ch : line[c]) out << (ch == '"' ? "\"\"" : std::string(1, ch));
      out << '"';
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace gad
