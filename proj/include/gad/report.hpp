#pragma once

#include <json.hpp>

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace gad {

/// First epoch whose loss has fallen by `fraction` of the total drop from the
/// first to the last epoch; 0 when the loss never falls.
int epochs_to_loss_drop(std::span<const double> losses, double fraction = 0.9);

struct ReportRow {
  std::string name;
  nlohmann::json config;
  double final_val_acc = 0.0;
  double final_test_acc = 0.0;
  double final_train_loss = 0.0;
  std::int64_t bytes_without = 0;
  std::int64_t bytes_with = 0;
  double comm_reduction = 0.0;
  int best_val_epoch = -1;
  int epochs_to_90 = 0;
  int epochs = 0;
};

/// Reads a train report document ({"config": ..., "report": ...}). Throws
/// std::runtime_error when required fields are missing.
ReportRow summarize_report(const nlohmann::json& doc, std::string name);

/// Config keys whose values differ between two config objects, sorted.
std::vector<std::string> config_differences(const nlohmann::json& a, const nlohmann::json& b);

/// Aligned text table; with two or more rows adds the test-accuracy delta
/// and the differing config keys relative to the first row.
std::string format_table(std::span<const ReportRow> rows);
std::string to_csv(std::span<const ReportRow> rows);

}  // namespace gad
