#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "misnc/instance.hpp"
#include "misnc/offline.hpp"
#include "misnc/online.hpp"

namespace misnc {

struct OfflineRunResult {
  FptasParams params;
  OfflineSolution solution;
  OfflineCertificates certificates;
  std::vector<double> utilization;  // scaled load / capacity per link
  double wall_seconds = 0.0;
};

struct OnlineDecisionRow {
  std::string request_id;
  bool accepted = false;
  double cost = 0.0;
  double dual_weight = 0.0;
  std::vector<std::pair<std::string, double>> link_increments;  // link id -> d_r * f_e
};

struct OnlineRunResult {
  OnlineConfig config;
  OnlineMetrics metrics;
  OnlineCertificates certificates;
  std::vector<OnlineDecisionRow> decisions;
  double wall_seconds = 0.0;
};

struct MincostRunResult {
  std::string request_id;
  MinCostResult result;
  std::vector<FlowCheck> checks;
  double wall_seconds = 0.0;
};

struct ExperimentReport {
  InstanceDocument instance;  // embedded verbatim for reproducibility
  double wall_seconds = 0.0;
  std::optional<OfflineRunResult> offline;
  std::optional<OnlineRunResult> online;
  std::vector<MincostRunResult> mincost;

  bool certificates_passed() const;
};

// Dispatches on the document mode and always runs the matching verification.
ExperimentReport run_experiment(const InstanceDocument& doc);

struct SweepReport {
  InstanceDocument instance;
  std::vector<std::string> link_ids;

  struct OfflineRow {
    double epsilon = 0.0;
    double lambda = 0.0;
    double wall_seconds = 0.0;
    double normalized_time = 0.0;  // relative to the epsilon = 0.1 run
    int phases = 0;
    bool certificates_passed = false;
    std::vector<double> utilization;
  };
  struct OnlineRow {
    double phi = 0.0;
    double acceptance_ratio = 0.0;
    double violation_ratio = 0.0;
    int bottleneck_link = -1;
    bool certificates_passed = false;
    std::vector<double> utilization;
  };

  std::vector<OfflineRow> offline_rows;
  std::vector<OnlineRow> online_rows;

  // Matched-demand load comparison: the epsilon = 0.1 run against phi = 1.
  std::vector<double> offline_utilization;
  std::vector<double> online_utilization;
  int offline_bottleneck = -1;
  int online_bottleneck = -1;

  bool certificates_passed() const;
};

// Runs the epsilon sweep on the document's demands plus a phi sweep over a
// matched-demand arrival sequence (per_request arrivals of size d/per_request
// per demand, shuffled with the document seed).
SweepReport run_sweep(const InstanceDocument& doc,
                      const std::vector<double>& epsilons = {0.4, 0.2, 0.1, 0.05},
                      const std::vector<double>& phis = {1.0, 2.0, 4.0, 8.0},
                      int per_request = 100);

enum class ReportFormat { kJson, kCsv, kBoth };

std::vector<std::filesystem::path> emit_report(const ExperimentReport& report,
                                               const std::filesystem::path& dir,
                                               ReportFormat format = ReportFormat::kBoth);
std::vector<std::filesystem::path> emit_report(const SweepReport& report,
                                               const std::filesystem::path& dir,
                                               ReportFormat format = ReportFormat::kBoth);

std::string report_to_json(const ExperimentReport& report);
std::string report_to_json(const SweepReport& report);

}  // namespace misnc
