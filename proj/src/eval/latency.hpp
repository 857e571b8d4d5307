#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "ingest/pipeline.hpp"

namespace mempal {

// Mean and sample standard deviation (n - 1; 0 for a single sample), in
// seconds.
struct LatencyStats {
  double mean_s = 0.0;
  double sd_s = 0.0;
  std::size_t calls = 0;
};
LatencyStats summarize(std::span<const double> seconds);

// Stage rows follow the device processing table: Locations over every
// batch, VLM over batches that called the model, Total Time over batches
// that produced a record.
struct LatencyReport {
  LatencyStats locations;
  LatencyStats vlm;
  LatencyStats total;
  double preprocess_total_s = 0.0;
  double preprocess_mean_s = 0.0;
  double full_total_s = 0.0;
  std::optional<LatencyStats> query;
};

// Throws NoData when there is neither a batch trace nor a query latency.
LatencyReport latency_report(const std::vector<StageTrace>& traces, std::span<const double> query_seconds = {});

nlohmann::json latency_report_to_json(const LatencyReport& r);
std::string render_latency_report(const LatencyReport& r);

}  // namespace mempal
