#include "eval/latency.hpp"

#include <cmath>
#include <cstdio>

#include <nlohmann/json.hpp>

#include "common/error.hpp"

namespace mempal {

LatencyStats summarize(std::span<const double> seconds) {
  LatencyStats s;
  s.calls = seconds.size();
  if (seconds.empty()) return s;
  double sum = 0.0;
  for (double x : seconds) sum += x;
  s.mean_s = sum / static_cast<double>(seconds.size());
  if (seconds.size() > 1) {
    double ss = 0.0;
    for (double x : seconds) ss += (x - s.mean_s) * (x - s.mean_s);
    s.sd_s = std::sqrt(ss / static_cast<double>(seconds.size() - 1));
  }
  return s;
}

LatencyReport latency_report(const std::vector<StageTrace>& traces, std::span<const double> query_seconds) {
  if (traces.empty() && query_seconds.empty()) fail(ErrorCode::NoData, "no timed interactions to report");
  std::vector<double> loc, vlm, total;
  LatencyReport r;
  for (const auto& t : traces) {
    loc.push_back(to_seconds(t.timings.location));
    if (t.vlm_called) vlm.push_back(to_seconds(t.timings.vlm));
    if (t.record_inserted) total.push_back(to_seconds(t.timings.total));
    r.preprocess_total_s += to_seconds(t.timings.preprocess);
    r.full_total_s += to_seconds(t.timings.total);
  }
  r.locations = summarize(loc);
  r.vlm = summarize(vlm);
  r.total = summarize(total);
  if (!traces.empty()) r.preprocess_mean_s = r.preprocess_total_s / static_cast<double>(traces.size());
  if (!query_seconds.empty()) r.query = summarize(query_seconds);
  return r;
}

namespace {

nlohmann::json stats_json(const LatencyStats& s) {
  return {{"mean_s", s.mean_s}, {"sd_s", s.sd_s}, {"calls", s.calls}};
}

}  // namespace

nlohmann::json latency_report_to_json(const LatencyReport& r) {
  nlohmann::json j = {{"locations", stats_json(r.locations)},
                      {"vlm", stats_json(r.vlm)},
                      {"total", stats_json(r.total)},
                      {"preprocess_total_s", r.preprocess_total_s},
                      {"preprocess_mean_s", r.preprocess_mean_s},
                      {"full_total_s", r.full_total_s}};
  j["query"] = r.query ? stats_json(*r.query) : nlohmann::json(nullptr);
  return j;
}

std::string render_latency_report(const LatencyReport& r) {
  char buf[512];
  std::string out;
  std::snprintf(buf, sizeof buf, "%-26s %12s %12s %12s\n", "", "Locations", "VLM", "Total Time");
  out += buf;
  std::snprintf(buf, sizeof buf, "%-26s %12.3f %12.3f %12.3f\n", "Mean Process Time (s)", r.locations.mean_s,
                r.vlm.mean_s, r.total.mean_s);
  out += buf;
  std::snprintf(buf, sizeof buf, "%-26s %12.3f %12.3f %12.3f\n", "Stdev Process Time (s)", r.locations.sd_s,
                r.vlm.sd_s, r.total.sd_s);
  out += buf;
  std::snprintf(buf, sizeof buf, "%-26s %12zu %12zu %12zu\n", "Total Process Calls", r.locations.calls, r.vlm.calls,
                r.total.calls);
  out += buf;
  std::snprintf(buf, sizeof buf, "%-26s %12.3f\n", "Total Pre-processing (s)", r.preprocess_total_s);
  out += buf;
  std::snprintf(buf, sizeof buf, "%-26s %12.3f\n", "Total Full Time (s)", r.full_total_s);
  out += buf;
  if (r.query) {
    std::snprintf(buf, sizeof buf, "Query response: mean %.3f s, SD %.3f s over %zu queries\n", r.query->mean_s,
                  r.query->sd_s, r.query->calls);
    out += buf;
  }
  return out;
}

}  // namespace mempal
