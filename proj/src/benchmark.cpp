#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "opaque/evaluation.hpp"

namespace opaque {

ResponderTiming summarize_timings(std::string responder, std::vector<double> millis) {
  ResponderTiming t;
  t.responder = std::move(responder);
  t.samples = millis.size();
  if (millis.empty()) return t;
  std::sort(millis.begin(), millis.end());
  t.mean_ms = std::accumulate(millis.begin(), millis.end(), 0.0) / static_cast<double>(millis.size());
  const std::size_t n = millis.size();
  t.median_ms = n % 2 == 1 ? millis[n / 2] : 0.5 * (millis[n / 2 - 1] + millis[n / 2]);
  // Nearest-rank percentile.
  const auto rank = static_cast<std::size_t>(std::ceil(0.99 * static_cast<double>(n)));
  t.p99_ms = millis[std::clamp<std::size_t>(rank, 1, n) - 1];
  return t;
}

const ResponderTiming& BenchmarkReport::timing(const std::string& responder) const {
  for (const auto& t : timings)
    if (t.responder == responder) return t;
  throw std::out_of_range("no timing for " + responder);
}

namespace {

volatile std::size_t benchmark_sink = 0;

ResponderTiming time_responder(const std::string& name, const Responder& responder,
                               std::span<const ByteSequence> requests, std::size_t repetitions, std::size_t warmup) {
  using clock = std::chrono::steady_clock;
  std::size_t sink = 0;
  for (std::size_t i = 0; i < warmup && !requests.empty(); ++i) {
    if (auto r = responder.respond(requests[i % requests.size()])) sink += r->size();
  }
  std::vector<double> millis;
  millis.reserve(requests.size() * repetitions);
  for (std::size_t rep = 0; rep < repetitions; ++rep) {
    for (const auto& req : requests) {
      const auto t0 = clock::now();
      auto r = responder.respond(req);
      const auto t1 = clock::now();
      if (r) sink += r->size();
      millis.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
    }
  }
  benchmark_sink = sink;
  return summarize_timings(name, std::move(millis));
}

}  // namespace

BenchmarkReport benchmark(const TransactionLibrary& library, const OpaqueServiceModel& model,
                          std::span<const ByteSequence> requests, std::size_t repetitions, std::size_t warmup) {
  BenchmarkReport report;
  report.library_size = library.size();
  report.request_count = requests.size() * repetitions;
  const HashLookupResponder hash(library);
  const WholeLibraryResponder whole(library, model.scoring, model.min_field_length);
  const PrototypeResponder proto(model);
  report.timings.push_back(time_responder("hash", hash, requests, repetitions, warmup));
  report.timings.push_back(time_responder("whole-library", whole, requests, repetitions, warmup));
  report.timings.push_back(time_responder("prototype", proto, requests, repetitions, warmup));
  return report;
}

nlohmann::json BenchmarkReport::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& t : timings) {
    rows.push_back({{"responder", t.responder},
                    {"samples", t.samples},
                    {"mean_ms", t.mean_ms},
                    {"median_ms", t.median_ms},
                    {"p99_ms", t.p99_ms}});
  }
  return {{"library_size", library_size}, {"request_count", request_count}, {"timings", rows}};
}

std::string BenchmarkReport::to_table() const {
  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof line, "%-14s %8s %12s %12s %12s\n", "responder", "samples", "mean(ms)", "median(ms)",
                "p99(ms)");
  out << line;
  for (const auto& t : timings) {
    std::snprintf(line, sizeof line, "%-14s %8zu %12.4f %12.4f %12.4f\n", t.responder.c_str(), t.samples, t.mean_ms,
                  t.median_ms, t.p99_ms);
    out << line;
  }
  return out.str();
}

}  // namespace opaque
