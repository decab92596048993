#include <algorithm>
#include <atomic>
#include <cstdio>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>

#include "opaque/evaluation.hpp"

namespace opaque {

std::vector<std::vector<std::size_t>> fold_partition(std::size_t n, std::size_t folds, std::uint64_t seed,
                                                     std::size_t repeat) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(repeat)};
  std::mt19937_64 rng(seq);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::vector<std::size_t>> out(folds);
  for (std::size_t i = 0; i < n; ++i) out[i % folds].push_back(order[i]);
  for (auto& f : out) std::sort(f.begin(), f.end());
  return out;
}

AccuracyReport cross_validate(const TransactionLibrary& library, const CrossValidationOptions& options,
                              const Validator& validator) {
  if (options.folds < 2 || library.size() < options.folds) {
    throw Error(ErrorCode::TooFewTransactions, std::to_string(library.size()) + " transactions for " +
                                                   std::to_string(options.folds) + " folds");
  }
  if (options.repeats < 1) throw Error(ErrorCode::InvalidConfig, "repeats must be at least 1");

  // Pairwise distances depend only on the two transactions, so one matrix
  // over the whole library serves every fold's rebuild.
  DistanceMatrix responses;
  DistanceMatrix requests;
  DistanceCache cache;
  if (options.responder == ResponderKind::Prototype) {
    responses = response_distance_matrix(library, options.build.scoring, options.threads);
    requests = request_distance_matrix(library, options.build.scoring, options.threads);
    cache = {&responses, &requests};
  }

  std::vector<std::vector<std::vector<std::size_t>>> partitions;
  for (std::size_t r = 0; r < options.repeats; ++r) {
    partitions.push_back(fold_partition(library.size(), options.folds, options.seed, r));
  }

  const std::size_t tasks = options.repeats * options.folds;
  std::vector<FoldResult> results(tasks);
  std::atomic<std::size_t> next{0};
  BuildOptions build = options.build;
  build.threads = 1;

  auto worker = [&] {
    for (std::size_t task = next++; task < tasks; task = next++) {
      const std::size_t r = task / options.folds;
      const std::size_t f = task % options.folds;
      const auto& held_out = partitions[r][f];
      std::vector<bool> is_held(library.size(), false);
      for (auto p : held_out) is_held[p] = true;
      std::vector<std::size_t> train;
      for (std::size_t p = 0; p < library.size(); ++p)
        if (!is_held[p]) train.push_back(p);

      const auto responder = make_responder(options.responder, library.subset(train), build, cache);
      FoldResult res;
      res.repeat = r;
      res.fold = f;
      for (auto p : held_out) {
        const auto& t = library[p];
        const auto outcome = validator(t.response, responder->respond(t.request));
        ++res.total;
        if (outcome.valid()) {
          ++res.valid;
        } else if (outcome.reason == InvalidReason::WrongOperation) {
          ++res.wrong_operation;
        } else {
          ++res.parse_failures;
        }
      }
      results[task] = res;
    }
  };

  unsigned threads = options.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : options.threads;
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, tasks));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  AccuracyReport report;
  report.responder = responder_name(options.responder);
  report.folds = options.folds;
  report.repeats = options.repeats;
  report.seed = options.seed;
  report.per_fold = std::move(results);
  for (const auto& r : report.per_fold) {
    report.total += r.total;
    report.valid += r.valid;
  }
  report.accuracy = report.total == 0 ? 0.0 : static_cast<double>(report.valid) / static_cast<double>(report.total);
  return report;
}

nlohmann::json AccuracyReport::to_json() const {
  nlohmann::json folds_json = nlohmann::json::array();
  for (const auto& f : per_fold) {
    folds_json.push_back({{"repeat", f.repeat},
                          {"fold", f.fold},
                          {"total", f.total},
                          {"valid", f.valid},
                          {"parse_failures", f.parse_failures},
                          {"wrong_operation", f.wrong_operation}});
  }
  return {{"responder", responder}, {"folds", folds},   {"repeats", repeats},     {"seed", seed},
          {"total", total},         {"valid", valid},   {"accuracy", accuracy}, {"per_fold", folds_json}};
}

std::string AccuracyReport::to_table() const {
  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof line, "%-14s %6s %8s %8s %10s\n", "responder", "folds", "total", "valid", "accuracy");
  out << line;
  std::snprintf(line, sizeof line, "%-14s %3zux%-2zu %8zu %8zu %9.2f%%\n", responder.c_str(), folds, repeats, total,
                valid, 100.0 * accuracy);
  out << line;
  return out.str();
}

}  // namespace opaque
