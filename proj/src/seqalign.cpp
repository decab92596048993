#include "opaque/seqalign.hpp"

#include <algorithm>
#include <numeric>

namespace opaque {

void ScoringConfig::validate() const {
  if (!(match > 0.0)) throw Error(ErrorCode::InvalidConfig, "match score must be positive");
  if (!(mismatch < match)) throw Error(ErrorCode::InvalidConfig, "mismatch must be below match");
  if (!(gap <= 0.0)) throw Error(ErrorCode::InvalidConfig, "gap penalty must be <= 0");
}

Alignment global_align(ByteView a, ByteView b, const ScoringConfig& cfg) {
  const std::size_t n = a.size();
  const std::size_t m = b.size();
  const std::size_t w = m + 1;
  std::vector<double> h((n + 1) * w);
  auto at = [&](std::size_t i, std::size_t j) -> double& { return h[i * w + j]; };
  auto sub = [&](std::size_t i, std::size_t j) {
    return a[i - 1] == b[j - 1] ? cfg.match : cfg.mismatch;
  };

  for (std::size_t i = 1; i <= n; ++i) at(i, 0) = at(i - 1, 0) + cfg.gap;
  for (std::size_t j = 1; j <= m; ++j) at(0, j) = at(0, j - 1) + cfg.gap;
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      at(i, j) = std::max({at(i - 1, j - 1) + sub(i, j), at(i - 1, j) + cfg.gap,
                           at(i, j - 1) + cfg.gap});
    }
  }

  Alignment out;
  out.score = at(n, m);
  std::size_t i = n;
  std::size_t j = m;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0 && at(i, j) == at(i - 1, j - 1) + sub(i, j)) {
      out.aligned_a.push_back(a[i - 1]);
      out.aligned_b.push_back(b[j - 1]);
      --i;
      --j;
    } else if (i > 0 && at(i, j) == at(i - 1, j) + cfg.gap) {
      out.aligned_a.push_back(a[i - 1]);
      out.aligned_b.push_back(kGap);
      --i;
    } else {
      out.aligned_a.push_back(kGap);
      out.aligned_b.push_back(b[j - 1]);
      --j;
    }
  }
  std::reverse(out.aligned_a.begin(), out.aligned_a.end());
  std::reverse(out.aligned_b.begin(), out.aligned_b.end());
  return out;
}

double global_score(ByteView a, ByteView b, const ScoringConfig& cfg) {
  if (a.size() < b.size()) std::swap(a, b);
  const std::size_t m = b.size();
  std::vector<double> row(m + 1);
  for (std::size_t j = 1; j <= m; ++j) row[j] = row[j - 1] + cfg.gap;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    double diag = row[0];
    row[0] += cfg.gap;
    const auto ai = a[i - 1];
    for (std::size_t j = 1; j <= m; ++j) {
      const double up = row[j];
      const double s = diag + (ai == b[j - 1] ? cfg.match : cfg.mismatch);
      row[j] = std::max({s, up + cfg.gap, row[j - 1] + cfg.gap});
      diag = up;
    }
  }
  return row[m];
}

double distance(ByteView a, ByteView b, const ScoringConfig& cfg) {
  if (a.empty() || b.empty()) throw Error(ErrorCode::EmptyInput, "distance of an empty sequence");
  const double norm = cfg.match * static_cast<double>(std::max(a.size(), b.size()));
  return std::clamp(1.0 - global_score(a, b, cfg) / norm, 0.0, 1.0);
}

ByteSequence degap(std::span<const Symbol> row) {
  ByteSequence out;
  out.reserve(row.size());
  for (Symbol s : row)
    if (s != kGap) out.push_back(static_cast<std::uint8_t>(s));
  return out;
}

namespace {

void check_lengths(const Prototype& p, const Weights& w) {
  if (p.size() != w.size()) {
    throw Error(ErrorCode::LengthMismatch, std::to_string(w.size()) + " weights for a prototype of " +
                                               std::to_string(p.size()) + " symbols");
  }
}

}  // namespace

double weighted_score(const Prototype& prototype, const Weights& weights, ByteView request,
                      const ScoringConfig& cfg) {
  check_lengths(prototype, weights);
  const auto& p = prototype.symbols;
  const auto& w = weights.values;
  const auto ins = insertion_costs(prototype, weights, cfg);

  // Rows follow the prototype, columns the request.
  const std::size_t m = request.size();
  std::vector<double> row(m + 1);
  for (std::size_t j = 1; j <= m; ++j) row[j] = row[j - 1] + ins[0];
  for (std::size_t i = 1; i <= p.size(); ++i) {
    const Symbol pi = p[i - 1];
    const double wi = w[i - 1];
    const double hit = wi * cfg.match;
    const double miss = wi * cfg.mismatch;
    const double wild = wi * cfg.wildcard;
    // A wildcard scores w*x against anything, a gap included.
    const double del = pi == kWildcard ? wild : wi * cfg.gap;
    const double insert = ins[i];
    double diag = row[0];
    row[0] += del;
    for (std::size_t j = 1; j <= m; ++j) {
      const double up = row[j];
      const double s = pi == kWildcard ? wild : (pi == request[j - 1] ? hit : miss);
      row[j] = std::max({diag + s, up + del, row[j - 1] + insert});
      diag = up;
    }
  }
  return row[m];
}

std::vector<double> insertion_costs(const Prototype& prototype, const Weights& weights, const ScoringConfig& cfg) {
  check_lengths(prototype, weights);
  const auto& p = prototype.symbols;
  const auto& w = weights.values;
  const std::size_t n = p.size();
  const double mean_w = n == 0 ? 1.0 : std::accumulate(w.begin(), w.end(), 0.0) / static_cast<double>(n);
  std::vector<double> out(n + 1, mean_w * cfg.gap);
  const double absorbed = std::min(cfg.wildcard, 0.0);
  for (std::size_t i = 0; i <= n; ++i) {
    // Slot i sits between prototype positions i-1 and i.
    double wild_w = -1.0;
    if (i > 0 && p[i - 1] == kWildcard) wild_w = std::max(wild_w, w[i - 1]);
    if (i < n && p[i] == kWildcard) wild_w = std::max(wild_w, w[i]);
    if (wild_w >= 0.0) out[i] = wild_w * absorbed;
  }
  return out;
}

double max_score(const Prototype& prototype, const Weights& weights, const ScoringConfig& cfg) {
  check_lengths(prototype, weights);
  double s = 0.0;
  for (std::size_t i = 0; i < prototype.size(); ++i) {
    s += weights.values[i] * (prototype.symbols[i] == kWildcard ? cfg.wildcard : cfg.match);
  }
  return s;
}

double min_score(const Prototype& prototype, const Weights& weights, const ScoringConfig& cfg) {
  check_lengths(prototype, weights);
  double s = 0.0;
  for (std::size_t i = 0; i < prototype.size(); ++i) {
    s += weights.values[i] * (prototype.symbols[i] == kWildcard ? cfg.wildcard : cfg.mismatch);
  }
  return s;
}

RelativeDistance relative_distance(const Prototype& prototype, const Weights& weights,
                                   ByteView request, const ScoringConfig& cfg) {
  const double hi = max_score(prototype, weights, cfg);
  const double lo = min_score(prototype, weights, cfg);
  if (!(hi > lo)) return {1.0, true};
  const double s = weighted_score(prototype, weights, request, cfg);
  return {std::clamp(1.0 - (s - lo) / (hi - lo), 0.0, 1.0), false};
}

}  // namespace opaque
