#include "opaque/clusterer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <thread>
#include <tuple>

namespace opaque {

DistanceMatrix::DistanceMatrix(std::vector<TransactionIndex> labels)
    : labels_(std::move(labels)), d_(labels_.size() * labels_.size(), 0.0) {}

void DistanceMatrix::set(std::size_t i, std::size_t j, double value) noexcept {
  d_[i * labels_.size() + j] = value;
  d_[j * labels_.size() + i] = value;
}

std::size_t DistanceMatrix::position_of(TransactionIndex label) const {
  auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) throw std::out_of_range("label not in distance matrix");
  return static_cast<std::size_t>(it - labels_.begin());
}

DistanceMatrix DistanceMatrix::restrict_to(std::span<const TransactionIndex> labels) const {
  std::map<TransactionIndex, std::size_t> where;
  for (std::size_t i = 0; i < labels_.size(); ++i) where.emplace(labels_[i], i);
  std::vector<std::size_t> pos;
  pos.reserve(labels.size());
  for (auto l : labels) {
    auto it = where.find(l);
    if (it == where.end()) throw std::out_of_range("label not in distance matrix");
    pos.push_back(it->second);
  }
  DistanceMatrix out(std::vector<TransactionIndex>(labels.begin(), labels.end()));
  for (std::size_t i = 0; i < pos.size(); ++i)
    for (std::size_t j = i + 1; j < pos.size(); ++j) out.set(i, j, (*this)(pos[i], pos[j]));
  return out;
}

DistanceMatrix pairwise_matrix(std::vector<TransactionIndex> labels,
                               const std::function<double(std::size_t, std::size_t)>& dist,
                               unsigned threads) {
  DistanceMatrix out(std::move(labels));
  const std::size_t n = out.size();
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(n, 1)));
  // Rows are interleaved across workers; each writes only its own (i, j>i) cells.
  auto work = [&](unsigned t) {
    for (std::size_t i = t; i < n; i += threads)
      for (std::size_t j = i + 1; j < n; ++j) out.set(i, j, dist(i, j));
  };
  if (threads <= 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work, t);
  }
  return out;
}

namespace {

std::vector<TransactionIndex> library_labels(const TransactionLibrary& library) {
  std::vector<TransactionIndex> labels;
  labels.reserve(library.size());
  for (const auto& t : library) labels.push_back(t.index);
  return labels;
}

}  // namespace

DistanceMatrix response_distance_matrix(const TransactionLibrary& library, const ScoringConfig& cfg,
                                        unsigned threads) {
  if (library.empty()) throw Error(ErrorCode::EmptyLibrary, "cannot cluster an empty library");
  return pairwise_matrix(
      library_labels(library),
      [&](std::size_t i, std::size_t j) { return distance(library[i].response, library[j].response, cfg); },
      threads);
}

DistanceMatrix request_distance_matrix(const TransactionLibrary& library, const ScoringConfig& cfg,
                                       unsigned threads) {
  if (library.empty()) throw Error(ErrorCode::EmptyLibrary, "empty library");
  return pairwise_matrix(
      library_labels(library),
      [&](std::size_t i, std::size_t j) { return distance(library[i].request, library[j].request, cfg); },
      threads);
}

std::vector<Merge> agglomerate_average(const DistanceMatrix& matrix) {
  const std::size_t n = matrix.size();
  std::vector<Merge> merges;
  if (n < 2) return merges;
  merges.reserve(n - 1);

  // Working copy; slot s holds cluster node_of[s] while active[s].
  std::vector<double> d(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) d[i * n + j] = matrix(i, j);
  std::vector<std::size_t> node_of(n);
  std::iota(node_of.begin(), node_of.end(), 0);
  std::vector<std::size_t> size(n, 1);
  std::vector<bool> active(n, true);

  using Key = std::tuple<double, std::size_t, std::size_t>;
  auto key = [&](std::size_t a, std::size_t b) {
    const auto na = node_of[a];
    const auto nb = node_of[b];
    return Key{d[a * n + b], std::min(na, nb), std::max(na, nb)};
  };
  constexpr auto kNone = std::numeric_limits<std::size_t>::max();
  const Key kWorst{std::numeric_limits<double>::infinity(), kNone, kNone};
  std::vector<Key> best(n, kWorst);
  std::vector<std::size_t> partner(n, kNone);

  auto rescan = [&](std::size_t a) {
    best[a] = kWorst;
    partner[a] = kNone;
    for (std::size_t b = 0; b < n; ++b) {
      if (b == a || !active[b]) continue;
      const Key k = key(a, b);
      if (k < best[a]) {
        best[a] = k;
        partner[a] = b;
      }
    }
  };
  for (std::size_t a = 0; a < n; ++a) rescan(a);

  for (std::size_t step = 0; step + 1 < n; ++step) {
    std::size_t a = kNone;
    for (std::size_t s = 0; s < n; ++s) {
      if (active[s] && partner[s] != kNone && (a == kNone || best[s] < best[a])) a = s;
    }
    std::size_t b = partner[a];
    if (b < a) std::swap(a, b);

    merges.push_back({node_of[a], node_of[b], d[a * n + b], size[a] + size[b]});
    const double sa = static_cast<double>(size[a]);
    const double sb = static_cast<double>(size[b]);
    for (std::size_t k = 0; k < n; ++k) {
      if (!active[k] || k == a || k == b) continue;
      const double v = (sa * d[a * n + k] + sb * d[b * n + k]) / (sa + sb);
      d[a * n + k] = v;
      d[k * n + a] = v;
    }
    active[b] = false;
    size[a] += size[b];
    node_of[a] = n + step;

    rescan(a);
    for (std::size_t k = 0; k < n; ++k) {
      if (!active[k] || k == a) continue;
      if (partner[k] == a || partner[k] == b) {
        rescan(k);
      } else {
        const Key cand = key(k, a);
        if (cand < best[k]) {
          best[k] = cand;
          partner[k] = a;
        }
      }
    }
  }
  return merges;
}

namespace {

std::size_t find_root(std::vector<std::size_t>& parent, std::size_t x) {
  while (parent[x] != x) {
    parent[x] = parent[parent[x]];
    x = parent[x];
  }
  return x;
}

}  // namespace

ClusterSet cluster(const DistanceMatrix& matrix, std::size_t k) {
  const std::size_t n = matrix.size();
  if (k < 1 || k > n) {
    throw Error(ErrorCode::BadK, "k = " + std::to_string(k) + " with " + std::to_string(n) + " transactions");
  }
  const auto merges = agglomerate_average(matrix);
  // Node ids span leaves and internal nodes.
  std::vector<std::size_t> parent(2 * n);
  std::iota(parent.begin(), parent.end(), 0);
  for (std::size_t t = 0; t < n - k; ++t) {
    parent[merges[t].left] = n + t;
    parent[merges[t].right] = n + t;
  }
  std::map<std::size_t, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < n; ++i) groups[find_root(parent, i)].push_back(i);

  std::vector<std::vector<std::size_t>> ordered;
  for (auto& [root, members] : groups) ordered.push_back(std::move(members));
  for (auto& g : ordered) {
    std::sort(g.begin(), g.end(), [&](auto x, auto y) { return matrix.label(x) < matrix.label(y); });
  }
  std::sort(ordered.begin(), ordered.end(),
            [&](const auto& x, const auto& y) { return matrix.label(x.front()) < matrix.label(y.front()); });

  ClusterSet out;
  for (const auto& g : ordered) {
    Cluster c;
    for (auto p : g) c.members.push_back(matrix.label(p));
    c.centroid = centroid(c.members, matrix);
    out.clusters.push_back(std::move(c));
  }
  return out;
}

TransactionIndex centroid(std::span<const TransactionIndex> members, const DistanceMatrix& matrix) {
  if (members.empty()) throw Error(ErrorCode::EmptyInput, "centroid of an empty cluster");
  std::vector<std::size_t> pos;
  pos.reserve(members.size());
  for (auto m : members) pos.push_back(matrix.position_of(m));

  constexpr double kTieEps = 1e-12;
  TransactionIndex best_label = 0;
  double best_sum = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pos.size(); ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < pos.size(); ++j) sum += matrix(pos[i], pos[j]);
    const auto label = members[i];
    if (sum < best_sum - kTieEps || (std::abs(sum - best_sum) <= kTieEps && label < best_label)) {
      best_sum = std::min(sum, best_sum);
      best_label = label;
    }
  }
  return best_label;
}

}  // namespace opaque
