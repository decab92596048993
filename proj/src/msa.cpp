#include "opaque/msa.hpp"

#include <algorithm>
#include <array>
#include <numeric>

namespace opaque {

GuideTree build_guide_tree(const DistanceMatrix& distances) {
  const std::size_t n = distances.size();
  GuideTree tree;
  tree.leaf_count = n;
  tree.nodes.resize(n);
  for (std::size_t i = 0; i < n; ++i) tree.nodes[i].label = distances.label(i);
  for (const auto& m : agglomerate_average(distances)) {
    GuideTree::Node node;
    node.left = m.left;
    node.right = m.right;
    node.height = m.distance / 2.0;
    tree.nodes.push_back(node);
  }
  return tree;
}

GuideTree build_guide_tree(std::span<const ByteSequence> sequences, const ScoringConfig& cfg) {
  std::vector<TransactionIndex> ids(sequences.size());
  std::iota(ids.begin(), ids.end(), TransactionIndex{0});
  const auto d = pairwise_matrix(
      std::move(ids), [&](std::size_t i, std::size_t j) { return distance(sequences[i], sequences[j], cfg); },
      1);
  return build_guide_tree(d);
}

AlignmentProfile AlignmentProfile::single(ByteView sequence, TransactionIndex id) {
  AlignmentProfile p;
  p.rows.emplace_back(sequence.begin(), sequence.end());
  p.ids.push_back(id);
  return p;
}

namespace {

// Column summary: octet counts (sparse), gap count, row count.
struct Column {
  std::vector<std::pair<std::uint8_t, std::uint32_t>> octets;
  std::uint32_t gaps = 0;
  std::uint32_t rows = 0;
  std::uint32_t filled() const noexcept { return rows - gaps; }
};

std::vector<Column> summarize(const AlignmentProfile& p) {
  const std::size_t len = p.length();
  std::vector<Column> cols(len);
  std::array<std::uint32_t, 256> counts{};
  for (std::size_t c = 0; c < len; ++c) {
    counts.fill(0);
    auto& col = cols[c];
    col.rows = static_cast<std::uint32_t>(p.row_count());
    for (const auto& row : p.rows) {
      if (row[c] == kGap) {
        ++col.gaps;
      } else {
        ++counts[row[c]];
      }
    }
    for (std::size_t s = 0; s < 256; ++s)
      if (counts[s] != 0) col.octets.emplace_back(static_cast<std::uint8_t>(s), counts[s]);
  }
  return cols;
}

}  // namespace

AlignmentProfile align_profiles(const AlignmentProfile& p, const AlignmentProfile& q,
                                const ScoringConfig& cfg) {
  const auto pc = summarize(p);
  const auto qc = summarize(q);
  const std::size_t n = pc.size();
  const std::size_t m = qc.size();

  // Dense octet counts for q's columns so each column pair is one sparse pass.
  std::vector<std::uint32_t> qdense(m * 256, 0);
  for (std::size_t j = 0; j < m; ++j)
    for (auto [s, c] : qc[j].octets) qdense[j * 256 + s] = c;

  auto column_score = [&](std::size_t i, std::size_t j) {
    const Column& u = pc[i];
    const Column& v = qc[j];
    double same = 0.0;
    for (auto [s, c] : u.octets) same += static_cast<double>(c) * qdense[j * 256 + s];
    const double bu = u.filled();
    const double bv = v.filled();
    const double total = cfg.match * same + cfg.mismatch * (bu * bv - same) +
                         cfg.gap * (static_cast<double>(u.gaps) * bv + bu * static_cast<double>(v.gaps));
    return total / (static_cast<double>(u.rows) * static_cast<double>(v.rows));
  };
  // Column against an inserted all-gap column.
  auto gap_p = [&](std::size_t i) { return cfg.gap * pc[i].filled() / static_cast<double>(pc[i].rows); };
  auto gap_q = [&](std::size_t j) { return cfg.gap * qc[j].filled() / static_cast<double>(qc[j].rows); };

  const std::size_t w = m + 1;
  std::vector<double> sub(n * m);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) sub[i * m + j] = column_score(i, j);

  std::vector<double> h((n + 1) * w);
  auto at = [&](std::size_t i, std::size_t j) -> double& { return h[i * w + j]; };
  for (std::size_t i = 1; i <= n; ++i) at(i, 0) = at(i - 1, 0) + gap_p(i - 1);
  for (std::size_t j = 1; j <= m; ++j) at(0, j) = at(0, j - 1) + gap_q(j - 1);
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      at(i, j) = std::max({at(i - 1, j - 1) + sub[(i - 1) * m + (j - 1)], at(i - 1, j) + gap_p(i - 1),
                           at(i, j - 1) + gap_q(j - 1)});
    }
  }

  // Traceback yields, per output column, the source column in p and q (or npos).
  constexpr auto kNone = static_cast<std::size_t>(-1);
  std::vector<std::pair<std::size_t, std::size_t>> path;
  std::size_t i = n;
  std::size_t j = m;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0 && at(i, j) == at(i - 1, j - 1) + sub[(i - 1) * m + (j - 1)]) {
      path.emplace_back(--i, --j);
    } else if (i > 0 && at(i, j) == at(i - 1, j) + gap_p(i - 1)) {
      path.emplace_back(--i, kNone);
    } else {
      path.emplace_back(kNone, --j);
    }
  }
  std::reverse(path.begin(), path.end());

  AlignmentProfile out;
  out.rows.reserve(p.row_count() + q.row_count());
  for (const auto& row : p.rows) {
    std::vector<Symbol> r;
    r.reserve(path.size());
    for (auto [pi, qj] : path) r.push_back(pi == kNone ? kGap : row[pi]);
    out.rows.push_back(std::move(r));
  }
  for (const auto& row : q.rows) {
    std::vector<Symbol> r;
    r.reserve(path.size());
    for (auto [pi, qj] : path) r.push_back(qj == kNone ? kGap : row[qj]);
    out.rows.push_back(std::move(r));
  }
  out.ids = p.ids;
  out.ids.insert(out.ids.end(), q.ids.begin(), q.ids.end());
  return out;
}

AlignmentProfile progressive_align(std::span<const ByteSequence> sequences,
                                   const DistanceMatrix& distances, const ScoringConfig& cfg) {
  if (sequences.empty()) throw Error(ErrorCode::EmptyInput, "nothing to align");
  if (sequences.size() != distances.size()) {
    throw Error(ErrorCode::LengthMismatch, "guide-tree matrix does not match the sequence count");
  }
  const auto tree = build_guide_tree(distances);
  std::vector<AlignmentProfile> node_profiles(tree.nodes.size());
  for (std::size_t i = 0; i < tree.leaf_count; ++i) {
    node_profiles[i] = AlignmentProfile::single(sequences[i], tree.nodes[i].label);
  }
  for (std::size_t node = tree.leaf_count; node < tree.nodes.size(); ++node) {
    const auto& nd = tree.nodes[node];
    node_profiles[node] = align_profiles(node_profiles[nd.left], node_profiles[nd.right], cfg);
    node_profiles[nd.left] = {};
    node_profiles[nd.right] = {};
  }
  return std::move(node_profiles[tree.root()]);
}

AlignmentProfile progressive_align(std::span<const ByteSequence> sequences, const ScoringConfig& cfg) {
  std::vector<TransactionIndex> ids(sequences.size());
  std::iota(ids.begin(), ids.end(), TransactionIndex{0});
  const auto d = pairwise_matrix(
      std::move(ids), [&](std::size_t i, std::size_t j) { return distance(sequences[i], sequences[j], cfg); },
      1);
  return progressive_align(sequences, d, cfg);
}

}  // namespace opaque
