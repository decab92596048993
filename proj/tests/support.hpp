#pragma once

// Brute-force oracles and loopback helpers shared by the unit tests and the
// acceptance binary.

#include <bit>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "opaque/framing.hpp"
#include "opaque/prototype.hpp"
#include "opaque/protomodel.hpp"
#include "opaque/seqalign.hpp"
#include "opaque/socket.hpp"

namespace opaque::testing {

// Every global alignment is fixed, score-wise, by its set of aligned
// (diagonal) pairs: a strictly increasing chain (i1,j1) < (i2,j2) < ...
// Every other position sits against a gap. Enumerating chains enumerates
// all alignments up to the order of adjacent gaps, which does not change
// the score.
inline void for_each_chain(std::size_t la, std::size_t lb,
                           const std::function<void(const std::vector<std::pair<std::size_t, std::size_t>>&)>& fn) {
  std::vector<std::pair<std::size_t, std::size_t>> chain;
  std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t i0, std::size_t j0) {
    fn(chain);
    for (std::size_t i = i0; i < la; ++i) {
      for (std::size_t j = j0; j < lb; ++j) {
        chain.emplace_back(i, j);
        rec(i + 1, j + 1);
        chain.pop_back();
      }
    }
  };
  rec(0, 0);
}

// Chains for an la x lb grid as bit masks over cell i*lb+j (la*lb <= 64).
struct ChainMask {
  std::uint64_t cells = 0;
  int pairs = 0;
};

inline std::vector<ChainMask> chain_masks(std::size_t la, std::size_t lb) {
  std::vector<ChainMask> out;
  for_each_chain(la, lb, [&](const auto& chain) {
    ChainMask m;
    for (auto [i, j] : chain) m.cells |= std::uint64_t{1} << (i * lb + j);
    m.pairs = static_cast<int>(chain.size());
    out.push_back(m);
  });
  return out;
}

// Best score over all alignments, given the equality mask of a and b.
inline double brute_force_score(std::uint64_t equal_cells, std::size_t la, std::size_t lb,
                                const std::vector<ChainMask>& chains, const ScoringConfig& cfg) {
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& c : chains) {
    const int hits = std::popcount(c.cells & equal_cells);
    const double s = hits * cfg.match + (c.pairs - hits) * cfg.mismatch +
                     static_cast<double>(la + lb - 2 * static_cast<std::size_t>(c.pairs)) * cfg.gap;
    best = std::max(best, s);
  }
  return best;
}

inline std::uint64_t equality_mask(ByteView a, ByteView b) {
  std::uint64_t m = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j)
      if (a[i] == b[j]) m |= std::uint64_t{1} << (i * b.size() + j);
  return m;
}

inline double brute_force_score(ByteView a, ByteView b, const ScoringConfig& cfg = {}) {
  return brute_force_score(equality_mask(a, b), a.size(), b.size(), chain_masks(a.size(), b.size()), cfg);
}

// Score of a finished alignment, column by column.
inline double score_columns(const Alignment& aln, const ScoringConfig& cfg = {}) {
  double s = 0.0;
  for (std::size_t c = 0; c < aln.aligned_a.size(); ++c) {
    const Symbol x = aln.aligned_a[c];
    const Symbol y = aln.aligned_b[c];
    if (x == kGap || y == kGap) {
      s += cfg.gap;
    } else {
      s += x == y ? cfg.match : cfg.mismatch;
    }
  }
  return s;
}

// Weighted prototype alignment by enumerating every alignment path. A
// wildcard scores w*x against anything; a literal against a gap costs w*g.
// A request byte against a gap costs mean(w)*g, or w*min(x,0) when either
// prototype neighbour of its slot is a wildcard (larger weight wins).
// Gap order matters here, so chains are not enough.
inline double brute_force_weighted(const Prototype& p, const Weights& w, ByteView r, const ScoringConfig& cfg = {}) {
  const std::size_t n = p.size();
  const std::size_t m = r.size();
  double mean = 0.0;
  for (double v : w.values) mean += v;
  mean = n == 0 ? 1.0 : mean / static_cast<double>(n);
  auto slot_cost = [&](std::size_t i) {
    double best_w = -1.0;
    if (i > 0 && p.symbols[i - 1] == kWildcard) best_w = std::max(best_w, w.values[i - 1]);
    if (i < n && p.symbols[i] == kWildcard) best_w = std::max(best_w, w.values[i]);
    return best_w >= 0.0 ? best_w * std::min(cfg.wildcard, 0.0) : mean * cfg.gap;
  };
  double best = -std::numeric_limits<double>::infinity();
  std::function<void(std::size_t, std::size_t, double)> walk = [&](std::size_t i, std::size_t j, double s) {
    if (i == n && j == m) {
      best = std::max(best, s);
      return;
    }
    if (i < n && j < m) {
      const Symbol pi = p.symbols[i];
      walk(i + 1, j + 1, s + w.values[i] * (pi == kWildcard ? cfg.wildcard : (pi == r[j] ? cfg.match : cfg.mismatch)));
    }
    if (i < n) walk(i + 1, j, s + w.values[i] * (p.symbols[i] == kWildcard ? cfg.wildcard : cfg.gap));
    if (j < m) walk(i, j + 1, s + slot_cost(i));
  };
  walk(0, 0, 0.0);
  return best;
}

// Joint strings of length n over at most `alphabet` symbols in restricted
// growth form: the first occurrence of symbol k follows that of k-1. Every
// string maps onto exactly one of these by relabeling.
inline void for_each_restricted_growth(std::size_t n, int alphabet,
                                       const std::function<void(const std::vector<std::uint8_t>&)>& fn) {
  std::vector<std::uint8_t> s(n);
  std::function<void(std::size_t, int)> rec = [&](std::size_t pos, int used) {
    if (pos == n) {
      fn(s);
      return;
    }
    for (int c = 0; c <= std::min(used, alphabet - 1); ++c) {
      s[pos] = static_cast<std::uint8_t>('A' + c);
      rec(pos + 1, std::max(used, c + 1));
    }
  };
  rec(0, 0);
}

// Clause-by-clause evaluation of the prototype rule on one column.
// c is the modal symbol: the highest count, an octet preferred over a gap,
// the smaller octet among equals.
inline std::optional<Symbol> eq1_symbol(const std::map<Symbol, std::uint32_t>& column, std::uint32_t rows,
                                        double f) {
  std::uint32_t top = 0;
  for (const auto& [sym, n] : column) top = std::max(top, n);
  Symbol c = kGap;
  bool octet_found = false;
  for (const auto& [sym, n] : column) {
    if (n == top && sym != kGap && !octet_found) {
      c = sym;
      octet_found = true;
    }
  }
  const double q = static_cast<double>(top) / static_cast<double>(rows);
  if (q >= f && c != kGap) return c;
  if (q >= 0.5 && c == kGap) return std::nullopt;  // truncation
  return kWildcard;
}

inline Prototype eq1_prototype(const OccurrenceTable& table, double f) {
  Prototype p;
  for (const auto& col : table.columns) {
    if (auto s = eq1_symbol(col, table.rows, f)) p.symbols.push_back(*s);
  }
  return p;
}

// One framed request/response exchange on an open connection.
inline ByteSequence exchange(Socket& sock, MessageReader& reader, const FramingConfig& framing, ByteView request) {
  const auto wire = encode_frame(framing, request);
  sock.write_all(wire);
  auto msg = reader.next(nullptr, std::chrono::milliseconds(5000));
  if (!msg) throw Error(ErrorCode::IoFailure, "connection closed before a response");
  return *msg;
}

inline Endpoint loopback(std::uint16_t port = 0) { return Endpoint::parse("127.0.0.1:" + std::to_string(port)); }

}  // namespace opaque::testing
