#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "sqa/pimc.hpp"
#include "sqa/rng.hpp"

namespace sqa::pimc {

// Scratch buffers reused across Monte Carlo steps.
struct MoveWorkspace {
  std::vector<std::uint32_t> breaks;
  std::vector<std::uint32_t> satisfied;
  std::vector<std::uint32_t> parent;
  std::vector<std::int8_t> decision;
  std::vector<std::uint32_t> stack;
  std::vector<std::uint32_t> mark;
  std::uint32_t generation = 0;
};

namespace detail {

// Calls on_pick(j) for the members of {0..n-1} picked independently with
// probability p, in increasing order, drawing only one geometric variate
// per pick.
template <DecisionSource R, class F>
void pick_each(R& rng, double p, std::size_t n, F&& on_pick) {
  std::size_t j = rng.first_success(p, n);
  while (j < n) {
    on_pick(j);
    const std::size_t rest = n - j - 1;
    j += 1 + rng.first_success(p, rest);
  }
}

// Temporal bonds of one column that do NOT join their two spins: every
// unsatisfied bond, plus each satisfied bond with probability q. Bond k
// links slices k and k+1 (mod P). Output is sorted.
template <DecisionSource R>
void column_breaks(const std::int8_t* col, std::size_t trotter, double q, R& rng, MoveWorkspace& ws) {
  ws.breaks.clear();
  ws.satisfied.clear();
  for (std::size_t k = 0; k + 1 < trotter; ++k)
    if (col[k] == col[k + 1]) ws.satisfied.push_back(static_cast<std::uint32_t>(k));
  if (col[trotter - 1] == col[0]) ws.satisfied.push_back(static_cast<std::uint32_t>(trotter - 1));

  std::size_t next_sat = 0;
  pick_each(rng, q, ws.satisfied.size(), [&](std::size_t j) {
    // unsatisfied bonds before satisfied bond j
    const std::uint32_t bond = ws.satisfied[j];
    for (std::uint32_t k = next_sat == 0 ? 0 : ws.satisfied[next_sat - 1] + 1; k < bond; ++k)
      if (col[k] != col[(k + 1) % trotter]) ws.breaks.push_back(k);
    ws.breaks.push_back(bond);
    next_sat = j + 1;
  });
  const std::uint32_t from = next_sat == 0 ? 0 : ws.satisfied[next_sat - 1] + 1;
  for (std::uint32_t k = from; k < trotter; ++k)
    if (col[k] != col[(k + 1) % trotter]) ws.breaks.push_back(k);
}

inline std::uint32_t find_root(std::vector<std::uint32_t>& parent, std::uint32_t x) {
  while (parent[x] != x) {
    parent[x] = parent[parent[x]];
    x = parent[x];
  }
  return x;
}

inline void unite(std::vector<std::uint32_t>& parent, std::uint32_t a, std::uint32_t b) {
  a = find_root(parent, a);
  b = find_root(parent, b);
  if (a == b) return;
  if (a < b) parent[b] = a;
  else parent[a] = b;
}

}  // namespace detail

// One MCS of time-cluster moves: for every site in order, split its column
// into Swendsen-Wang clusters along imaginary time and propose each cluster
// flip with Metropolis acceptance on the spatial part of the action.
template <DecisionSource R>
void time_cluster_sweep(PathConfig& cfg, const StepCouplings& c, R& rng, MoveWorkspace& ws) {
  const std::size_t n = cfg.length();
  const std::size_t p = cfg.trotter();
  for (std::size_t i = 0; i < n; ++i) {
    std::int8_t* col = cfg.column(i);
    const std::int8_t* left = i > 0 ? cfg.column(i - 1) : nullptr;
    const std::int8_t* right = i + 1 < n ? cfg.column(i + 1) : nullptr;

    // weight of flipping the slices [begin, end) alone
    auto overlap = [&](std::size_t begin, std::size_t end, long& a, long& b) {
      if (left)
        for (std::size_t k = begin; k < end; ++k) a += col[k] * left[k];
      if (right)
        for (std::size_t k = begin; k < end; ++k) b += col[k] * right[k];
    };
    auto weight = [&](std::size_t begin, std::size_t end) {
      long a = 0, b = 0;
      overlap(begin, end, a, b);
      return c.flip_weight(i, n, a, b);
    };
    auto flip = [&](std::size_t begin, std::size_t end) {
      for (std::size_t k = begin; k < end; ++k) col[k] = static_cast<std::int8_t>(-col[k]);
    };

    if (c.frozen || p == 1) {
      ws.breaks.clear();
    } else {
      detail::column_breaks(col, p, c.temporal_break, rng, ws);
    }

    if (ws.breaks.empty()) {
      if (rng.bernoulli(weight(0, p))) flip(0, p);
      continue;
    }
    const std::size_t m = ws.breaks.size();
    for (std::size_t j = 0; j < m; ++j) {
      const std::size_t begin = ws.breaks[j] + 1;
      if (j + 1 < m) {
        const std::size_t end = ws.breaks[j + 1] + 1;
        if (rng.bernoulli(weight(begin, end))) flip(begin, end);
      } else {
        // wraps around slice P-1 -> 0
        const std::size_t end = ws.breaks[0] + 1;
        long a = 0, b = 0;
        overlap(begin, p, a, b);
        overlap(0, end, a, b);
        if (rng.bernoulli(c.flip_weight(i, n, a, b))) {
          flip(begin, p);
          flip(0, end);
        }
      }
    }
  }
}

// One MCS of space-time Swendsen-Wang: full Fortuin-Kasteleyn decomposition
// over spatial and temporal bonds, every cluster flipped with probability 1/2
// (decided in order of the cluster's lowest site index).
template <DecisionSource R>
void spacetime_sw_sweep(PathConfig& cfg, const StepCouplings& c, R& rng, MoveWorkspace& ws) {
  const std::size_t n = cfg.length();
  const std::size_t p = cfg.trotter();
  const std::size_t sites = n * p;
  ws.parent.resize(sites);
  std::iota(ws.parent.begin(), ws.parent.end(), 0u);

  for (std::size_t i = 0; i < n; ++i) {
    const auto base = static_cast<std::uint32_t>(i * p);
    if (p == 1) continue;
    if (c.frozen) {
      for (std::uint32_t k = 1; k < p; ++k) detail::unite(ws.parent, base, base + k);
      continue;
    }
    const std::int8_t* col = cfg.column(i);
    detail::column_breaks(col, p, c.temporal_break, rng, ws);
    std::size_t b = 0;
    for (std::uint32_t k = 0; k < p; ++k) {
      if (b < ws.breaks.size() && ws.breaks[b] == k) {
        ++b;
        continue;
      }
      detail::unite(ws.parent, base + k, base + static_cast<std::uint32_t>((k + 1) % p));
    }
  }

  for (std::size_t i = 0; i + 1 < n; ++i) {
    const std::int8_t* a = cfg.column(i);
    const std::int8_t* b = cfg.column(i + 1);
    ws.satisfied.clear();
    for (std::uint32_t k = 0; k < p; ++k)
      if (a[k] == b[k]) ws.satisfied.push_back(k);
    const auto base = static_cast<std::uint32_t>(i * p);
    detail::pick_each(rng, c.spatial_bond[i], ws.satisfied.size(), [&](std::size_t j) {
      const std::uint32_t k = ws.satisfied[j];
      detail::unite(ws.parent, base + k, base + static_cast<std::uint32_t>(p) + k);
    });
  }

  ws.decision.assign(sites, -1);
  auto& spins = cfg.raw();
  for (std::uint32_t x = 0; x < sites; ++x) {
    const std::uint32_t r = detail::find_root(ws.parent, x);
    if (ws.decision[r] < 0) ws.decision[r] = rng.bernoulli(0.5) ? 1 : 0;
    if (ws.decision[r]) spins[x] = static_cast<std::int8_t>(-spins[x]);
  }
}

// One MCS of space-time Wolff: grow a single cluster from a uniformly chosen
// seed spin and flip it.
template <DecisionSource R>
void spacetime_wolff_step(PathConfig& cfg, const StepCouplings& c, R& rng, MoveWorkspace& ws) {
  const std::size_t n = cfg.length();
  const std::size_t p = cfg.trotter();
  const std::size_t sites = n * p;
  if (ws.mark.size() != sites) {
    ws.mark.assign(sites, 0);
    ws.generation = 0;
  }
  if (++ws.generation == 0) {
    std::fill(ws.mark.begin(), ws.mark.end(), 0);
    ws.generation = 1;
  }
  const std::uint32_t gen = ws.generation;
  auto& spins = cfg.raw();
  const double p_temporal = 1.0 - c.temporal_break;

  const auto seed = static_cast<std::uint32_t>(rng.index(sites));
  ws.stack.clear();
  ws.stack.push_back(seed);
  ws.mark[seed] = gen;

  auto try_add = [&](std::uint32_t from, std::uint32_t to, double prob, bool always) {
    if (ws.mark[to] == gen) return;
    if (!always && spins[to] != spins[from]) return;
    if (always || rng.bernoulli(prob)) {
      ws.mark[to] = gen;
      ws.stack.push_back(to);
    }
  };

  std::size_t head = 0;
  while (head < ws.stack.size()) {
    const std::uint32_t x = ws.stack[head++];
    const std::size_t i = x / p;
    const std::size_t k = x % p;
    if (p > 1) {
      const auto up = static_cast<std::uint32_t>(i * p + (k + 1) % p);
      const auto down = static_cast<std::uint32_t>(i * p + (k + p - 1) % p);
      try_add(x, up, p_temporal, c.frozen);
      try_add(x, down, p_temporal, c.frozen);
    }
    if (i > 0) try_add(x, static_cast<std::uint32_t>(x - p), c.spatial_bond[i - 1], false);
    if (i + 1 < n) try_add(x, static_cast<std::uint32_t>(x + p), c.spatial_bond[i], false);
  }
  for (std::uint32_t x : ws.stack) spins[x] = static_cast<std::int8_t>(-spins[x]);
}

template <DecisionSource R>
void monte_carlo_step(MoveFamily family, PathConfig& cfg, const StepCouplings& c, R& rng, MoveWorkspace& ws) {
  switch (family) {
    case MoveFamily::time_cluster:
      time_cluster_sweep(cfg, c, rng, ws);
      break;
    case MoveFamily::spacetime_sw:
      spacetime_sw_sweep(cfg, c, rng, ws);
      break;
    case MoveFamily::spacetime_wolff:
      spacetime_wolff_step(cfg, c, rng, ws);
      break;
  }
}

}  // namespace sqa::pimc
