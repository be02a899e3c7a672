#include "menuforge/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace menuforge {

void OracleConfig::validate() const {
  if (!(allocation_grid > 0.0) || !(price_grid > 0.0))
    throw std::domain_error("OracleConfig: grids must be strictly positive");
  if (max_items < 1 || max_items > 4)
    throw std::domain_error("OracleConfig: max_items must be in [1, 4]");
}

double evaluate_menu(const SupportRect& rect, const Menu& menu) {
  double total = 0.0;
  const auto& items = menu.items;
  for (size_t i = 1; i < items.size(); ++i) {
    Polygon cell = rect.polygon();
    for (size_t j = 0; j < items.size() && !cell.v.empty(); ++j) {
      if (j == i) continue;
      cell = clip_halfplane(cell, items[j].q1 - items[i].q1, items[j].q2 - items[i].q2,
                            items[j].price - items[i].price);
    }
    total += items[i].price * region_probability(cell, rect);
  }
  return total;
}

double evaluate_menu_mc(const SupportRect& rect, const Menu& menu, long long n,
                        unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U1(rect.c1, rect.c1 + rect.b1);
  std::uniform_real_distribution<double> U2(rect.c2, rect.c2 + rect.b2);
  double total = 0.0;
  for (long long i = 0; i < n; ++i) {
    Point z{U1(rng), U2(rng)};
    double bu = 0.0, price = 0.0;
    for (size_t j = 1; j < menu.items.size(); ++j) {
      double u = menu.items[j].utility(z);
      if (u > bu) {
        bu = u;
        price = menu.items[j].price;
      }
    }
    total += price;
  }
  return total / static_cast<double>(n);
}

double oracle_epsilon(const SupportRect& rect, const OracleConfig& config) {
  return 2.0 * (config.price_grid + config.allocation_grid * (rect.b1 + rect.b2));
}

namespace {

// Per-item integral H(delta) = integral over s in [-b2, delta] of the length
// of { z in D on the line z1 - z2 = s with utility(a, t) >= 0 }. The
// integrand is piecewise linear in s, so H is evaluated exactly from a small
// breakpoint table with trapezoids.
struct ItemIntegral {
  std::vector<double> s;       // breakpoints, increasing, spanning [-b2, b1]
  std::vector<double> g;       // integrand at breakpoints
  std::vector<double> prefix;  // prefix integral at breakpoints

  double eval(double delta) const {
    if (delta <= s.front()) return 0.0;
    size_t i = std::upper_bound(s.begin(), s.end(), delta) - s.begin();
    if (i >= s.size()) return prefix.back();
    double s0 = s[i - 1], s1 = s[i];
    double w = (delta - s0) / (s1 - s0);
    double gd = g[i - 1] + (g[i] - g[i - 1]) * w;
    return prefix[i - 1] + 0.5 * (g[i - 1] + gd) * (delta - s0);
  }
};

ItemIntegral build_integral(const SupportRect& rect, double a, double t) {
  const double c = rect.c1, b1 = rect.b1, b2 = rect.b2;
  auto top = [&](double s) { return c + std::min(b2, b1 - s); };
  auto bot = [&](double s) { return c + std::max(0.0, -s); };
  auto lower = [&](double s) { return std::max(bot(s), t - a * s); };
  auto integrand = [&](double s) { return std::max(0.0, top(s) - lower(s)); };

  std::vector<double> bps = {-b2, 0.0, b1 - b2, b1};
  // Crossings of the reservation line t - a*s with the four linear pieces.
  auto add_cross = [&](double p, double q, double lo, double hi) {
    // solve t - a*s = p + q*s  ->  s = (t - p) / (a + q)
    double den = a + q;
    if (std::abs(den) < 1e-15) return;
    double s = (t - p) / den;
    if (s > lo + 1e-15 && s < hi - 1e-15) bps.push_back(s);
  };
  add_cross(c, -1.0, -b2, 0.0);          // bot on [-b2, 0] is c - s
  add_cross(c, 0.0, 0.0, b1);            // bot on [0, b1]
  add_cross(c + b2, 0.0, -b2, b1 - b2);  // top on [-b2, b1-b2]
  add_cross(c + b1, -1.0, b1 - b2, b1);  // top on [b1-b2, b1]
  std::sort(bps.begin(), bps.end());

  ItemIntegral out;
  for (double s : bps) {
    if (!out.s.empty() && s - out.s.back() < 1e-14 * (b1 + b2)) continue;
    out.s.push_back(s);
    out.g.push_back(integrand(s));
  }
  out.prefix.resize(out.s.size());
  out.prefix[0] = 0.0;
  for (size_t i = 1; i < out.s.size(); ++i) {
    // Exact: integrand restricted to a panel is linear (a kink strictly
    // inside would be a missed breakpoint), except where max(0, .) clips;
    // clipping only happens at g = 0 so the trapezoid is still exact.
    double mid = 0.5 * (out.g[i - 1] + out.g[i]);
    if (out.g[i - 1] > 0.0 && out.g[i] > 0.0) {
      out.prefix[i] = out.prefix[i - 1] + mid * (out.s[i] - out.s[i - 1]);
    } else if (out.g[i - 1] <= 0.0 && out.g[i] <= 0.0) {
      out.prefix[i] = out.prefix[i - 1];
    } else {
      // one-sided clip: triangle area
      double w = out.s[i] - out.s[i - 1];
      double gpos = std::max(out.g[i - 1], out.g[i]);
      double frac = gpos / (std::abs(out.g[i] - out.g[i - 1]));
      out.prefix[i] = out.prefix[i - 1] + 0.5 * gpos * w * frac;
    }
  }
  return out;
}

struct Entry {
  double tau;       // threshold of the edge entering this node
  double val;       // best path value ending with that edge
  int parent_node;  // previous item node
  int parent_idx;   // entry index in the previous layer (-1 for layer 1)
  int best_idx;     // index of the max-val entry among [0..this] by tau order
};

struct BestState {
  double value = -std::numeric_limits<double>::infinity();
  int node = -1, layer = 0, entry = -1;
};

// Restricted search over lottery items (a, 1-a, t) via layered longest path.
OracleResult search_restricted(const SupportRect& rect, const OracleConfig& config,
                               int top_k) {
  const double c = rect.c1, b1 = rect.b1, b2 = rect.b2;

  struct Node {
    double a, t;
    ItemIntegral H;
    double h_end;  // H(b1)
  };
  std::vector<Node> nodes;
  int na = static_cast<int>(std::llround(1.0 / config.allocation_grid)) + 1;
  int nt = static_cast<int>(std::floor(b1 / config.price_grid + 1e-9)) + 1;
  for (int ia = 0; ia < na; ++ia)
    for (int it = 0; it < nt; ++it) {
      double a = std::min(1.0, ia * config.allocation_grid);
      double t = c + it * config.price_grid;
      Node n{a, t, build_integral(rect, a, t), 0.0};
      n.h_end = n.H.eval(b1);
      if (n.h_end <= 0.0 && t > c) continue;  // never purchased at any z
      nodes.push_back(std::move(n));
    }
  const int N = static_cast<int>(nodes.size());

  OracleResult result;
  long long transitions = static_cast<long long>(N) * N * (config.max_items - 1);
  if (transitions > config.budget) result.partial = true;

  // entries[k] = incoming list for node k in the current layer, sorted by tau.
  std::vector<std::vector<Entry>> prev(N), cur(N);
  std::vector<std::vector<std::vector<Entry>>> layers;  // for backtracking

  std::vector<BestState> finals;
  auto consider_final = [&](double value, int node, int layer, int entry) {
    finals.push_back({value, node, layer, entry});
  };

  // Single-item menus.
  for (int k = 0; k < N; ++k)
    consider_final(nodes[k].t * nodes[k].h_end, k, 0, -1);

  int layer_cap = result.partial ? 1 : config.max_items;
  int nw = config.workers > 0 ? config.workers
                              : static_cast<int>(std::thread::hardware_concurrency());
  nw = std::max(1, nw);

  for (int layer = 1; layer < layer_cap; ++layer) {
    std::vector<std::thread> pool;
    for (int w = 0; w < nw; ++w)
      pool.emplace_back([&, w, layer] {
        for (int k = w; k < N; k += nw) {
          std::vector<Entry>& in = cur[k];
          in.clear();
          for (int j = 0; j < N; ++j) {
            if (nodes[k].a <= nodes[j].a) continue;
            double tau = (nodes[k].t - nodes[j].t) / (nodes[k].a - nodes[j].a);
            if (tau <= -b2 || tau >= b1) continue;
            double base;
            int pidx = -1;
            if (layer == 1) {
              base = 0.0;
            } else {
              const std::vector<Entry>& pj = prev[j];
              if (pj.empty()) continue;
              // best value among entries of j with tau' <= tau
              size_t lo = std::upper_bound(pj.begin(), pj.end(), tau,
                                           [](double x, const Entry& e) {
                                             return x < e.tau;
                                           }) -
                          pj.begin();
              if (lo == 0) continue;
              pidx = pj[lo - 1].best_idx;
              base = pj[pidx].val;
            }
            double w_edge = nodes[j].t * nodes[j].H.eval(tau) -
                            nodes[k].t * nodes[k].H.eval(tau);
            in.push_back({tau, base + w_edge, j, pidx, 0});
          }
          std::sort(in.begin(), in.end(),
                    [](const Entry& x, const Entry& y) { return x.tau < y.tau; });
          for (size_t i = 0; i < in.size(); ++i) {
            in[i].best_idx = static_cast<int>(i);
            if (i > 0 && in[in[i - 1].best_idx].val >= in[i].val)
              in[i].best_idx = in[i - 1].best_idx;
          }
        }
      });
    for (std::thread& th : pool) th.join();

    for (int k = 0; k < N; ++k)
      for (size_t i = 0; i < cur[k].size(); ++i)
        consider_final(cur[k][i].val + nodes[k].t * nodes[k].h_end, k, layer,
                       static_cast<int>(i));
    layers.push_back(cur);
    std::swap(prev, cur);
  }

  // Extract the top menus.
  std::sort(finals.begin(), finals.end(),
            [](const BestState& x, const BestState& y) { return x.value > y.value; });
  int want = std::max(1, top_k);
  for (const BestState& fs : finals) {
    if (static_cast<int>(result.top.size()) >= want) break;
    std::vector<int> path = {fs.node};
    int layer = fs.layer, entry = fs.entry;
    while (layer >= 1) {
      const Entry& e = layers[layer - 1][path.back()][entry];
      path.push_back(e.parent_node);
      entry = e.parent_idx;
      --layer;
    }
    std::reverse(path.begin(), path.end());
    Menu menu;
    for (int id : path) menu.add({nodes[id].a, 1.0 - nodes[id].a, nodes[id].t});
    result.top.emplace_back(std::move(menu), fs.value / (b1 * b2));
  }
  result.best = result.top.front().first;
  // Report the polygon-exact revenue of the winning menu (it agrees with the
  // path value; this keeps a single evaluation path for comparisons).
  result.revenue = evaluate_menu(rect, result.best);
  return result;
}

// Skeptic mode: free (q1, q2) items on coarse grids, direct enumeration with
// polygon-exact evaluation.
OracleResult search_unrestricted(const SupportRect& rect, const OracleConfig& config,
                                 int top_k) {
  const double c1 = rect.c1, c2 = rect.c2, b1 = rect.b1;
  std::vector<MenuItem> cand;
  int nq = static_cast<int>(std::llround(1.0 / config.allocation_grid)) + 1;
  int nt = static_cast<int>(std::floor(b1 / config.price_grid + 1e-9)) + 1;
  Point corners[4] = {{c1, c2},
                      {c1 + rect.b1, c2},
                      {c1, c2 + rect.b2},
                      {c1 + rect.b1, c2 + rect.b2}};
  for (int i = 0; i < nq; ++i)
    for (int j = 0; i + j < nq; ++j)
      for (int it = 0; it < nt; ++it) {
        MenuItem m{i * config.allocation_grid, j * config.allocation_grid,
                   c2 + it * config.price_grid};
        bool useful = false;
        for (const Point& z : corners) useful = useful || m.utility(z) > 0.0;
        if (useful) cand.push_back(m);
      }

  OracleResult result;
  int K = std::min(config.max_items, 3);  // C(n,4) is out of budget by design
  long long n = static_cast<long long>(cand.size());
  long long combos = K >= 3 ? n * n * n / 6 : (K == 2 ? n * n / 2 : n);
  if (combos > config.budget) {
    result.partial = true;
    // Keep the strongest singles so the truncated search stays meaningful.
    std::vector<std::pair<double, MenuItem>> scored;
    for (const MenuItem& m : cand) {
      Menu single;
      single.add(m);
      scored.emplace_back(evaluate_menu(rect, single), m);
    }
    std::sort(scored.begin(), scored.end(),
              [](const auto& x, const auto& y) { return x.first > y.first; });
    long long cap = 400;
    cand.clear();
    for (const auto& [rev, m] : scored) {
      cand.push_back(m);
      if (static_cast<long long>(cand.size()) >= cap) break;
    }
    n = static_cast<long long>(cand.size());
  }

  std::vector<std::pair<double, std::vector<int>>> best_list;
  std::mutex merge_mutex;
  int nw = config.workers > 0 ? config.workers
                              : static_cast<int>(std::thread::hardware_concurrency());
  nw = std::max(1, nw);
  std::vector<std::thread> pool;
  for (int w = 0; w < nw; ++w)
    pool.emplace_back([&, w] {
      std::vector<std::pair<double, std::vector<int>>> local;
      for (long long i = w; i < n; i += nw) {
        Menu m1;
        m1.add(cand[i]);
        local.emplace_back(evaluate_menu(rect, m1), std::vector<int>{(int)i});
        if (K < 2) continue;
        for (long long j = i + 1; j < n; ++j) {
          Menu m2 = m1;
          m2.add(cand[j]);
          local.emplace_back(evaluate_menu(rect, m2), std::vector<int>{(int)i, (int)j});
          if (K < 3) continue;
          for (long long k = j + 1; k < n; ++k) {
            Menu m3 = m2;
            m3.add(cand[k]);
            local.emplace_back(evaluate_menu(rect, m3),
                               std::vector<int>{(int)i, (int)j, (int)k});
          }
        }
        // keep locals bounded
        if (local.size() > 4096) {
          std::sort(local.begin(), local.end(),
                    [](const auto& x, const auto& y) { return x.first > y.first; });
          local.resize(std::max(1, top_k));
        }
      }
      std::sort(local.begin(), local.end(),
                [](const auto& x, const auto& y) { return x.first > y.first; });
      if (local.size() > static_cast<size_t>(std::max(1, top_k)))
        local.resize(std::max(1, top_k));
      std::lock_guard<std::mutex> lock(merge_mutex);
      for (auto& e : local) best_list.push_back(std::move(e));
    });
  for (std::thread& th : pool) th.join();

  std::sort(best_list.begin(), best_list.end(), [](const auto& x, const auto& y) {
    return x.first > y.first || (x.first == y.first && x.second < y.second);
  });
  int want = std::max(1, top_k);
  for (const auto& [rev, ids] : best_list) {
    if (static_cast<int>(result.top.size()) >= want) break;
    Menu menu;
    for (int id : ids) menu.add(cand[id]);
    result.top.emplace_back(std::move(menu), rev);
  }
  result.best = result.top.front().first;
  result.revenue = result.top.front().second;
  return result;
}

}  // namespace

OracleResult oracle_search(const SupportRect& rect, const OracleConfig& config,
                           int top_k) {
  config.validate();
  if (!rect.symmetric())
    throw std::domain_error("oracle_search: symmetric support required");
  return config.unrestricted ? search_unrestricted(rect, config, top_k)
                             : search_restricted(rect, config, top_k);
}

double compare(const Mechanism& mech, const OracleConfig& config) {
  OracleResult oracle = oracle_search(mech.rect, config);
  return revenue(mech) - oracle.revenue;
}

std::string oracle_top_csv(const OracleResult& result) {
  std::ostringstream out;
  out.precision(12);
  out << "rank,revenue,menu\n";
  int rank = 1;
  for (const auto& [menu, rev] : result.top) {
    out << rank++ << ',' << rev << ',';
    for (size_t i = 1; i < menu.items.size(); ++i) {
      const MenuItem& it = menu.items[i];
      if (i > 1) out << ';';
      out << it.q1 << ':' << it.q2 << ':' << it.price;
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace menuforge
