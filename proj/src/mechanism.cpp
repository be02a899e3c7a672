#include "menuforge/mechanism.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "json.hpp"

namespace menuforge {

namespace {

double require_param(const std::optional<double>& p, const char* name) {
  if (!p) throw std::domain_error(std::string("menu_of: missing parameter ") + name);
  return *p;
}

// Offset along the 45-degree direction at which the allocation jumps to
// item 1 (pure first good). Depends only on the side lengths.
double top_jump(StructureLabel label, const SupportRect& rect) {
  switch (label) {
    case StructureLabel::Dp:
    case StructureLabel::Ep:
      return rect.b1 / 2.0 - rect.b2 / 4.0;
    default:
      return rect.b1 / 3.0;
  }
}

Polygon exclusion_polygon(StructureLabel label, const MechanismParams& params,
                          const SupportRect& rect) {
  UnifiedParams u = unify(label, params);
  std::vector<Point> offs = {{0.0, 0.0},
                             {u.delta1, 0.0},
                             {u.delta_star + u.h, u.h},
                             {0.0, u.delta2}};
  const double tol = kGeomTol * (rect.b1 + rect.b2);
  std::vector<Point> keep;
  for (const Point& p : offs) {
    if (!keep.empty() && std::abs(p.x - keep.back().x) <= tol &&
        std::abs(p.y - keep.back().y) <= tol)
      continue;
    keep.push_back(p);
  }
  while (keep.size() > 1 && std::abs(keep.back().x - keep.front().x) <= tol &&
         std::abs(keep.back().y - keep.front().y) <= tol)
    keep.pop_back();
  Polygon z;
  for (const Point& p : keep) z.v.push_back({rect.c1 + p.x, rect.c2 + p.y});
  return z;
}

Point mirror(Point p) { return {p.y, p.x}; }

Polygon mirror(const Polygon& poly) {
  Polygon out;
  out.v.reserve(poly.v.size());
  for (const Point& p : poly.v) out.v.push_back(mirror(p));
  // Reflection reverses orientation; restore counterclockwise order.
  if (out.v.size() >= 3) std::reverse(out.v.begin() + 1, out.v.end());
  return out;
}

}  // namespace

Menu menu_of(StructureLabel label, const MechanismParams& params, const SupportRect& rect) {
  const double c1 = rect.c1, c2 = rect.c2;
  Menu menu;  // starts with the null item
  switch (label) {
    case StructureLabel::A: {
      double d1 = require_param(params.delta1, "delta1");
      double d2 = require_param(params.delta2, "delta2");
      menu.add({1.0, 0.0, c1 + d1});
      menu.add({0.0, 1.0, c2 + d2});
      break;
    }
    case StructureLabel::B: {
      double d1 = require_param(params.delta1, "delta1");
      double d2 = require_param(params.delta2, "delta2");
      double a2 = require_param(params.a2, "a2");
      menu.add({1.0, 0.0, c1 + d1});
      menu.add({0.0, 1.0, c2 + a2 * d2 + (1.0 - a2) * rect.b2 / 3.0});
      menu.add({1.0 - a2, a2, c1 + a2 * d2});
      break;
    }
    case StructureLabel::C: {
      double d1 = require_param(params.delta1, "delta1");
      double d2 = require_param(params.delta2, "delta2");
      double a1 = require_param(params.a1, "a1");
      double a2 = require_param(params.a2, "a2");
      menu.add({1.0, 0.0, c1 + a1 * d1 + (1.0 - a1) * rect.b1 / 3.0});
      menu.add({0.0, 1.0, c2 + a2 * d2 + (1.0 - a2) * rect.b2 / 3.0});
      menu.add({1.0 - a2, a2, c1 + a2 * d2});
      menu.add({a1, 1.0 - a1, c1 + a1 * d1});
      break;
    }
    case StructureLabel::D:
    case StructureLabel::Dp: {
      double d2 = require_param(params.delta2, "delta2");
      double a = require_param(params.a, "a");
      menu.add({1.0, 0.0, c1 + a * d2 + a * top_jump(label, rect)});
      menu.add({0.0, 1.0, c2 + a * d2 + (1.0 - a) * rect.b2 / 3.0});
      menu.add({1.0 - a, a, c1 + a * d2});
      break;
    }
    case StructureLabel::E:
    case StructureLabel::Ep: {
      menu.add({1.0, 0.0, c1 + top_jump(label, rect)});
      menu.add({0.0, 1.0, c2});
      break;
    }
  }
  return menu;
}

Mechanism make_mechanism(const SolveResult& s) {
  Mechanism mech;
  mech.rect = s.rect;
  mech.regime = s.regime;
  mech.params = s.params;
  mech.swapped = s.swapped;
  StructureLabel label = s.regime.label;
  mech.menu = menu_of(label, s.params, s.rect);
  mech.exclusion = exclusion_polygon(label, s.params, s.rect);

  // Best-response partition of the support rectangle.
  const auto& items = mech.menu.items;
  for (int i = 0; i < static_cast<int>(items.size()); ++i) {
    Polygon cell = s.rect.polygon();
    for (int j = 0; j < static_cast<int>(items.size()) && !cell.v.empty(); ++j) {
      if (j == i) continue;
      // u_i >= u_j  <=>  (q1j-q1i) z1 + (q2j-q2i) z2 <= tj - ti
      cell = clip_halfplane(cell, items[j].q1 - items[i].q1, items[j].q2 - items[i].q2,
                            items[j].price - items[i].price);
    }
    if (!cell.v.empty()) mech.partition.emplace_back(i, cell);
  }

  if (s.swapped) {
    mech.rect = SupportRect(s.rect.c2, s.rect.c1, s.rect.b2, s.rect.b1);
    for (MenuItem& it : mech.menu.items) std::swap(it.q1, it.q2);
    mech.exclusion = mirror(mech.exclusion);
    for (auto& cell : mech.partition) cell.second = mirror(cell.second);
  }
  return mech;
}

int best_response(const Mechanism& mech, Point z) {
  const auto& items = mech.menu.items;
  const double tol = 1e-12 * (1.0 + std::abs(z.x) + std::abs(z.y));
  int best = 0;
  double bu = 0.0;
  for (int i = 1; i < static_cast<int>(items.size()); ++i) {
    double u = items[i].utility(z);
    if (u > bu + tol ||
        (u > bu - tol && (items[i].q1 > items[best].q1 + tol ||
                          (std::abs(items[i].q1 - items[best].q1) <= tol &&
                           items[i].price > items[best].price)))) {
      best = i;
      bu = u;
    }
  }
  return best;
}

double revenue(const Mechanism& mech) {
  double total = 0.0;
  for (const auto& [idx, cell] : mech.partition) {
    if (idx == 0) continue;
    total += mech.menu.items[idx].price * region_probability(cell, mech.rect);
  }
  return total;
}

double revenue_via_measure(const Mechanism& mech) {
  double total = 0.0;
  for (const auto& [idx, cell] : mech.partition) {
    const MenuItem& it = mech.menu.items[idx];
    if (idx == 0) continue;  // utility is identically zero on the null cell
    total += mu_bar_integral_affine(mech.rect, cell, it.q1, it.q2, -it.price);
  }
  return total;
}

UtilityPoint utility_profile(const Mechanism& mech, double delta) {
  const auto& items = mech.menu.items;
  const double d = mech.rect.c1 - mech.rect.c2;
  UtilityPoint out{-std::numeric_limits<double>::infinity(), 0.0, 0.0};
  const double tol = 1e-12 * (1.0 + mech.rect.b1 + mech.rect.b2);
  for (int i = 1; i < static_cast<int>(items.size()); ++i) {
    double e = items[i].q1 * (d + delta) - items[i].price;
    if (e > out.u1 + tol || (e > out.u1 - tol && items[i].q1 > out.q1)) {
      out.u1 = e;
      out.q1 = items[i].q1;
    }
  }
  out.z2_star = -out.u1;
  return out;
}

std::vector<double> allocation_breakpoints(const Mechanism& mech) {
  const auto& items = mech.menu.items;
  const double lo = -mech.rect.b2, hi = mech.rect.b1;
  std::vector<std::pair<double, double>> cand;  // (delta, |q1 gap| of the pair)
  for (size_t i = 1; i < items.size(); ++i)
    for (size_t j = i + 1; j < items.size(); ++j) {
      double dq = items[i].q1 - items[j].q1;
      if (std::abs(dq) < kGeomTol) continue;
      double delta = (items[i].price - items[j].price) / dq - (mech.rect.c1 - mech.rect.c2);
      if (delta > lo && delta < hi) cand.emplace_back(delta, std::abs(dq));
    }
  std::sort(cand.begin(), cand.end());
  std::vector<double> out;
  const double eps = 1e-9 * (mech.rect.b1 + mech.rect.b2);
  const double utol = 1e-12 * (1.0 + mech.rect.b1 + mech.rect.b2);
  for (auto [delta, dq] : cand) {
    if (!out.empty() && delta - out.back() < eps) continue;
    // Probe far enough that the utility gap eps*dq clears utility_profile's
    // tie tolerance; near-degenerate menus have tiny allocation steps.
    double probe = std::max(eps, 8.0 * utol / dq);
    double ql = utility_profile(mech, delta - probe).q1;
    double qr = utility_profile(mech, delta + probe).q1;
    if (std::abs(qr - ql) > 1e-9) out.push_back(delta);
  }
  return out;
}

// ---- JSON ---------------------------------------------------------------

std::string to_json(const Mechanism& mech, double revenue_value) {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["support"] = {{"c1", mech.rect.c1}, {"c2", mech.rect.c2},
                  {"b1", mech.rect.b1}, {"b2", mech.rect.b2}};
  j["regime"] = {{"label", to_string(mech.regime.label)}, {"thresholds", mech.regime.thresholds}};
  nlohmann::json p = nlohmann::json::object();
  auto put = [&p](const char* k, const std::optional<double>& v) {
    if (v) p[k] = *v;
  };
  put("delta1", mech.params.delta1);
  put("delta2", mech.params.delta2);
  put("delta_star", mech.params.delta_star);
  put("h", mech.params.h);
  put("a1", mech.params.a1);
  put("a2", mech.params.a2);
  put("a", mech.params.a);
  j["params"] = p;
  j["swapped"] = mech.swapped;
  nlohmann::json menu = nlohmann::json::array();
  for (const MenuItem& it : mech.menu.items)
    menu.push_back({{"q1", it.q1}, {"q2", it.q2}, {"price", it.price}});
  j["menu"] = menu;
  j["revenue"] = revenue_value;
  nlohmann::json excl = nlohmann::json::array();
  for (const Point& v : mech.exclusion.v) excl.push_back({v.x, v.y});
  j["exclusion_vertices"] = excl;
  nlohmann::json cells = nlohmann::json::array();
  for (const auto& [idx, cell] : mech.partition) {
    nlohmann::json verts = nlohmann::json::array();
    for (const Point& v : cell.v) verts.push_back({v.x, v.y});
    cells.push_back({{"item", idx}, {"vertices", verts}});
  }
  j["partition"] = cells;
  return j.dump(2);
}

Mechanism mechanism_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  if (j.value("schema_version", 0) != 1)
    throw std::domain_error("mechanism_from_json: unsupported schema_version");
  Mechanism mech;
  const auto& s = j.at("support");
  mech.rect = SupportRect(s.at("c1").get<double>(), s.at("c2").get<double>(),
                          s.at("b1").get<double>(), s.at("b2").get<double>());
  mech.regime.label = structure_from_string(j.at("regime").at("label").get<std::string>());
  for (auto& [k, v] : j.at("regime").at("thresholds").items())
    mech.regime.thresholds[k] = v.get<double>();
  const auto& p = j.at("params");
  auto get = [&p](const char* k) -> std::optional<double> {
    if (p.contains(k)) return p.at(k).get<double>();
    return std::nullopt;
  };
  mech.params.delta1 = get("delta1");
  mech.params.delta2 = get("delta2");
  mech.params.delta_star = get("delta_star");
  mech.params.h = get("h");
  mech.params.a1 = get("a1");
  mech.params.a2 = get("a2");
  mech.params.a = get("a");
  mech.swapped = j.value("swapped", false);
  bool first = true;
  for (const auto& it : j.at("menu")) {
    MenuItem item{it.at("q1").get<double>(), it.at("q2").get<double>(),
                  it.at("price").get<double>()};
    if (first) {
      first = false;  // the leading null item is created by the Menu itself
      continue;
    }
    mech.menu.add(item);
  }
  for (const auto& v : j.at("exclusion_vertices"))
    mech.exclusion.v.push_back({v.at(0).get<double>(), v.at(1).get<double>()});
  for (const auto& cell : j.at("partition")) {
    Polygon poly;
    for (const auto& v : cell.at("vertices"))
      poly.v.push_back({v.at(0).get<double>(), v.at(1).get<double>()});
    mech.partition.emplace_back(cell.at("item").get<int>(), std::move(poly));
  }
  return mech;
}

}  // namespace menuforge
