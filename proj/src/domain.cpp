#include "menuforge/domain.hpp"

#include <algorithm>

namespace menuforge {

double polygon_signed_area(const Polygon& p) {
  const auto& v = p.v;
  if (v.size() < 3) return 0.0;
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Point& a = v[i];
    const Point& b = v[(i + 1) % v.size()];
    s += a.x * b.y - b.x * a.y;
  }
  return 0.5 * s;
}

Polygon clip_halfplane(const Polygon& p, double a, double b, double c) {
  auto side = [&](Point q) { return a * q.x + b * q.y - c; };
  const auto& v = p.v;
  if (v.empty()) return {};
  if (v.size() == 1) return side(v[0]) <= kGeomTol ? p : Polygon{};
  if (v.size() == 2) {
    // Segment clipping.
    double s0 = side(v[0]), s1 = side(v[1]);
    bool in0 = s0 <= kGeomTol, in1 = s1 <= kGeomTol;
    if (in0 && in1) return p;
    if (!in0 && !in1) return {};
    double t = s0 / (s0 - s1);  // intersection parameter on [0,1]
    Point m{v[0].x + t * (v[1].x - v[0].x), v[0].y + t * (v[1].y - v[0].y)};
    return in0 ? Polygon{{v[0], m}} : Polygon{{m, v[1]}};
  }
  // Sutherland–Hodgman for a convex polygon against one half-plane.
  Polygon out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    Point cur = v[i];
    Point nxt = v[(i + 1) % v.size()];
    double sc = side(cur), sn = side(nxt);
    bool inc = sc <= kGeomTol, inn = sn <= kGeomTol;
    if (inc) out.v.push_back(cur);
    if (inc != inn) {
      double t = sc / (sc - sn);
      out.v.push_back({cur.x + t * (nxt.x - cur.x), cur.y + t * (nxt.y - cur.y)});
    }
  }
  // Remove consecutive duplicates produced by vertices lying on the boundary.
  Polygon dedup;
  for (const Point& q : out.v) {
    if (dedup.v.empty() || std::abs(q.x - dedup.v.back().x) > kGeomTol ||
        std::abs(q.y - dedup.v.back().y) > kGeomTol)
      dedup.v.push_back(q);
  }
  while (dedup.v.size() > 1 && std::abs(dedup.v.front().x - dedup.v.back().x) <= kGeomTol &&
         std::abs(dedup.v.front().y - dedup.v.back().y) <= kGeomTol)
    dedup.v.pop_back();
  return dedup;
}

Polygon intersect_with_rect(const Polygon& p, const SupportRect& r) {
  Polygon q = p;
  q = clip_halfplane(q, -1.0, 0.0, -r.c1);          // x >= c1
  q = clip_halfplane(q, 1.0, 0.0, r.c1 + r.b1);     // x <= c1+b1
  q = clip_halfplane(q, 0.0, -1.0, -r.c2);          // y >= c2
  q = clip_halfplane(q, 0.0, 1.0, r.c2 + r.b2);     // y <= c2+b2
  return q;
}

double region_probability(const Polygon& poly, const SupportRect& rect) {
  return polygon_area(intersect_with_rect(poly, rect)) / rect.area();
}

bool point_in_polygon(Point z, const Polygon& p, double tol) {
  const auto& v = p.v;
  if (v.empty()) return false;
  if (v.size() == 1) return std::abs(z.x - v[0].x) <= tol && std::abs(z.y - v[0].y) <= tol;
  if (v.size() == 2) {
    // On-segment test.
    double dx = v[1].x - v[0].x, dy = v[1].y - v[0].y;
    double len2 = dx * dx + dy * dy;
    if (len2 == 0.0) return std::abs(z.x - v[0].x) <= tol && std::abs(z.y - v[0].y) <= tol;
    double cross = (z.x - v[0].x) * dy - (z.y - v[0].y) * dx;
    if (std::abs(cross) > tol * std::sqrt(len2)) return false;
    double t = ((z.x - v[0].x) * dx + (z.y - v[0].y) * dy) / len2;
    return t >= -tol && t <= 1.0 + tol;
  }
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Point& a = v[i];
    const Point& b = v[(i + 1) % v.size()];
    double cross = (b.x - a.x) * (z.y - a.y) - (b.y - a.y) * (z.x - a.x);
    if (cross < -tol) return false;  // CCW polygon: inside means left of every edge
  }
  return true;
}

}  // namespace menuforge
