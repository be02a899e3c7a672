#pragma once
// Core geometric and mechanism-description types: the valuation support
// rectangle, convex polygons with exact half-plane clipping, and unit-demand
// menus (allocation pairs with prices).

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace menuforge {

inline constexpr double kGeomTol = 1e-12;

struct Point {
  double x = 0.0;
  double y = 0.0;
};

inline Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
inline Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }

// Convex polygon, counter-clockwise vertex order, first vertex not repeated.
// A polygon with two vertices is a degenerate segment (zero area); with zero
// or one vertex it is empty / a single point.
struct Polygon {
  std::vector<Point> v;

  bool empty() const { return v.empty(); }
  std::size_t size() const { return v.size(); }
};

// Support rectangle [c1, c1+b1] x [c2, c2+b2] of the uniform valuation
// distribution.
struct SupportRect {
  double c1 = 0.0;
  double c2 = 0.0;
  double b1 = 1.0;
  double b2 = 1.0;

  SupportRect() = default;
  SupportRect(double c1_, double c2_, double b1_, double b2_)
      : c1(c1_), c2(c2_), b1(b1_), b2(b2_) {
    if (!(b1 > 0.0) || !(b2 > 0.0))
      throw std::domain_error("SupportRect: side lengths must be positive");
    if (c1 < 0.0 || c2 < 0.0)
      throw std::domain_error("SupportRect: corner must be in the positive quadrant");
  }
  // Symmetric support: square with equal corner coordinates.
  bool symmetric() const { return std::abs(c1 - c2) <= kGeomTol; }
  double area() const { return b1 * b2; }
  Polygon polygon() const {
    return Polygon{{{c1, c2}, {c1 + b1, c2}, {c1 + b1, c2 + b2}, {c1, c2 + b2}}};
  }
};

// One menu entry: allocation probabilities and price. Unit demand requires
// q1 + q2 <= 1; prices are absolute (not offsets).
struct MenuItem {
  double q1 = 0.0;
  double q2 = 0.0;
  double price = 0.0;

  MenuItem() = default;
  MenuItem(double q1_, double q2_, double price_) : q1(q1_), q2(q2_), price(price_) {
    if (q1 < -kGeomTol || q2 < -kGeomTol || q1 + q2 > 1.0 + 1e-9)
      throw std::domain_error("MenuItem: allocation must satisfy q1,q2>=0, q1+q2<=1");
    if (price < -kGeomTol) throw std::domain_error("MenuItem: price must be nonnegative");
  }
  double utility(Point z) const { return q1 * z.x + q2 * z.y - price; }
};

// A menu: the null item (0,0,0) at index 0 followed by at most four non-null
// items (five entries total).
struct Menu {
  std::vector<MenuItem> items;  // items[0] is always the null item

  Menu() { items.push_back(MenuItem{}); }
  void add(MenuItem it) {
    if (items.size() >= 5) throw std::domain_error("Menu: at most five items including null");
    items.push_back(it);
  }
};

// Signed area (positive for counter-clockwise order).
double polygon_signed_area(const Polygon& p);
inline double polygon_area(const Polygon& p) { return std::abs(polygon_signed_area(p)); }

// Intersect polygon with the closed half-plane {a*x + b*y <= c}.
// Degenerate (segment / point) polygons are clipped as segments / points.
Polygon clip_halfplane(const Polygon& p, double a, double b, double c);

// Probability that a uniform draw from rect lands in poly:
// area(poly ∩ rect) / area(rect).
double region_probability(const Polygon& poly, const SupportRect& rect);

// True if z lies in the closed polygon (boundary counts as inside).
bool point_in_polygon(Point z, const Polygon& p, double tol = 1e-9);

Polygon intersect_with_rect(const Polygon& p, const SupportRect& rect);

}  // namespace menuforge
