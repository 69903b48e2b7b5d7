#include "podsurf/error.hpp"
#include "podsurf/regress.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <utility>
#include <vector>

namespace podsurf {

namespace {

using Point = Eigen::Vector2d;

double orient(const Point& a, const Point& b, const Point& c) {
  return (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x());
}

// Positive when d lies strictly inside the circumcircle of the CCW triangle
// abc. Values within 1e-14 of the permanent count as on the circle.
bool in_circumcircle(const Point& a, const Point& b, const Point& c, const Point& d) {
  const double adx = a.x() - d.x(), ady = a.y() - d.y();
  const double bdx = b.x() - d.x(), bdy = b.y() - d.y();
  const double cdx = c.x() - d.x(), cdy = c.y() - d.y();
  const double ad = adx * adx + ady * ady;
  const double bd = bdx * bdx + bdy * bdy;
  const double cd = cdx * cdx + cdy * cdy;
  const double det = adx * (bdy * cd - bd * cdy) - ady * (bdx * cd - bd * cdx) +
                     ad * (bdx * cdy - bdy * cdx);
  const double perm = std::abs(adx) * (std::abs(bdy) * cd + bd * std::abs(cdy)) +
                      std::abs(ady) * (std::abs(bdx) * cd + bd * std::abs(cdx)) +
                      ad * (std::abs(bdx) * std::abs(cdy) + std::abs(bdy) * std::abs(cdx));
  return det > 1e-14 * perm;
}

bool strictly_inside_or_on(const Point& a, const Point& b, const Point& c, const Point& p,
                           double eps) {
  return orient(a, b, p) >= -eps && orient(b, c, p) >= -eps && orient(c, a, p) >= -eps;
}

// Fills concave notches left along the hull after the super-triangle is
// removed, until the boundary is convex.
void close_hull_pockets(const std::vector<Point>& pts, std::vector<Triangle>& tris, double eps) {
  for (int guard = 0; guard < 4 * static_cast<int>(pts.size()) + 8; ++guard) {
    std::map<std::pair<int, int>, int> edge_count;
    for (const auto& t : tris)
      for (int e = 0; e < 3; ++e) {
        const int a = t[static_cast<std::size_t>(e)], b = t[static_cast<std::size_t>((e + 1) % 3)];
        ++edge_count[{std::min(a, b), std::max(a, b)}];
      }
    std::map<int, int> next, prev;
    bool pinched = false;
    for (const auto& t : tris)
      for (int e = 0; e < 3; ++e) {
        const int a = t[static_cast<std::size_t>(e)], b = t[static_cast<std::size_t>((e + 1) % 3)];
        if (edge_count[{std::min(a, b), std::max(a, b)}] != 1) continue;
        pinched = pinched || next.count(a) || prev.count(b);
        next[a] = b;
        prev[b] = a;
      }
    if (pinched) return;

    bool changed = false;
    for (const auto& [b, c] : next) {
      const int a = prev[b];
      if (a == c) continue;
      if (orient(pts[static_cast<std::size_t>(a)], pts[static_cast<std::size_t>(b)],
                 pts[static_cast<std::size_t>(c)]) >= -eps)
        continue;
      const Point& pa = pts[static_cast<std::size_t>(a)];
      const Point& pb = pts[static_cast<std::size_t>(c)];
      const Point& pc = pts[static_cast<std::size_t>(b)];
      bool blocked = false;
      for (std::size_t q = 0; q < pts.size() && !blocked; ++q) {
        const int qi = static_cast<int>(q);
        if (qi == a || qi == b || qi == c) continue;
        blocked = strictly_inside_or_on(pa, pb, pc, pts[q], eps);
      }
      if (blocked) continue;
      tris.push_back({a, c, b});
      changed = true;
      break;
    }
    if (!changed) return;
  }
}

}  // namespace

std::vector<Triangle> delaunay(const std::vector<Point>& points) {
  const auto m = points.size();
  if (m < 3) fail(ErrorCode::DegenerateGeometry, "triangulation needs at least 3 points");

  Point lo = points.front(), hi = points.front();
  for (const auto& p : points) {
    if (!p.allFinite()) fail(ErrorCode::NonFinite, "non-finite point");
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const double span = std::max(hi.x() - lo.x(), hi.y() - lo.y());
  const double bbox_area = std::max((hi.x() - lo.x()) * (hi.y() - lo.y()), span * span * 1e-300);
  const double area_floor = 1e-14 * bbox_area;

  std::vector<int> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const auto& pa = points[static_cast<std::size_t>(a)];
    const auto& pb = points[static_cast<std::size_t>(b)];
    return pa.x() != pb.x() ? pa.x() < pb.x() : pa.y() < pb.y();
  });
  for (std::size_t k = 1; k < m; ++k) {
    if (points[static_cast<std::size_t>(order[k])] == points[static_cast<std::size_t>(order[k - 1])])
      fail(ErrorCode::DuplicateInput, "duplicate triangulation point");
  }
  bool collinear = true;
  for (std::size_t k = 2; k < m && collinear; ++k)
    collinear = std::abs(orient(points[static_cast<std::size_t>(order[0])],
                                points[static_cast<std::size_t>(order[1])],
                                points[static_cast<std::size_t>(order[k])])) <= area_floor;
  if (collinear || !(span > 0.0)) fail(ErrorCode::DegenerateGeometry, "points are collinear");

  // Working point list: the inputs followed by the three super-triangle vertices.
  std::vector<Point> pts(points);
  const Point centre = 0.5 * (lo + hi);
  const double big = 1e3 * span;
  pts.emplace_back(centre.x() - 2.0 * big, centre.y() - big);
  pts.emplace_back(centre.x() + 2.0 * big, centre.y() - big);
  pts.emplace_back(centre.x(), centre.y() + 2.0 * big);
  const int s0 = static_cast<int>(m);

  std::vector<Triangle> tris{{s0, s0 + 1, s0 + 2}};
  for (int idx : order) {
    const Point& p = pts[static_cast<std::size_t>(idx)];
    std::vector<Triangle> keep;
    std::map<std::pair<int, int>, int> boundary;  // directed edge -> multiplicity
    for (const auto& t : tris) {
      if (in_circumcircle(pts[static_cast<std::size_t>(t[0])], pts[static_cast<std::size_t>(t[1])],
                          pts[static_cast<std::size_t>(t[2])], p)) {
        for (int e = 0; e < 3; ++e)
          ++boundary[{t[static_cast<std::size_t>(e)], t[static_cast<std::size_t>((e + 1) % 3)]}];
      } else {
        keep.push_back(t);
      }
    }
    for (const auto& [edge, count] : boundary) {
      if (boundary.count({edge.second, edge.first})) continue;  // interior edge of the cavity
      const Triangle t{edge.first, edge.second, idx};
      if (orient(pts[static_cast<std::size_t>(t[0])], pts[static_cast<std::size_t>(t[1])], p) <= 0.0)
        continue;
      keep.push_back(t);
    }
    tris = std::move(keep);
  }

  std::vector<Triangle> out;
  for (const auto& t : tris) {
    if (t[0] >= s0 || t[1] >= s0 || t[2] >= s0) continue;
    if (orient(points[static_cast<std::size_t>(t[0])], points[static_cast<std::size_t>(t[1])],
               points[static_cast<std::size_t>(t[2])]) <= area_floor)
      continue;
    out.push_back(t);
  }
  close_hull_pockets(points, out, area_floor);
  std::sort(out.begin(), out.end());
  if (out.empty()) fail(ErrorCode::DegenerateGeometry, "triangulation produced no triangles");
  return out;
}

}  // namespace podsurf
