#include "isodiam/region.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ball_index.hpp"

namespace isodiam {

struct Region::Node {
  Kind kind;
  Ball ball{Point::trusted(Vec{}), 0.0};
  Hyperplane plane{};
  std::vector<Region> children;
  std::shared_ptr<const BallIndex> index;
  int depth = 0;
  std::size_t count = 1;
};

namespace {

// Relative slack added to enclosures so rounding never leaves a member outside.
double inflate(double r) { return r * (1.0 + 1e-12) + 1e-12; }

Ball full_sphere(const Space& space) { return Ball{space.pole(), std::numbers::pi}; }

bool is_full_sphere(const Space& space, const Ball& b) { return space.spherical() && b.radius >= std::numbers::pi; }

Ball clamp_sphere(const Space& space, Ball b) {
  if (space.spherical() && b.radius >= std::numbers::pi) return full_sphere(space);
  return b;
}

}  // namespace

const char* to_string(Region::Kind kind) {
  switch (kind) {
    case Region::Kind::Ball: return "ball";
    case Region::Kind::HalfSpace: return "halfspace";
    case Region::Kind::Union: return "union";
    case Region::Kind::Intersection: return "intersection";
    case Region::Kind::Difference: return "difference";
    case Region::Kind::Symmetrized: return "symmetrized";
  }
  return "?";
}

Region Region::ball(const Ball& ball) {
  if (!(ball.radius > 0.0) || !std::isfinite(ball.radius)) throw InvalidGeometry("ball radius must be positive");
  auto node = std::make_shared<Node>();
  node->kind = Kind::Ball;
  node->ball = ball;
  return Region(std::move(node));
}

Region Region::halfspace(const Hyperplane& h) {
  auto node = std::make_shared<Node>();
  node->kind = Kind::HalfSpace;
  node->plane = h;
  return Region(std::move(node));
}

namespace {

template <typename NodeT>
void adopt(NodeT& node, std::vector<Region> children) {
  node.depth = 0;
  node.count = 1;
  for (const Region& c : children) {
    node.depth = std::max(node.depth, c.symmetrization_depth());
    node.count += c.node_count();
  }
  node.children = std::move(children);
}

}  // namespace

Region Region::unite(std::vector<Region> children) {
  if (children.empty()) throw InvalidGeometry("union needs at least one operand");
  auto node = std::make_shared<Node>();
  node->kind = Kind::Union;
  adopt(*node, std::move(children));
  return Region(std::move(node));
}

Region Region::intersect(std::vector<Region> children) {
  if (children.empty()) throw InvalidGeometry("intersection needs at least one operand");
  auto node = std::make_shared<Node>();
  node->kind = Kind::Intersection;
  adopt(*node, std::move(children));
  return Region(std::move(node));
}

Region Region::difference(Region a, Region b) {
  auto node = std::make_shared<Node>();
  node->kind = Kind::Difference;
  adopt(*node, {std::move(a), std::move(b)});
  return Region(std::move(node));
}

Region Region::symmetrized(const Hyperplane& h, Region inner) {
  auto node = std::make_shared<Node>();
  node->kind = Kind::Symmetrized;
  node->plane = h;
  adopt(*node, {std::move(inner)});
  node->depth += 1;
  return Region(std::move(node));
}

Region Region::ball_union(const Space& space, std::vector<Point> centers, double radius) {
  if (centers.empty()) throw InvalidGeometry("ball union needs at least one center");
  std::vector<Region> children;
  children.reserve(centers.size());
  for (const Point& c : centers) children.push_back(Region::ball(make_ball(space, c, radius)));
  auto node = std::make_shared<Node>();
  node->kind = Kind::Union;
  adopt(*node, std::move(children));
  node->index = std::make_shared<const BallIndex>(space, std::move(centers), radius);
  return Region(std::move(node));
}

Region::Kind Region::kind() const noexcept { return node_->kind; }

const Ball& Region::as_ball() const {
  if (node_->kind != Kind::Ball) throw InvalidGeometry("region node is not a ball");
  return node_->ball;
}

const Hyperplane& Region::hyperplane() const {
  if (node_->kind != Kind::HalfSpace && node_->kind != Kind::Symmetrized) {
    throw InvalidGeometry("region node carries no hyperplane");
  }
  return node_->plane;
}

const std::vector<Region>& Region::children() const noexcept { return node_->children; }

const Region& Region::inner() const {
  if (node_->kind != Kind::Symmetrized) throw InvalidGeometry("region node is not a symmetrization");
  return node_->children.front();
}

int Region::symmetrization_depth() const noexcept { return node_->depth; }
std::size_t Region::node_count() const noexcept { return node_->count; }
const BallIndex* Region::index() const noexcept { return node_->index.get(); }

bool contains(const Space& space, const Region& region, const Point& x) {
  switch (region.kind()) {
    case Region::Kind::Ball: {
      const Ball& b = region.as_ball();
      return distance(space, x, b.center) <= b.radius;
    }
    case Region::Kind::HalfSpace: return side(space, region.hyperplane(), x) >= 0;
    case Region::Kind::Union: {
      if (const BallIndex* index = region.index(); index && index->space() == space) return index->any_contains(x);
      return std::any_of(region.children().begin(), region.children().end(),
                         [&](const Region& c) { return contains(space, c, x); });
    }
    case Region::Kind::Intersection:
      return std::all_of(region.children().begin(), region.children().end(),
                         [&](const Region& c) { return contains(space, c, x); });
    case Region::Kind::Difference:
      return contains(space, region.children()[0], x) && !contains(space, region.children()[1], x);
    case Region::Kind::Symmetrized: {
      // tau(X) & H^+ = (X | sigma X) & H^+,  tau(X) & H^- = (X & sigma X) & H^-.
      const Hyperplane& h = region.hyperplane();
      const Region& inner = region.inner();
      if (side(space, h, x) >= 0) {
        return contains(space, inner, x) || contains(space, inner, reflect(space, h, x));
      }
      return contains(space, inner, x) && contains(space, inner, reflect(space, h, x));
    }
  }
  return false;
}

Ball enclosing_ball(const Space& space, const Ball& a, const Ball& b) {
  if (is_full_sphere(space, a) || is_full_sphere(space, b)) return full_sphere(space);
  const double d = distance(space, a.center, b.center);
  if (d + b.radius <= a.radius) return a;
  if (d + a.radius <= b.radius) return b;
  const double r = 0.5 * (d + a.radius + b.radius);
  if (space.spherical() && r >= std::numbers::pi) return full_sphere(space);
  Tangent dir{a.center, Vec{}};
  try {
    dir = tangent_toward(space, a.center, b.center).direction;
  } catch (const DegenerateInput&) {
    dir = Tangent{a.center, tangent_basis(space, a.center).front()};
  }
  return clamp_sphere(space, Ball{geodesic_point(space, dir, r - a.radius), inflate(r)});
}

namespace {

// nullopt-free convention: `bounded` false means "no finite enclosure".
struct Bound {
  bool bounded;
  Ball ball;
};

Bound bound_of(const Space& space, const Region& region) {
  switch (region.kind()) {
    case Region::Kind::Ball: return {true, region.as_ball()};
    case Region::Kind::HalfSpace:
      if (space.spherical()) return {true, full_sphere(space)};
      return {false, full_sphere(space)};
    case Region::Kind::Union: {
      Bound acc{true, full_sphere(space)};
      bool first = true;
      if (const BallIndex* index = region.index()) {
        // Fold the centers directly; cheaper than one recursion per leaf.
        for (const Point& c : index->centers()) {
          const Ball b{c, index->radius()};
          acc.ball = first ? b : enclosing_ball(space, acc.ball, b);
          first = false;
        }
        return acc;
      }
      for (const Region& c : region.children()) {
        const Bound cb = bound_of(space, c);
        if (!cb.bounded) return cb;
        acc.ball = first ? cb.ball : enclosing_ball(space, acc.ball, cb.ball);
        first = false;
      }
      return acc;
    }
    case Region::Kind::Intersection: {
      Bound best{false, full_sphere(space)};
      for (const Region& c : region.children()) {
        const Bound cb = bound_of(space, c);
        if (cb.bounded && (!best.bounded || cb.ball.radius < best.ball.radius)) best = cb;
      }
      return best;
    }
    case Region::Kind::Difference: return bound_of(space, region.children()[0]);
    case Region::Kind::Symmetrized: {
      // tau(X) lies in B when the center of B is on the H^+ side, else in sigma(B):
      // points of H^+ are no farther from c than from sigma(c).
      Bound inner = bound_of(space, region.inner());
      if (!inner.bounded || is_full_sphere(space, inner.ball)) return inner;
      const Hyperplane& h = region.hyperplane();
      Ball b = inner.ball;
      if (signed_offset(space, h, b.center) < 0.0) b.center = reflect(space, h, b.center);
      b.radius = inflate(b.radius);
      return {true, clamp_sphere(space, b)};
    }
  }
  return {false, full_sphere(space)};
}

}  // namespace

Ball bounding_ball(const Space& space, const Region& region) {
  const Bound b = bound_of(space, region);
  if (!b.bounded) throw UnboundedRegion("region has no bounding ball in " + space.describe());
  return b.ball;
}

Region reflect_region(const Space& space, const Hyperplane& mirror, const Region& region) {
  switch (region.kind()) {
    case Region::Kind::Ball: {
      const Ball& b = region.as_ball();
      return Region::ball(Ball{reflect(space, mirror, b.center), b.radius});
    }
    case Region::Kind::HalfSpace: return Region::halfspace(reflect_hyperplane(space, mirror, region.hyperplane()));
    case Region::Kind::Union:
    case Region::Kind::Intersection: {
      if (const BallIndex* index = region.index()) {
        std::vector<Point> centers;
        centers.reserve(index->centers().size());
        for (const Point& c : index->centers()) centers.push_back(reflect(space, mirror, c));
        return Region::ball_union(space, std::move(centers), index->radius());
      }
      std::vector<Region> kids;
      kids.reserve(region.children().size());
      for (const Region& c : region.children()) kids.push_back(reflect_region(space, mirror, c));
      return region.kind() == Region::Kind::Union ? Region::unite(std::move(kids)) : Region::intersect(std::move(kids));
    }
    case Region::Kind::Difference:
      return Region::difference(reflect_region(space, mirror, region.children()[0]),
                                reflect_region(space, mirror, region.children()[1]));
    case Region::Kind::Symmetrized:
      return Region::symmetrized(reflect_hyperplane(space, mirror, region.hyperplane()),
                                 reflect_region(space, mirror, region.inner()));
  }
  return region;
}

bool structurally_equal(const Region& a, const Region& b) {
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case Region::Kind::Ball:
      return a.as_ball().center == b.as_ball().center && a.as_ball().radius == b.as_ball().radius;
    case Region::Kind::HalfSpace:
    case Region::Kind::Symmetrized: {
      const Hyperplane& p = a.hyperplane();
      const Hyperplane& q = b.hyperplane();
      if (!(p.normal == q.normal && p.offset == q.offset && p.orientation == q.orientation)) return false;
      break;
    }
    default: break;
  }
  if (a.children().size() != b.children().size()) return false;
  for (std::size_t i = 0; i < a.children().size(); ++i) {
    if (!structurally_equal(a.children()[i], b.children()[i])) return false;
  }
  return true;
}

}  // namespace isodiam
