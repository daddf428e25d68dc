#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "fasec/common.hpp"

namespace fasec {

// ---------------------------------------------------------------------------
// Small exact convex kernels. Problem sizes stay tiny (N <= 16, K <= 8), so
// dense enumeration and O(n log n) projections are the whole story.
// ---------------------------------------------------------------------------

/// Euclidean projection onto { x >= 0, sum(x) <= cap }.
/// Negatives are clamped; if the clamped sum still exceeds the cap, the
/// unique shift theta with sum(max(x - theta, 0)) == cap is applied.
inline VecXd project_capped_nonneg(VecXd values, double cap) {
  if (!(cap > 0.0)) throw std::invalid_argument("project_capped_nonneg: cap must be > 0");
  VecXd clamped = values.cwiseMax(0.0);
  if (clamped.sum() <= cap) return clamped;
  // Water-filling shift on the sorted positive entries.
  std::vector<double> sorted(clamped.data(), clamped.data() + clamped.size());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double prefix = 0.0;
  double theta = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    prefix += sorted[i];
    const double candidate = (prefix - cap) / static_cast<double>(i + 1);
    if (i + 1 == sorted.size() || sorted[i + 1] <= candidate) {
      theta = candidate;
      break;
    }
  }
  return (clamped.array() - theta).cwiseMax(0.0).matrix();
}

/// Exact Frobenius projection of a Hermitian pair onto
/// { W PSD, V PSD, tr(W) + tr(V) <= cap }: the joint eigenvalue vector is
/// projected by project_capped_nonneg while both eigenbases stay fixed.
/// Inputs with relative asymmetry above 1e-8 are rejected; below that they
/// are symmetrized.
inline std::pair<CMat, CMat> project_psd_pair(CMat W, CMat V, double cap) {
  auto hermitize = [](CMat& M, const char* name) {
    const double scale = std::max(1.0, M.norm());
    const double asym = (M - M.adjoint()).norm();
    if (asym > 1e-8 * scale)
      throw std::invalid_argument(std::string("project_psd_pair: ") + name + " is not Hermitian");
    M = 0.5 * (M + M.adjoint().eval());
  };
  hermitize(W, "W");
  hermitize(V, "V");
  Eigen::SelfAdjointEigenSolver<CMat> ew(W), ev(V);
  const Eigen::Index nw = W.rows(), nv = V.rows();
  VecXd joint(nw + nv);
  joint.head(nw) = ew.eigenvalues();
  joint.tail(nv) = ev.eigenvalues();
  joint = project_capped_nonneg(joint, cap);
  CMat Wp = ew.eigenvectors() * joint.head(nw).asDiagonal() * ew.eigenvectors().adjoint();
  CMat Vp = ev.eigenvectors() * joint.tail(nv).asDiagonal() * ev.eigenvectors().adjoint();
  return {std::move(Wp), std::move(Vp)};
}

/// One affine piece a.x + b.
struct AffinePiece {
  Vec2 a;
  double b = 0.0;
  double at(const Vec2& x) const { return a.dot(x) + b; }
};

struct Box2 {
  Vec2 lo, hi;
  bool contains(const Vec2& x, double tol = 0.0) const {
    return x.x() >= lo.x() - tol && x.x() <= hi.x() + tol && x.y() >= lo.y() - tol &&
           x.y() <= hi.y() + tol;
  }
  Vec2 clamp(const Vec2& x) const {
    return {std::clamp(x.x(), lo.x(), hi.x()), std::clamp(x.y(), lo.y(), hi.y())};
  }
  Vec2 center() const { return 0.5 * (lo + hi); }
};

inline bool lex_less(const Vec2& a, const Vec2& b) {
  if (a.x() != b.x()) return a.x() < b.x();
  return a.y() < b.y();
}

/// Maximizes f(x) = head.at(x) - max_k pieces[k].at(x) over a bounded box.
/// Solved exactly as the epigraph LP  max head.at(x) - u  s.t. u >= piece_k(x)
/// by enumerating all vertices (triples of active constraints). Ties on the
/// objective return the lexicographically smallest optimizer.
inline Vec2 maximize_pl_concave_over_box(const AffinePiece& head,
                                         const std::vector<AffinePiece>& pieces, const Box2& box) {
  if (!(box.lo.x() <= box.hi.x() && box.lo.y() <= box.hi.y()))
    throw std::invalid_argument("maximize_pl_concave_over_box: empty box");

  auto objective = [&](const Vec2& x) {
    double worst = -std::numeric_limits<double>::infinity();
    for (const auto& p : pieces) worst = std::max(worst, p.at(x));
    return head.at(x) - (pieces.empty() ? 0.0 : worst);
  };

  const Vec2 corners[4] = {box.lo, {box.hi.x(), box.lo.y()}, {box.lo.x(), box.hi.y()}, box.hi};

  if (pieces.empty()) {
    Vec2 best = corners[0];
    double bestv = objective(best);
    for (const Vec2& c : corners) {
      const double v = objective(c);
      if (v > bestv + 1e-12 * (1.0 + std::abs(bestv)) ||
          (std::abs(v - bestv) <= 1e-12 * (1.0 + std::abs(bestv)) && lex_less(c, best))) {
        best = c;
        bestv = v;
      }
    }
    return best;
  }

  // Constraint rows g.(x,u) >= h covering both the box and the epigraph.
  struct Row {
    Eigen::Vector3d g;
    double h;
  };
  std::vector<Row> rows;
  for (const auto& p : pieces) rows.push_back({{-p.a.x(), -p.a.y(), 1.0}, p.b});
  rows.push_back({{1.0, 0.0, 0.0}, box.lo.x()});
  rows.push_back({{-1.0, 0.0, 0.0}, -box.hi.x()});
  rows.push_back({{0.0, 1.0, 0.0}, box.lo.y()});
  rows.push_back({{0.0, -1.0, 0.0}, -box.hi.y()});

  const std::size_t m = rows.size();
  const double span = (box.hi - box.lo).norm() + 1.0;
  bool found = false;
  Vec2 best = Vec2::Zero();
  double bestv = -std::numeric_limits<double>::infinity();

  Eigen::Matrix3d A;
  Eigen::Vector3d rhs;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j)
      for (std::size_t l = j + 1; l < m; ++l) {
        A.row(0) = rows[i].g;
        A.row(1) = rows[j].g;
        A.row(2) = rows[l].g;
        rhs << rows[i].h, rows[j].h, rows[l].h;
        Eigen::FullPivLU<Eigen::Matrix3d> lu(A);
        if (!lu.isInvertible()) continue;
        const Eigen::Vector3d z = lu.solve(rhs);
        if (!z.allFinite() || z.head<2>().norm() > 1e6 * span) continue;
        bool feasible = true;
        for (const auto& r : rows) {
          if (r.g.dot(z) < r.h - 1e-9 * (1.0 + std::abs(r.h))) {
            feasible = false;
            break;
          }
        }
        if (!feasible) continue;
        const Vec2 x = z.head<2>();
        const double v = head.at(x) - z.z();
        const double tie = 1e-12 * (1.0 + std::abs(bestv));
        if (!found || v > bestv + tie || (std::abs(v - bestv) <= tie && lex_less(x, best))) {
          found = true;
          best = x;
          bestv = v;
        }
      }
  if (!found) throw std::runtime_error("maximize_pl_concave_over_box: no feasible vertex");
  return best;
}

/// 2-D box intersected with half-planes a.x >= b. Nonemptiness is certified
/// at construction.
class BoxPolytope {
 public:
  BoxPolytope(Box2 box, std::vector<AffinePiece> halfplanes = {})
      : box_(box), halfplanes_(std::move(halfplanes)) {
    if (!project_impl(box_.center())) throw std::invalid_argument("BoxPolytope: empty feasible set");
  }

  const Box2& box() const { return box_; }
  const std::vector<AffinePiece>& halfplanes() const { return halfplanes_; }

  bool contains(const Vec2& x, double tol = 1e-9) const {
    if (!box_.contains(x, tol)) return false;
    for (const auto& hp : halfplanes_)
      if (hp.a.dot(x) < hp.b - tol * (1.0 + std::abs(hp.b))) return false;
    return true;
  }

  /// Exact Euclidean projection by enumerating active sets: the point itself,
  /// perpendicular feet on single constraints, and pairwise intersections.
  Vec2 project(const Vec2& p) const {
    auto r = project_impl(p);
    if (!r) throw std::runtime_error("BoxPolytope: projection on empty set");
    return *r;
  }

 private:
  std::optional<Vec2> project_impl(const Vec2& p) const {
    std::vector<AffinePiece> cons = halfplanes_;
    cons.push_back({{1.0, 0.0}, box_.lo.x()});
    cons.push_back({{-1.0, 0.0}, -box_.hi.x()});
    cons.push_back({{0.0, 1.0}, box_.lo.y()});
    cons.push_back({{0.0, -1.0}, -box_.hi.y()});

    auto feasible = [&](const Vec2& x) {
      for (const auto& c : cons)
        if (c.a.dot(x) < c.b - 1e-12 * (1.0 + std::abs(c.b))) return false;
      return true;
    };

    std::optional<Vec2> best;
    double bestd = std::numeric_limits<double>::infinity();
    auto consider = [&](const Vec2& x) {
      if (!feasible(x)) return;
      const double d = (x - p).squaredNorm();
      if (d < bestd - 1e-15 * (1.0 + bestd) || (!best) ||
          (std::abs(d - bestd) <= 1e-15 * (1.0 + bestd) && lex_less(x, *best))) {
        if (d < bestd || std::abs(d - bestd) <= 1e-15 * (1.0 + bestd)) {
          best = x;
          bestd = std::min(bestd, d);
        }
      }
    };

    consider(p);
    for (const auto& c : cons) {
      const double nn = c.a.squaredNorm();
      if (nn <= 0.0) continue;
      consider(p + (c.b - c.a.dot(p)) / nn * c.a);
    }
    for (std::size_t i = 0; i < cons.size(); ++i)
      for (std::size_t j = i + 1; j < cons.size(); ++j) {
        Eigen::Matrix2d A;
        A.row(0) = cons[i].a;
        A.row(1) = cons[j].a;
        if (std::abs(A.determinant()) < 1e-14 * (cons[i].a.norm() * cons[j].a.norm() + 1e-300))
          continue;
        consider(A.inverse() * Vec2(cons[i].b, cons[j].b));
      }
    return best;
  }

  Box2 box_;
  std::vector<AffinePiece> halfplanes_;
};

inline Vec2 project_polyhedron_2d(const Vec2& p, const BoxPolytope& poly) {
  return poly.project(p);
}

struct PgOptions {
  double tol = 1e-9;      ///< projected-gradient-mapping norm for exit
  int max_iters = 400;
  double step0 = 1.0;     ///< initial trial step, in the variable's units
  double armijo = 1e-4;
  double shrink = 0.5;
  int max_backtracks = 60;
};

struct PgResult {
  double value = 0.0;
  int iters = 0;
  bool hit_cap = false;
  bool stalled = false;  ///< no ascent step found (kink or stationary point)
};

/// Projected supergradient ascent with Armijo backtracking for concave
/// objectives over a convex set given by an exact projector. The objective
/// may return -inf outside its domain; such trial points are rejected by the
/// line search. The accepted-value sequence is nondecreasing.
inline PgResult projected_gradient_concave(
    VecXd& x, const std::function<double(const VecXd&)>& value,
    const std::function<VecXd(const VecXd&)>& supergrad,
    const std::function<VecXd(const VecXd&)>& project, const PgOptions& opt = {}) {
  x = project(x);
  double fx = value(x);
  if (!std::isfinite(fx))
    throw std::invalid_argument("projected_gradient_concave: start outside objective domain");

  PgResult res;
  double step = opt.step0;
  for (res.iters = 0; res.iters < opt.max_iters; ++res.iters) {
    const VecXd g = supergrad(x);
    // Gradient-mapping norm at the reference step decides convergence.
    const VecXd probe = project(x + opt.step0 * g);
    if ((probe - x).norm() / opt.step0 < opt.tol) {
      res.value = fx;
      return res;
    }

    double s = step;
    bool accepted = false;
    for (int j = 0; j < opt.max_backtracks; ++j) {
      const VecXd xc = project(x + s * g);
      const VecXd d = xc - x;
      if (d.norm() == 0.0) break;
      const double fc = value(xc);
      if (std::isfinite(fc) && fc >= fx + opt.armijo * g.dot(d)) {
        x = xc;
        fx = fc;
        accepted = true;
        break;
      }
      s *= opt.shrink;
    }
    if (!accepted) {
      res.stalled = true;
      res.value = fx;
      return res;
    }
    step = std::min(s / opt.shrink, opt.step0 * 16.0);
  }
  res.hit_cap = true;
  res.value = fx;
  return res;
}

/// Golden-section search for the minimizer of a unimodal 1-D function.
inline double golden_section_min(const std::function<double(double)>& f, double lo, double hi,
                                 double tol = 1e-10) {
  static const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

/// Central-difference gradient; the test-side oracle for every analytic
/// gradient in the project.
inline VecXd finite_diff_gradient(const std::function<double(const VecXd&)>& f, const VecXd& x,
                                  double h) {
  VecXd g(x.size());
  VecXd xp = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    xp(i) = x(i) + h;
    const double fp = f(xp);
    xp(i) = x(i) - h;
    const double fm = f(xp);
    xp(i) = x(i);
    g(i) = (fp - fm) / (2.0 * h);
  }
  return g;
}

}  // namespace fasec
