#include "wavestab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

namespace ws {

Eigen::VectorXd lagrange_weights(const Eigen::VectorXd& nodes, double x) {
  const Eigen::Index n = nodes.size();
  Eigen::VectorXd w(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    double num = 1.0, den = 1.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (i == j) continue;
      const double d = nodes[j] - nodes[i];
      if (d == 0.0)
        throw GridError("lagrange_weights: degenerate stencil (coincident nodes)");
      num *= x - nodes[i];
      den *= d;
    }
    w[j] = num / den;
  }
  return w;
}

namespace {

// Leftmost donor index for a target at fractional donor index s: nearest-node
// centering of the p+1 point stencil (half-way ties go to the smaller index),
// clamped to [lo, hi-p].
int grid_rule() {
  const char* r = std::getenv("WS_GRID_RULE");
  return r ? std::atoi(r) : 0;
}

int center_index(double s, int p, int mode) {
  if (mode == 2 || mode == 3) return static_cast<int>(std::floor(s)) - p / 2;
  if (mode == 1 || mode == 4) return static_cast<int>(std::floor(s + 0.5)) - p / 2;
  return static_cast<int>(std::ceil(s - 0.5)) - p / 2;
}

int stencil_start(double s, int p, int lo, int hi) {
  return std::clamp(center_index(s, p, grid_rule()), lo, hi - p);
}

// Selection-time feasibility under the no-clamp rule: every target's centered
// stencil must lie within the donor's active+Dirichlet range untouched.
bool centered_feasible(const ComponentGrid1D& target, const ComponentGrid1D& donor, int p) {
  const int tb = target.side == Side::Left ? target.n_active + 1 : -target.n_ghost;
  for (int k = tb; k < tb + target.n_ghost; ++k) {
    const double s = (target.x(k) - donor.x0) / donor.h;
    if (grid_rule() == 6) {
      if (donor.n_active < p) return false;
      if (donor.side == Side::Right) {
        if (s < 1.0 - 1e-12) return false;
      } else {
        if (s > donor.n_active - 1.0 + 1e-12) return false;
      }
      continue;
    }
    const int m = center_index(s, p, grid_rule());
    // strict toward the donor's interpolation fringe; the physical-boundary
    // side may clamp (one-sided interpolation near a domain boundary is fine)
    if (donor.n_active < p) return false;
    if (donor.side == Side::Right) {
      if (m < 0) return false;  // would touch the donor's fringe at j < 0
    } else {
      if (m + p > donor.n_active) return false;  // fringe at j > n_active
    }
  }
  return true;
}

// Donor indices for the targets of one grid live on the other grid; they may
// include the Dirichlet boundary point but never interpolation points.  On
// node-aligned overlaps -- the left endpoint falls exactly on a right-grid
// node while the rest of the overlap does not, so the grids carry an isolated
// duplicated unknown at the endpoint -- donor stencils
// additionally avoid the donor grid's interface fringe (the n_ghost active
// points feeding its own interpolation), so that donor data does not couple
// straight back through the duplicated unknowns.
void donor_range(const ComponentGrid1D& donor, bool aligned, int& lo, int& hi) {
  lo = 0;
  hi = donor.n_active;
  if (!aligned) return;
  if (donor.side == Side::Left) hi -= donor.n_ghost;
  else lo += donor.n_ghost;
}

bool stencils_feasible(const ComponentGrid1D& target, const ComponentGrid1D& donor,
                       int p, bool aligned) {
  int lo, hi;
  donor_range(donor, aligned, lo, hi);
  if (hi - lo < p) return false;
  // targets must lie in the convex hull of their donors, or within one cell of
  // it when the fringe exclusion on aligned overlaps pushes the stencil away
  const double slack = aligned ? 1.0 : 0.0;
  const int tb = target.side == Side::Left ? target.n_active + 1 : -target.n_ghost;
  for (int k = tb; k < tb + target.n_ghost; ++k) {
    const double s = (target.x(k) - donor.x0) / donor.h;
    const int m = stencil_start(s, p, lo, hi);
    if (s < m - slack - 1e-12 || s > m + p + slack + 1e-12) return false;
  }
  return true;
}

void add_stencils(OversetGrid1D& g, Side target_side, bool aligned) {
  const ComponentGrid1D& target = g.grid(target_side);
  const ComponentGrid1D& donor = g.grid(target_side == Side::Left ? Side::Right : Side::Left);
  const int p = g.order;
  int lo, hi;
  donor_range(donor, aligned, lo, hi);
  const int tb = target.side == Side::Left ? target.n_active + 1 : -target.n_ghost;
  for (int k = tb; k < tb + target.n_ghost; ++k) {
    const double s = (target.x(k) - donor.x0) / donor.h;
    const int m = stencil_start(s, p, lo, hi);
    Eigen::VectorXd nodes(p + 1);
    for (int j = 0; j <= p; ++j) nodes[j] = donor.x(m + j);
    g.stencils.push_back({target_side, k, m, lagrange_weights(nodes, target.x(k))});
  }
}

// True when the left endpoint b coincides with a right-grid node.
bool node_aligned(double b, const ComponentGrid1D& right) {
  const double s = (b - right.x0) / right.h;
  return std::abs(s - std::round(s)) < 1e-9;
}

}  // namespace

OversetGrid1D build_overset(double delta, int n_right, int order) {
  if (delta <= 0.0) throw GridError("build_overset: delta must be positive");
  if (order != 2 && order != 4) throw GridError("build_overset: order must be 2 or 4");
  if (n_right < order + 2) throw GridError("build_overset: N_R too small");

  const int n_ghost = order / 2 + 1;
  const double h_right = 0.5 / n_right;
  const double h_left = delta * h_right;

  OversetGrid1D g;
  g.order = order;
  g.delta = delta;
  g.right = {Side::Right, 0.5, h_right, n_right, n_ghost};

  // Smallest N_L with b_L = -1 + N_L*h_L strictly past the start of the right
  // domain, so the active regions overlap and full donor stencils exist.
  const int n_max = static_cast<int>(std::ceil(2.5 / h_left));
  int n_left = std::max(order, static_cast<int>(std::floor(1.5 / h_left)));
  bool aligned = false;
  for (; n_left <= n_max; ++n_left) {
    const double b = -1.0 + n_left * h_left;
    const char* mo = std::getenv("WS_MIN_OVERLAP");
    const double extra = (mo && order == 4) ? std::atof(mo) : 0.0;
    if (b <= 0.5 + extra * h_right + 1e-12) continue;
    g.left = {Side::Left, -1.0, h_left, n_left, n_ghost};
    // fringe exclusion only for an isolated endpoint coincidence; commensurate
    // overlaps (the previous node coincides too) duplicate unknowns uniformly
    // and need no special treatment
    const char* r = std::getenv("WS_GRID_RULE");
    const int rmode = r ? std::atoi(r) : 0;
    aligned = rmode < 2 && order == 2 && node_aligned(b, g.right) &&
              !node_aligned(b - h_left, g.right);
    if (rmode == 1 || rmode == 3 || rmode == 6) {
      if (centered_feasible(g.left, g.right, order) &&
          centered_feasible(g.right, g.left, order))
        break;
    } else if (stencils_feasible(g.left, g.right, order, aligned) &&
               stencils_feasible(g.right, g.left, order, aligned))
      break;
  }
  if (n_left > n_max)
    throw GridError("build_overset: no feasible overlap for delta=" + std::to_string(delta));

  g.b_L = -1.0 + n_left * h_left;
  add_stencils(g, Side::Left, aligned);
  add_stencils(g, Side::Right, aligned);
  return g;
}

std::vector<OversetGrid1D> enumerate_grids(const SweepPlan& plan, int n_right, int order) {
  if (plan.n_delta < 1 || plan.delta_min > plan.delta_max)
    throw GridError("enumerate_grids: invalid sweep plan");
  std::vector<OversetGrid1D> grids;
  grids.reserve(plan.n_delta);
  for (int i = 0; i < plan.n_delta; ++i) {
    const double t = plan.n_delta == 1 ? 0.0 : double(i) / (plan.n_delta - 1);
    grids.push_back(build_overset(plan.delta_min + t * (plan.delta_max - plan.delta_min),
                                  n_right, order));
  }
  return grids;
}

nlohmann::json to_json(const OversetGrid1D& g) {
  auto comp = [](const ComponentGrid1D& c) {
    return nlohmann::json{{"side", to_string(c.side)},
                          {"x0", c.x0},
                          {"h", c.h},
                          {"n_active", c.n_active},
                          {"n_ghost", c.n_ghost}};
  };
  nlohmann::json stencils = nlohmann::json::array();
  for (const auto& s : g.stencils) {
    std::vector<double> w(s.weights.data(), s.weights.data() + s.weights.size());
    stencils.push_back({{"target_side", to_string(s.target_side)},
                        {"target_index", s.target_index},
                        {"donor_left", s.donor_left},
                        {"weights", w}});
  }
  return {{"order", g.order}, {"delta", g.delta},  {"b_L", g.b_L},
          {"left", comp(g.left)}, {"right", comp(g.right)}, {"stencils", stencils}};
}

}  // namespace ws
