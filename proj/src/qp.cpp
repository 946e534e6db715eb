// Copyright 2026 The mcca-sim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "mcca/qp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mcca
{

void MccaWeights::validate() const
{
  if (!(alpha1 > 0.0)) {
    throw std::invalid_argument("alpha1 must be positive");
  }
  if (alpha4 < 10.0 * alpha1 || alpha2 < 10.0 * alpha4 || alpha3 < 10.0 * alpha4) {
    throw std::invalid_argument("weights must satisfy alpha2, alpha3 >> alpha4 >> alpha1");
  }
  if (alpha5 < 0.0) {
    throw std::invalid_argument("alpha5 must be nonnegative");
  }
}

QpProblem::QpProblem(int n_vars)
: n_(n_vars), quad_(Eigen::MatrixXd::Zero(n_vars, n_vars)), lin_(Eigen::VectorXd::Zero(n_vars)),
  bounds_(static_cast<std::size_t>(n_vars))
{
  if (n_vars <= 0) {
    throw std::invalid_argument("QP needs at least one variable");
  }
}

void QpProblem::add_square(int var, double weight, double target)
{
  if (weight < 0.0) {
    throw std::invalid_argument("objective weights must be nonnegative");
  }
  quad_(var, var) += weight;
  lin_[var] -= 2.0 * weight * target;
  const_ += weight * target * target;
}

void QpProblem::add_square(std::span<const double> row, double weight, double target)
{
  if (weight < 0.0) {
    throw std::invalid_argument("objective weights must be nonnegative");
  }
  if (static_cast<int>(row.size()) != n_) {
    throw std::invalid_argument("objective row has the wrong length");
  }
  for (int i = 0; i < n_; ++i) {
    if (row[i] == 0.0) {
      continue;
    }
    for (int j = 0; j < n_; ++j) {
      quad_(i, j) += weight * row[i] * row[j];
    }
    lin_[i] -= 2.0 * weight * target * row[i];
  }
  const_ += weight * target * target;
}

int QpProblem::add_inequality(std::vector<double> coeffs, double rhs)
{
  if (static_cast<int>(coeffs.size()) != n_) {
    throw std::invalid_argument("constraint row has the wrong length");
  }
  ineq_.push_back({std::move(coeffs), rhs});
  return static_cast<int>(ineq_.size()) - 1;
}

int QpProblem::add_equality(std::vector<double> coeffs, double rhs)
{
  if (static_cast<int>(coeffs.size()) != n_) {
    throw std::invalid_argument("constraint row has the wrong length");
  }
  eq_.push_back({std::move(coeffs), rhs});
  return static_cast<int>(eq_.size()) - 1;
}

void QpProblem::set_bounds(int var, double lo, double hi)
{
  if (lo > hi) {
    throw std::invalid_argument("empty variable bounds");
  }
  bounds_[static_cast<std::size_t>(var)] = {lo, hi};
}

double QpProblem::objective(const Eigen::VectorXd & x) const
{
  return x.dot(quad_ * x) + lin_.dot(x) + const_;
}

namespace
{

enum class RowKind { Inequality, Lower, Upper };

// a . x + c0 >= 0, stored sparse.
struct Constraint
{
  std::vector<std::pair<int, double>> terms;
  double c0 = 0.0;
  RowKind kind = RowKind::Inequality;
  int source = 0;

  double value(const Eigen::VectorXd & x) const
  {
    double s = c0;
    for (const auto & [i, a] : terms) {
      s += a * x[i];
    }
    return s;
  }
  double scale(const Eigen::VectorXd & x) const
  {
    double s = 1.0 + std::abs(c0);
    for (const auto & [i, a] : terms) {
      s += std::abs(a * x[i]);
    }
    return s;
  }
  double norm() const
  {
    double s = 0.0;
    for (const auto & t : terms) {
      s += t.second * t.second;
    }
    return std::sqrt(s);
  }
};

std::vector<std::pair<int, double>> sparse(const std::vector<double> & row, double sign)
{
  std::vector<std::pair<int, double>> out;
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (row[i] != 0.0) {
      out.emplace_back(static_cast<int>(i), sign * row[i]);
    }
  }
  return out;
}

// J = L^{-T} for G = L L^T, factorising each connected block of G
// separately; the QPs here are block diagonal with tiny blocks.
Eigen::MatrixXd inverse_cholesky_factor(const Eigen::MatrixXd & g)
{
  const int n = static_cast<int>(g.rows());
  std::vector<int> parent(static_cast<std::size_t>(n));
  std::iota(parent.begin(), parent.end(), 0);
  const auto find = [&](int i) {
    while (parent[i] != i) {
      parent[i] = parent[parent[i]];
      i = parent[i];
    }
    return i;
  };
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (g(i, j) != 0.0 || g(j, i) != 0.0) {
        parent[find(j)] = find(i);
      }
    }
  }
  std::vector<std::vector<int>> blocks(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    blocks[find(i)].push_back(i);
  }

  Eigen::MatrixXd j_mat = Eigen::MatrixXd::Zero(n, n);
  for (const auto & idx : blocks) {
    if (idx.empty()) {
      continue;
    }
    const int m = static_cast<int>(idx.size());
    Eigen::MatrixXd block(m, m);
    for (int a = 0; a < m; ++a) {
      for (int b = 0; b < m; ++b) {
        block(a, b) = g(idx[a], idx[b]);
      }
    }
    Eigen::LLT<Eigen::MatrixXd> llt(block);
    if (llt.info() != Eigen::Success) {
      throw QpError("Hessian is not positive definite", std::numeric_limits<double>::infinity());
    }
    const Eigen::MatrixXd l_inv =
      llt.matrixL().solve(Eigen::MatrixXd::Identity(m, m));
    for (int a = 0; a < m; ++a) {
      for (int b = 0; b < m; ++b) {
        j_mat(idx[a], idx[b]) = l_inv(b, a);
      }
    }
  }
  return j_mat;
}

class ActiveSetSolver
{
public:
  ActiveSetSolver(const Eigen::MatrixXd & g, const Eigen::VectorXd & g0)
  : n_(static_cast<int>(g.rows())), j_(inverse_cholesky_factor(g)), r_(Eigen::MatrixXd::Zero(n_, n_))
  {
    x_ = -(j_ * (j_.transpose() * g0));
  }

  const Eigen::VectorXd & x() const { return x_; }
  Eigen::VectorXd & x() { return x_; }
  int active_count() const { return static_cast<int>(active_.size()); }
  const std::vector<int> & active() const { return active_; }
  const std::vector<double> & multipliers() const { return u_; }
  int iterations() const { return iterations_; }

  struct Step
  {
    Eigen::VectorXd d;
    Eigen::VectorXd z;
    Eigen::VectorXd r;
    double zn = 0.0;
    bool zero_primal = false;
  };

  Step step_for(const Constraint & c) const
  {
    Step s;
    s.d = Eigen::VectorXd::Zero(n_);
    for (const auto & [i, a] : c.terms) {
      s.d += a * j_.row(i).transpose();
    }
    const int q = active_count();
    s.z = j_.rightCols(n_ - q) * s.d.tail(n_ - q);
    s.r = r_.topLeftCorner(q, q).triangularView<Eigen::Upper>().solve(s.d.head(q));
    const double tail = s.d.tail(n_ - q).squaredNorm();
    s.zero_primal = tail <= 1e-24 * std::max(s.d.squaredNorm(), 1e-300) || q == n_;
    for (const auto & [i, a] : c.terms) {
      s.zn += a * s.z[i];
    }
    return s;
  }

  void add(int id, double multiplier, Eigen::VectorXd d)
  {
    const int q = active_count();
    for (int j = n_ - 1; j > q; --j) {
      if (d[j] == 0.0) {
        continue;
      }
      const double h = std::hypot(d[j - 1], d[j]);
      const double c = d[j - 1] / h;
      const double s = d[j] / h;
      d[j - 1] = h;
      d[j] = 0.0;
      for (int k = 0; k < n_; ++k) {
        const double a = j_(k, j - 1);
        const double b = j_(k, j);
        j_(k, j - 1) = c * a + s * b;
        j_(k, j) = -s * a + c * b;
      }
    }
    r_.col(q).head(q + 1) = d.head(q + 1);
    active_.push_back(id);
    u_.push_back(multiplier);
    ++iterations_;
  }

  void drop(int pos)
  {
    const int q = active_count();
    active_.erase(active_.begin() + pos);
    u_.erase(u_.begin() + pos);
    for (int c = pos; c < q - 1; ++c) {
      r_.col(c) = r_.col(c + 1);
    }
    r_.col(q - 1).setZero();
    for (int j = pos; j < q - 1; ++j) {
      const double a = r_(j, j);
      const double b = r_(j + 1, j);
      if (b == 0.0) {
        continue;
      }
      const double h = std::hypot(a, b);
      const double c = a / h;
      const double s = b / h;
      for (int col = j; col < q - 1; ++col) {
        const double top = r_(j, col);
        const double bot = r_(j + 1, col);
        r_(j, col) = c * top + s * bot;
        r_(j + 1, col) = -s * top + c * bot;
      }
      r_(j + 1, j) = 0.0;
      for (int k = 0; k < n_; ++k) {
        const double p = j_(k, j);
        const double w = j_(k, j + 1);
        j_(k, j) = c * p + s * w;
        j_(k, j + 1) = -s * p + c * w;
      }
    }
    ++iterations_;
  }

  void shift_multipliers(double t, const Eigen::VectorXd & r)
  {
    for (int i = 0; i < active_count(); ++i) {
      u_[static_cast<std::size_t>(i)] -= t * r[i];
    }
  }

private:
  int n_;
  Eigen::MatrixXd j_;
  Eigen::MatrixXd r_;
  Eigen::VectorXd x_;
  std::vector<int> active_;
  std::vector<double> u_;
  int iterations_ = 0;
};

}  // namespace

double kkt_residual(const QpProblem & problem, const QpSolution & sol)
{
  const int n = problem.n_vars();
  const Eigen::VectorXd & x = sol.x;
  const Eigen::VectorXd hx = 2.0 * problem.quadratic() * x;
  Eigen::VectorXd grad = hx + problem.linear();
  const double scale = 1.0 + std::max(hx.lpNorm<Eigen::Infinity>(), problem.linear().lpNorm<Eigen::Infinity>());

  double primal = 0.0;
  double comp = 0.0;
  double dual = 0.0;
  const auto & ineq = problem.inequalities();
  for (std::size_t i = 0; i < ineq.size(); ++i) {
    const double m = sol.inequality_multipliers[i];
    double lhs = 0.0;
    double mag = 1.0 + std::abs(ineq[i].rhs);
    for (int k = 0; k < n; ++k) {
      lhs += ineq[i].coeffs[k] * x[k];
      mag += std::abs(ineq[i].coeffs[k] * x[k]);
      grad[k] += m * ineq[i].coeffs[k];
    }
    const double slack = ineq[i].rhs - lhs;
    primal = std::max(primal, -slack / mag);
    comp = std::max(comp, std::abs(m * slack) / scale);
    dual = std::max(dual, -m / scale);
  }
  const auto & bounds = problem.bounds();
  for (int k = 0; k < n; ++k) {
    const double lo = sol.lower_multipliers[k];
    const double hi = sol.upper_multipliers[k];
    grad[k] += hi - lo;
    const double mag = 1.0 + std::abs(x[k]);
    if (std::isfinite(bounds[k].lo)) {
      primal = std::max(primal, (bounds[k].lo - x[k]) / mag);
      comp = std::max(comp, std::abs(lo * (x[k] - bounds[k].lo)) / scale);
    }
    if (std::isfinite(bounds[k].hi)) {
      primal = std::max(primal, (x[k] - bounds[k].hi) / mag);
      comp = std::max(comp, std::abs(hi * (bounds[k].hi - x[k])) / scale);
    }
    dual = std::max({dual, -lo / scale, -hi / scale});
  }
  const auto & eq = problem.equalities();
  for (std::size_t i = 0; i < eq.size(); ++i) {
    double lhs = 0.0;
    double mag = 1.0 + std::abs(eq[i].rhs);
    for (int k = 0; k < n; ++k) {
      lhs += eq[i].coeffs[k] * x[k];
      mag += std::abs(eq[i].coeffs[k] * x[k]);
      grad[k] += sol.equality_multipliers[i] * eq[i].coeffs[k];
    }
    primal = std::max(primal, std::abs(lhs - eq[i].rhs) / mag);
  }
  const double stationarity = grad.lpNorm<Eigen::Infinity>() / scale;
  return std::max({stationarity, primal, comp, dual});
}

QpSolution solve(const QpProblem & problem, const QpOptions & options)
{
  const int n = problem.n_vars();

  std::vector<Constraint> cons;
  for (std::size_t i = 0; i < problem.inequalities().size(); ++i) {
    const auto & row = problem.inequalities()[i];
    cons.push_back({sparse(row.coeffs, -1.0), row.rhs, RowKind::Inequality, static_cast<int>(i)});
  }
  for (int k = 0; k < n; ++k) {
    const Bounds & b = problem.bounds()[k];
    if (std::isfinite(b.lo)) {
      cons.push_back({{{k, 1.0}}, -b.lo, RowKind::Lower, k});
    }
    if (std::isfinite(b.hi)) {
      cons.push_back({{{k, -1.0}}, b.hi, RowKind::Upper, k});
    }
  }
  const int n_eq = static_cast<int>(problem.equalities().size());
  std::vector<Constraint> eqs;
  for (const auto & row : problem.equalities()) {
    eqs.push_back({sparse(row.coeffs, 1.0), -row.rhs, RowKind::Inequality, 0});
  }

  const int max_iter =
    options.max_iterations > 0 ? options.max_iterations
                               : 10 * (n + static_cast<int>(cons.size()) + n_eq) + 50;

  ActiveSetSolver as(2.0 * problem.quadratic(), problem.linear());

  // Equalities enter first with full steps; ids -1 - k mark them.
  for (int k = 0; k < n_eq; ++k) {
    const auto step = as.step_for(eqs[k]);
    const double s = eqs[k].value(as.x());
    if (step.zero_primal) {
      if (std::abs(s) > 1e-9 * eqs[k].scale(as.x())) {
        throw QpError("inconsistent equality constraints", std::abs(s));
      }
      continue;
    }
    const double t = -s / step.zn;
    as.x() += t * step.z;
    as.shift_multipliers(t, step.r);
    as.add(-1 - k, t, step.d);
  }

  std::vector<char> is_active(cons.size(), 0);
  for (;;) {
    if (as.iterations() > max_iter) {
      throw QpError("active-set iteration limit reached", std::numeric_limits<double>::infinity());
    }
    int p = -1;
    double worst = 0.0;
    for (std::size_t i = 0; i < cons.size(); ++i) {
      if (is_active[i]) {
        continue;
      }
      const double s = cons[i].value(as.x());
      if (s >= -1e-12 * cons[i].scale(as.x())) {
        continue;
      }
      const double normalized_s = s / cons[i].norm();
      if (normalized_s < worst) {
        worst = normalized_s;
        p = static_cast<int>(i);
      }
    }
    if (p < 0) {
      break;
    }

    double u_plus = 0.0;
    for (;;) {
      if (as.iterations() > max_iter) {
        throw QpError("active-set iteration limit reached", std::numeric_limits<double>::infinity());
      }
      const auto step = as.step_for(cons[p]);
      // Blocking active inequality for a dual step.
      double t1 = std::numeric_limits<double>::infinity();
      int block = -1;
      const auto & act = as.active();
      for (int j = 0; j < as.active_count(); ++j) {
        if (act[j] < 0 || step.r[j] <= 1e-14) {
          continue;
        }
        const double ratio = as.multipliers()[j] / step.r[j];
        if (ratio < t1) {
          t1 = ratio;
          block = j;
        }
      }
      const double s_p = cons[p].value(as.x());
      const double t2 = step.zero_primal || step.zn <= 0.0
                          ? std::numeric_limits<double>::infinity()
                          : -s_p / step.zn;
      const double t = std::min(t1, t2);
      if (!std::isfinite(t)) {
        throw QpError("QP is infeasible", std::abs(s_p));
      }
      if (!std::isfinite(t2)) {
        as.shift_multipliers(t, step.r);
        u_plus += t;
        is_active[act[block]] = 0;
        as.drop(block);
        continue;
      }
      as.x() += t * step.z;
      as.shift_multipliers(t, step.r);
      u_plus += t;
      if (t2 <= t1) {
        as.add(p, u_plus, step.d);
        is_active[p] = 1;
        break;
      }
      is_active[act[block]] = 0;
      as.drop(block);
    }
  }

  QpSolution sol;
  sol.x = as.x();
  sol.objective = problem.objective(sol.x);
  sol.iterations = as.iterations();
  sol.inequality_multipliers.assign(problem.inequalities().size(), 0.0);
  sol.lower_multipliers.assign(static_cast<std::size_t>(n), 0.0);
  sol.upper_multipliers.assign(static_cast<std::size_t>(n), 0.0);
  sol.equality_multipliers.assign(static_cast<std::size_t>(n_eq), 0.0);
  for (int j = 0; j < as.active_count(); ++j) {
    const int id = as.active()[j];
    const double u = as.multipliers()[j];
    if (id < 0) {
      sol.equality_multipliers[static_cast<std::size_t>(-1 - id)] = -u;
      continue;
    }
    const Constraint & c = cons[static_cast<std::size_t>(id)];
    switch (c.kind) {
      case RowKind::Inequality:
        sol.inequality_multipliers[c.source] = u;
        break;
      case RowKind::Lower:
        sol.lower_multipliers[c.source] = u;
        break;
      case RowKind::Upper:
        sol.upper_multipliers[c.source] = u;
        break;
    }
  }
  sol.kkt_residual = kkt_residual(problem, sol);
  if (!(sol.kkt_residual <= options.kkt_tolerance)) {
    throw QpError("KKT residual above tolerance", sol.kkt_residual);
  }
  return sol;
}

QpProblem build_holonomic(
  const Vec2 & v_pref, const PlaneSet & planes, const MccaWeights & weights, double box)
{
  const int n_planes = static_cast<int>(planes.size());
  QpProblem qp(2 + n_planes);
  qp.add_square(0, weights.alpha1, v_pref.x);
  qp.add_square(1, weights.alpha1, v_pref.y);
  qp.set_bounds(0, -box, box);
  qp.set_bounds(1, -box, box);

  int slack = 2;
  const auto add_group = [&](const std::vector<HalfPlane> & group, double weight) {
    for (const HalfPlane & hp : group) {
      // det(v - p, d) = d.y v.x - d.x v.y - det(p, d) <= slack
      std::vector<double> row(static_cast<std::size_t>(qp.n_vars()), 0.0);
      row[0] = hp.direction.y;
      row[1] = -hp.direction.x;
      row[static_cast<std::size_t>(slack)] = -1.0;
      qp.add_inequality(std::move(row), det(hp.point, hp.direction));
      qp.add_square(slack, weight, 0.0);
      qp.set_bounds(slack, 0.0, std::numeric_limits<double>::infinity());
      ++slack;
    }
  };
  add_group(planes.obstacle, weights.alpha2);
  add_group(planes.robot, weights.alpha3);
  add_group(planes.mcca, weights.alpha4);
  return qp;
}

AngularConstraint angular_constraint(
  int omega_sign, double heading, const Vec2 & v_h_opt, double mu, double a_max, double axle_length,
  AngularForm form, double dt)
{
  AngularConstraint ac;
  if (v_h_opt.squared_norm() == 0.0) {
    return ac;
  }
  if (!(mu > 1.0)) {
    throw std::invalid_argument("angular control level mu must exceed 1");
  }
  ac.active = true;
  const double target = std::atan2(v_h_opt.y, v_h_opt.x);
  const double diff = wrap_angle(target - heading);
  double sweep = 0.0;
  if (omega_sign > 0) {
    sweep = diff < 0.0 ? diff + 2.0 * kPi : diff;
  } else if (omega_sign < 0) {
    sweep = diff > 0.0 ? 2.0 * kPi - diff : -diff;
  } else {
    sweep = std::abs(diff);
  }
  if (sweep >= 2.0 * kPi) {
    sweep = 0.0;
  }
  ac.sweep = sweep;
  // v_omega . v_h_opt > 0 exactly when the remaining sweep is in (0, pi).
  const bool same_side = sweep > 0.0 && sweep < kPi;
  ac.theta_prime = same_side ? sweep / mu : sweep;
  const double tp = ac.theta_prime;
  if (form == AngularForm::braking) {
    // Largest yaw rate, held for one period and then braked at 2 a_max / L,
    // whose total sweep stays within theta'.
    const double accel = 2.0 * a_max / axle_length;
    ac.slope = 1.0;
    ac.rhs = accel * (std::sqrt(dt * dt / 4.0 + 2.0 * tp / accel) - dt / 2.0);
    return ac;
  }
  if (tp == 0.0) {
    ac.slope = 1.0;
    ac.rhs = 2.0 * a_max / axle_length;
  } else {
    ac.slope = tp * axle_length / (2.0 * a_max);
    ac.rhs = tp + tp * tp * axle_length / (4.0 * a_max);
  }
  return ac;
}

QpProblem build_diffdrive(
  const DiffDriveInput & in, const DiffDriveParams & params, const PlaneSet & planes,
  const MccaWeights & weights)
{
  const bool angular = in.angular.active && weights.alpha5 > 0.0;
  const int n_planes = static_cast<int>(planes.size());
  const int n = 2 + n_planes + (angular ? 1 : 0);
  QpProblem qp(n);
  const KinematicMap m = kinematic_map(in.heading, params);

  std::vector<double> row(static_cast<std::size_t>(n), 0.0);
  row[0] = m.vx_l;
  row[1] = m.vx_r;
  qp.add_square(row, weights.alpha1, in.v_pref.x);
  row[0] = m.vy_l;
  row[1] = m.vy_r;
  qp.add_square(row, weights.alpha1, in.v_pref.y);

  const double reach = params.a_max * in.dt;
  qp.set_bounds(
    0, std::max(-params.v_max, in.v_left - reach), std::min(params.v_max, in.v_left + reach));
  qp.set_bounds(
    1, std::max(-params.v_max, in.v_right - reach), std::min(params.v_max, in.v_right + reach));

  int slack = 2;
  const auto add_group = [&](const std::vector<HalfPlane> & group, double weight) {
    for (const HalfPlane & hp : group) {
      std::vector<double> r(static_cast<std::size_t>(n), 0.0);
      r[0] = hp.direction.y * m.vx_l - hp.direction.x * m.vy_l;
      r[1] = hp.direction.y * m.vx_r - hp.direction.x * m.vy_r;
      r[static_cast<std::size_t>(slack)] = -1.0;
      qp.add_inequality(std::move(r), det(hp.point, hp.direction));
      qp.add_square(slack, weight, 0.0);
      qp.set_bounds(slack, 0.0, std::numeric_limits<double>::infinity());
      ++slack;
    }
  };
  add_group(planes.obstacle, weights.alpha2);
  add_group(planes.robot, weights.alpha3);
  add_group(planes.mcca, weights.alpha4);

  if (angular) {
    // omega = (v_r - v_l) / L
    const double k = in.angular.slope / params.axle_length;
    for (const double sign : {1.0, -1.0}) {
      std::vector<double> r(static_cast<std::size_t>(n), 0.0);
      r[0] = -sign * k;
      r[1] = sign * k;
      r[static_cast<std::size_t>(slack)] = -1.0;
      qp.add_inequality(std::move(r), in.angular.rhs);
    }
    qp.add_square(slack, weights.alpha5, 0.0);
    qp.set_bounds(slack, 0.0, std::numeric_limits<double>::infinity());
  }
  return qp;
}

}  // namespace mcca
