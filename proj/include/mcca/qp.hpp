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

#pragma once

#include <Eigen/Dense>

#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "mcca/geometry.hpp"
#include "mcca/kinematics.hpp"

namespace mcca
{

/// Penalty weights of the velocity QPs.
///
/// alpha1: distance to the preferred velocity; alpha2: obstacle half-plane
/// slack; alpha3: robot half-plane slack; alpha4: MCCA half-plane slack;
/// alpha5: angular-control slack.
struct MccaWeights
{
  double alpha1 = 1e-2;
  double alpha2 = 1e4;
  double alpha3 = 1e2;
  double alpha4 = 1.0;
  double alpha5 = 2e4;

  /// Requires alpha2, alpha3 >= 10 alpha4 >= 100 alpha1 > 0 and alpha5 >= 0.
  void validate() const;
};

/// Linear row: coeffs . x (<= or ==) rhs.
struct LinearRow
{
  std::vector<double> coeffs;
  double rhs = 0.0;
};

struct Bounds
{
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
};

class QpError : public std::runtime_error
{
public:
  QpError(const std::string & what, double residual)
  : std::runtime_error(what), residual_(residual)
  {
  }
  double residual() const { return residual_; }

private:
  double residual_;
};

/// Dense convex QP
///
///   min  sum_k w_k (row_k . x - t_k)^2
///   s.t. inequalities (row . x <= rhs), equalities (row . x == rhs), boxes.
///
/// Single-variable terms give the usual diagonal objective
/// sum_i w_i (x_i - t_i)^2; general rows house objectives written over an
/// affine image of the decision variables.
class QpProblem
{
public:
  explicit QpProblem(int n_vars);

  int n_vars() const { return n_; }

  /// w (x_var - target)^2
  void add_square(int var, double weight, double target);
  /// w (row . x - target)^2
  void add_square(std::span<const double> row, double weight, double target);

  int add_inequality(std::vector<double> coeffs, double rhs);
  int add_equality(std::vector<double> coeffs, double rhs);
  void set_bounds(int var, double lo, double hi);

  /// Objective value, including the constant part.
  double objective(const Eigen::VectorXd & x) const;

  const Eigen::MatrixXd & quadratic() const { return quad_; }
  const Eigen::VectorXd & linear() const { return lin_; }
  double constant() const { return const_; }
  const std::vector<LinearRow> & inequalities() const { return ineq_; }
  const std::vector<LinearRow> & equalities() const { return eq_; }
  const std::vector<Bounds> & bounds() const { return bounds_; }

private:
  int n_;
  // objective = x' quad x + lin' x + const
  Eigen::MatrixXd quad_;
  Eigen::VectorXd lin_;
  double const_ = 0.0;
  std::vector<LinearRow> ineq_;
  std::vector<LinearRow> eq_;
  std::vector<Bounds> bounds_;
};

struct QpSolution
{
  Eigen::VectorXd x;
  double objective = 0.0;
  /// Multipliers (>= 0) of the inequality rows and of the lower/upper
  /// bounds, and of the equality rows (free sign). Stationarity reads
  /// grad f(x) + sum_i m_i row_i - lower + upper + sum_j e_j eq_j = 0.
  std::vector<double> inequality_multipliers;
  std::vector<double> lower_multipliers;
  std::vector<double> upper_multipliers;
  std::vector<double> equality_multipliers;
  /// max of scaled stationarity, primal infeasibility, complementarity and
  /// dual infeasibility.
  double kkt_residual = 0.0;
  int iterations = 0;
};

struct QpOptions
{
  int max_iterations = 0;  // 0: 10 (n + m) + 50
  double kkt_tolerance = 1e-8;
};

/// Goldfarb-Idnani dual active-set method. The Hessian must be positive
/// definite; every problem built here satisfies that through strictly
/// positive slack weights. Throws QpError on infeasibility, iteration
/// exhaustion or a KKT residual above tolerance.
QpSolution solve(const QpProblem & problem, const QpOptions & options = {});

/// KKT residual of a primal/dual pair, as reported in QpSolution.
double kkt_residual(const QpProblem & problem, const QpSolution & solution);

/// Slack-weighted half-plane groups for the holonomic QPs.
struct PlaneSet
{
  std::vector<HalfPlane> obstacle;
  std::vector<HalfPlane> robot;
  std::vector<HalfPlane> mcca;

  std::size_t size() const { return obstacle.size() + robot.size() + mcca.size(); }
};

/// Variables (v_x, v_y, one slack per plane):
///   min alpha1 |v - v_pref|^2 + alpha2 sum d_O^2 + alpha3 sum d_R^2 + alpha4 sum d_M^2
///   s.t. violation(v, plane) <= d, d >= 0, |v_x|, |v_y| <= box.
QpProblem build_holonomic(
  const Vec2 & v_pref, const PlaneSet & planes, const MccaWeights & weights, double box);

/// Extract (v_x, v_y) from a holonomic solution.
inline Vec2 holonomic_velocity(const QpSolution & s) { return {s.x[0], s.x[1]}; }

/// Linearised angular-control constraint.
struct AngularConstraint
{
  bool active = false;
  double sweep = 0.0;        ///< angle the heading must still turn, [0, 2 pi)
  double theta_prime = 0.0;  ///< admissible braking angle
  /// Rows over omega: slope * omega - slack <= rhs and -slope * omega - slack <= rhs.
  double slope = 0.0;
  double rhs = 0.0;
};

enum class AngularForm
{
  /// Integral bound with T = theta' L / (2 a_max), linear in |omega|.
  printed,
  /// |omega| small enough to brake to rest within theta', accounting for one
  /// control period at the commanded rate.
  braking,
};

/// `omega_sign` is the sign of the current yaw rate (0 picks the shorter
/// rotation). Inactive when `v_h_opt` is zero. `dt` is only used by the
/// braking form.
AngularConstraint angular_constraint(
  int omega_sign, double heading, const Vec2 & v_h_opt, double mu, double a_max, double axle_length,
  AngularForm form = AngularForm::printed, double dt = 0.25);

struct DiffDriveInput
{
  Vec2 v_pref;
  double heading = 0.0;
  double v_left = 0.0;   ///< current wheel speeds
  double v_right = 0.0;
  double dt = 0.25;
  AngularConstraint angular;
};

/// Variables (v_l, v_r, one slack per plane, angular slack). The effective
/// centre velocity and yaw rate are substituted as affine functions of the
/// wheel speeds at the current heading. The angular slack and its rows are
/// omitted when alpha5 is zero or the constraint is inactive.
QpProblem build_diffdrive(
  const DiffDriveInput & input, const DiffDriveParams & params, const PlaneSet & planes,
  const MccaWeights & weights);

}  // namespace mcca
