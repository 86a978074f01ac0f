#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "etd/network.hpp"
#include "etd/observation.hpp"
#include "etd/schedule.hpp"

namespace etd {

struct SpectralCondition {
  // Positive definiteness of L (x) I_n + D_H.
  double base_min_eigenvalue = 0.0;
  bool base_positive_definite = false;

  // First t at which every eigenvalue of beta(t) (L (x) I_n) + alpha(t) D_H
  // lies in (0, 1).
  long t_star = 0;
  double max_eig_at_t_star = 0.0;
  // min over scanned t >= t_star of lambda_min(.) / alpha(t).
  double m0 = 0.0;
  // Every scanned t in [t_star, t_max] satisfied the condition.
  bool holds_through_t_max = false;
  long scanned_steps = 0;
  long t_max = 0;
};

/// L (x) I_n + D_H.
Eigen::MatrixXd information_coupling(const Network& net,
                                     const ObservationSystem& sys);

/// Scans t = 0..t_max (every step up to `dense_until`, then geometric
/// stride with ratio `growth`, always including t_max). Throws
/// DomainError for a disconnected network unless `allow_disconnected`, and
/// NotFound if no scanned step qualifies.
SpectralCondition spectral_condition(const Network& net,
                                     const ObservationSystem& sys,
                                     const ScheduleParams& params,
                                     long t_max = 1'000'000,
                                     bool allow_disconnected = false,
                                     long dense_until = 10'000,
                                     double growth = 1.01);

/// z(t+1) = (1 - r1(t)) z(t) + r2(t), r1 = min(1, a1/(t+1)^d1),
/// r2 = a2/(t+1)^d2. Returns (t+1)^d0 z(t) for t = 0..t_max.
/// Throws DomainError when the decay hypotheses do not hold.
std::vector<double> scalar_recursion(double z0, double a1, double a2,
                                     double delta1, double delta2,
                                     double delta0, long t_max);

struct AsymptoticCovariance {
  Eigen::MatrixXd sigma1;  // -(a_c/N) G + I/2
  Eigen::MatrixXd s1;      // (1 (x) I)^T Dbar_H R_v Dbar_H^T (1 (x) I)
  Eigen::MatrixXd s_c;     // empty unless hurwitz
  Eigen::VectorXd sigma1_eigenvalues;
  bool hurwitz = false;
  double residual = 0.0;   // ||sigma1 S + S sigma1^T + (a_c/N)^2 s1||_F
  double a_c = 0.0;
};

/// sigma1 and s1 without solving; never throws for valid systems.
AsymptoticCovariance covariance_terms(const ObservationSystem& sys,
                                      double a_c);

/// Solves sigma1 P + P sigma1^T = -(a_c/N)^2 s1 through the n^2 x n^2
/// Kronecker system. Throws NotHurwitz or SingularSystem.
AsymptoticCovariance asymptotic_covariance(const ObservationSystem& sys,
                                           double a_c);

/// Solve A X + X A^T = -Q for small dense A (vectorized).
Eigen::MatrixXd solve_lyapunov(const Eigen::MatrixXd& a,
                               const Eigen::MatrixXd& q);

}  // namespace etd
