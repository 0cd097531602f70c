#pragma once

#include <Eigen/Dense>

namespace nlsctl {

/// Piecewise-constant control u: [0,T] -> R^q. Row j of `values` holds u on
/// [times(j), times(j+1)).
struct ControlSignal {
  Eigen::VectorXd times;   ///< m+1 strictly increasing nodes, times(0) = 0
  Eigen::MatrixXd values;  ///< m x q

  ControlSignal() = default;
  ControlSignal(Eigen::VectorXd t, Eigen::MatrixXd v);

  int intervals() const { return static_cast<int>(values.rows()); }
  int channels() const { return static_cast<int>(values.cols()); }
  double horizon() const { return times(times.size() - 1); }
  double width(int j) const { return times(j + 1) - times(j); }

  /// Value on the interval containing t; the right endpoint belongs to the last interval.
  Eigen::VectorXd at(double t) const;
  /// Index of the interval containing t.
  int interval_of(double t) const;

  /// (sum_j |u_j|^2 dt_j)^{1/2}
  double l2_norm() const;

  /// u(T - t). Interval boundaries are mirrored.
  ControlSignal reversed() const;

  /// Node times of this signal followed by `next` shifted by this horizon.
  ControlSignal concatenate(const ControlSignal& next) const;

  static ControlSignal uniform(double T, const Eigen::MatrixXd& values);
  static ControlSignal constant(double T, const Eigen::VectorXd& value, int intervals = 1);
  static ControlSignal zero(double T, int channels, int intervals = 1);

  /// True when every node of this signal is a multiple of h (relative 1e-9).
  bool aligned_with(double h) const;
};

ControlSignal operator+(const ControlSignal& a, const ControlSignal& b);
ControlSignal operator*(double s, const ControlSignal& a);

}  // namespace nlsctl
