#include "nlsctl/control_signal.hpp"

#include "nlsctl/error.hpp"

#include <algorithm>
#include <cmath>

namespace nlsctl {

ControlSignal::ControlSignal(Eigen::VectorXd t, Eigen::MatrixXd v) : times(std::move(t)), values(std::move(v)) {
  if (values.rows() < 1) throw Error(ErrorCode::InvalidArgument, "control needs at least one interval");
  if (times.size() != values.rows() + 1)
    throw Error(ErrorCode::ShapeMismatch, "control has " + std::to_string(times.size()) + " nodes for " +
                                              std::to_string(values.rows()) + " intervals");
  if (std::abs(times(0)) > 0.0) throw Error(ErrorCode::InvalidArgument, "control time grid must start at 0");
  for (Eigen::Index j = 1; j < times.size(); ++j)
    if (!(times(j) > times(j - 1))) throw Error(ErrorCode::InvalidArgument, "control time grid not increasing");
  if (!values.allFinite()) throw Error(ErrorCode::InvalidArgument, "control has non-finite values");
}

int ControlSignal::interval_of(double t) const {
  const double* begin = times.data();
  const double* end = begin + times.size();
  int j = static_cast<int>(std::upper_bound(begin, end, t) - begin) - 1;
  return std::clamp(j, 0, intervals() - 1);
}

Eigen::VectorXd ControlSignal::at(double t) const { return values.row(interval_of(t)).transpose(); }

double ControlSignal::l2_norm() const {
  double s = 0.0;
  for (int j = 0; j < intervals(); ++j) s += values.row(j).squaredNorm() * width(j);
  return std::sqrt(s);
}

ControlSignal ControlSignal::reversed() const {
  const int m = intervals();
  const double T = horizon();
  Eigen::VectorXd t(m + 1);
  Eigen::MatrixXd v(m, channels());
  t(0) = 0.0;
  for (int j = 1; j <= m; ++j) t(j) = T - times(m - j);
  t(m) = T;
  for (int j = 0; j < m; ++j) v.row(j) = values.row(m - 1 - j);
  return ControlSignal(std::move(t), std::move(v));
}

ControlSignal ControlSignal::concatenate(const ControlSignal& next) const {
  if (next.channels() != channels()) throw Error(ErrorCode::ShapeMismatch, "channel counts differ");
  const int m1 = intervals(), m2 = next.intervals();
  Eigen::VectorXd t(m1 + m2 + 1);
  t.head(m1 + 1) = times;
  t.tail(m2) = next.times.tail(m2).array() + horizon();
  Eigen::MatrixXd v(m1 + m2, channels());
  v.topRows(m1) = values;
  v.bottomRows(m2) = next.values;
  return ControlSignal(std::move(t), std::move(v));
}

ControlSignal ControlSignal::uniform(double T, const Eigen::MatrixXd& values) {
  if (!(T > 0.0)) throw Error(ErrorCode::InvalidArgument, "horizon must be positive");
  const Eigen::Index m = values.rows();
  Eigen::VectorXd t(m + 1);
  for (Eigen::Index j = 0; j <= m; ++j) t(j) = T * static_cast<double>(j) / static_cast<double>(m);
  return ControlSignal(std::move(t), values);
}

ControlSignal ControlSignal::constant(double T, const Eigen::VectorXd& value, int intervals) {
  return uniform(T, value.transpose().replicate(intervals, 1));
}

ControlSignal ControlSignal::zero(double T, int channels, int intervals) {
  return uniform(T, Eigen::MatrixXd::Zero(intervals, channels));
}

bool ControlSignal::aligned_with(double h) const {
  for (Eigen::Index j = 0; j < times.size(); ++j) {
    const double r = times(j) / h;
    if (std::abs(r - std::round(r)) > 1e-9 * std::max(1.0, std::abs(r))) return false;
  }
  return true;
}

ControlSignal operator+(const ControlSignal& a, const ControlSignal& b) {
  if (a.channels() != b.channels() || a.intervals() != b.intervals() ||
      (a.times - b.times).cwiseAbs().maxCoeff() > 1e-14 * std::max(1.0, a.horizon()))
    throw Error(ErrorCode::TimeGridMismatch, "controls live on different time grids");
  return ControlSignal(a.times, a.values + b.values);
}

ControlSignal operator*(double s, const ControlSignal& a) { return ControlSignal(a.times, s * a.values); }

}  // namespace nlsctl
