#pragma once

#include <Eigen/Dense>

#include <functional>
#include <string>
#include <vector>

namespace nlsctl {

/// Real function values on the uniform grid x_j = j/M, j = 0..M.
struct SampledField {
  Eigen::VectorXd values;

  SampledField() = default;
  explicit SampledField(Eigen::VectorXd v) : values(std::move(v)) {}

  int grid_size() const { return static_cast<int>(values.size()) - 1; }
  double node(int j) const { return static_cast<double>(j) / grid_size(); }
};

/// A real profile on [0,1] that can be sampled at any resolution. Built-ins
/// are analytic; custom profiles come from sample files and are interpolated.
class Profile {
 public:
  Profile() = default;
  Profile(std::string name, std::function<double(double)> fn)
      : name_(std::move(name)), fn_(std::move(fn)) {}

  const std::string& name() const { return name_; }
  double operator()(double x) const { return fn_(x); }
  bool empty() const { return !fn_; }

  SampledField sample(int grid_size) const;

  /// Scaled and shifted copy: a * f(x) + b.
  Profile affine(double a, double b, std::string name = {}) const;

  static Profile constant(double c);
  static Profile from_samples(const SampledField& field, std::string name = "custom");

 private:
  std::string name_;
  std::function<double(double)> fn_;
};

namespace profiles {
Profile zero();
Profile one();
Profile cos_pi();
Profile cos_2pi();
Profile x();
Profile x_sq();
/// phi_1(x)^2 = 2 sin^2(pi x) = 1 - cos(2 pi x).
Profile phi1_sq();
/// Looks up a built-in by name: zero, one, cos_pi, cos_2pi, x, x_sq, phi1_sq.
/// Throws ConfigError for unknown names.
Profile builtin(const std::string& name);
std::vector<std::string> builtin_names();
}  // namespace profiles

}  // namespace nlsctl
