#include "nlsctl/field.hpp"

#include "nlsctl/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace nlsctl {

using std::numbers::pi;

SampledField Profile::sample(int grid_size) const {
  if (grid_size < 1) throw Error(ErrorCode::InvalidArgument, "grid size must be positive");
  Eigen::VectorXd v(grid_size + 1);
  for (int j = 0; j <= grid_size; ++j) v(j) = fn_(static_cast<double>(j) / grid_size);
  return SampledField(std::move(v));
}

Profile Profile::affine(double a, double b, std::string name) const {
  auto f = fn_;
  if (name.empty()) name = name_;
  return Profile(std::move(name), [f, a, b](double x) { return a * f(x) + b; });
}

Profile Profile::constant(double c) {
  return Profile("constant", [c](double) { return c; });
}

Profile Profile::from_samples(const SampledField& field, std::string name) {
  // Catmull-Rom interpolation through the nodes; exact at the nodes.
  const Eigen::VectorXd v = field.values;
  const int m = field.grid_size();
  if (m < 1) throw Error(ErrorCode::InvalidArgument, "sampled field needs at least two nodes");
  return Profile(std::move(name), [v, m](double x) {
    const double s = std::clamp(x, 0.0, 1.0) * m;
    int j = std::min(static_cast<int>(std::floor(s)), m - 1);
    const double t = s - j;
    auto at = [&](int i) {
      // Linear extrapolation past the ends.
      if (i < 0) return 2.0 * v(0) - v(1);
      if (i > m) return 2.0 * v(m) - v(m - 1);
      return v(i);
    };
    const double p0 = at(j - 1), p1 = at(j), p2 = at(j + 1), p3 = at(j + 2);
    return 0.5 * ((2.0 * p1) + (-p0 + p2) * t + (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3) * t * t +
                  (-p0 + 3.0 * p1 - 3.0 * p2 + p3) * t * t * t);
  });
}

namespace profiles {

Profile zero() { return Profile("zero", [](double) { return 0.0; }); }
Profile one() { return Profile("one", [](double) { return 1.0; }); }
Profile cos_pi() { return Profile("cos_pi", [](double x) { return std::cos(pi * x); }); }
Profile cos_2pi() { return Profile("cos_2pi", [](double x) { return std::cos(2.0 * pi * x); }); }
Profile x() { return Profile("x", [](double x) { return x; }); }
Profile x_sq() { return Profile("x_sq", [](double x) { return x * x; }); }
Profile phi1_sq() {
  return Profile("phi1_sq", [](double x) {
    const double s = std::sin(pi * x);
    return 2.0 * s * s;
  });
}

std::vector<std::string> builtin_names() {
  return {"zero", "one", "cos_pi", "cos_2pi", "x", "x_sq", "phi1_sq"};
}

Profile builtin(const std::string& name) {
  if (name == "zero") return zero();
  if (name == "one") return one();
  if (name == "cos_pi") return cos_pi();
  if (name == "cos_2pi") return cos_2pi();
  if (name == "x") return x();
  if (name == "x_sq") return x_sq();
  if (name == "phi1_sq") return phi1_sq();
  throw Error(ErrorCode::ConfigError, "unknown built-in profile '" + name + "'");
}

}  // namespace profiles
}  // namespace nlsctl
