#pragma once

// Columnar text formats. Modal and grid files:
//   # kind=modal n=<N>        rows  k,re,im   (k = 1..N)
//   # kind=grid n=<M>         rows  j,re,im   (j = 0..M)
// Control files:
//   # control q=<q> T=<T> m=<m>   rows  t_j,u_1,...,u_q  (t_j = interval start)
// Numbers are written with %.17g so outputs round-trip and are byte-stable.

#include "nlsctl/control_signal.hpp"
#include "nlsctl/field.hpp"
#include "nlsctl/spectral.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace nlsctl::textio {

std::string format_double(double x);

void write_modal(std::ostream& os, const ModalState& s);
void write_grid(std::ostream& os, const Eigen::VectorXcd& samples);
void write_control(std::ostream& os, const ControlSignal& u);

ModalState read_modal(std::istream& is);
/// Grid file as complex samples; j must run 0..M in order.
Eigen::VectorXcd read_grid(std::istream& is);
/// Real grid field; imaginary parts must vanish.
SampledField read_real_grid(std::istream& is);
ControlSignal read_control(std::istream& is);

ModalState load_modal(const std::string& path);
SampledField load_real_grid(const std::string& path);
ControlSignal load_control(const std::string& path);
void save_modal(const std::string& path, const ModalState& s);
void save_control(const std::string& path, const ControlSignal& u);

/// Minimal CSV writer: header once, then rows of preformatted cells.
class CsvWriter {
 public:
  CsvWriter(std::ostream& os, const std::vector<std::string>& header);
  void row(const std::vector<std::string>& cells);

 private:
  std::ostream& os_;
  std::size_t width_;
};

}  // namespace nlsctl::textio
