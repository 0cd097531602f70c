#include "nlsctl/textio.hpp"

#include "nlsctl/error.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace nlsctl::textio {

namespace {

std::map<std::string, std::string> parse_header(const std::string& line, const std::string& expect_tag) {
  std::istringstream ss(line);
  std::string hash, tag;
  ss >> hash;
  if (hash != "#") throw Error(ErrorCode::ParseError, "missing '#' header line");
  std::map<std::string, std::string> kv;
  std::string tok;
  bool first = true;
  while (ss >> tok) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos) {
      if (first) tag = tok;
      else throw Error(ErrorCode::ParseError, "malformed header token '" + tok + "'");
    } else {
      kv[tok.substr(0, eq)] = tok.substr(eq + 1);
    }
    first = false;
  }
  if (!expect_tag.empty() && tag != expect_tag)
    throw Error(ErrorCode::ParseError, "expected '" + expect_tag + "' header");
  return kv;
}

std::vector<double> parse_row(const std::string& line, std::size_t expected, int lineno) {
  std::vector<double> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(cell, &used));
      while (used < cell.size() && std::isspace(static_cast<unsigned char>(cell[used]))) ++used;
      if (used != cell.size()) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": bad number '" + cell + "'");
    }
  }
  if (out.size() != expected)
    throw Error(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": expected " +
                                           std::to_string(expected) + " columns, got " + std::to_string(out.size()));
  return out;
}

int to_int(const std::map<std::string, std::string>& kv, const std::string& key) {
  auto it = kv.find(key);
  if (it == kv.end()) throw Error(ErrorCode::ParseError, "header lacks '" + key + "'");
  try {
    return std::stoi(it->second);
  } catch (const std::exception&) {
    throw Error(ErrorCode::ParseError, "header value " + key + "=" + it->second + " is not an integer");
  }
}

std::vector<std::string> data_lines(std::istream& is, std::string& header) {
  std::vector<std::string> lines;
  std::string line;
  bool have_header = false;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!have_header) {
      header = line;
      have_header = true;
      continue;
    }
    if (line[0] == '#') continue;
    lines.push_back(line);
  }
  if (!have_header) throw Error(ErrorCode::ParseError, "empty input");
  return lines;
}

Eigen::VectorXcd read_indexed(std::istream& is, const std::string& kind, int first_index, int& n) {
  std::string header;
  const auto lines = data_lines(is, header);
  const auto kv = parse_header(header, "");
  auto kit = kv.find("kind");
  if (kit == kv.end() || kit->second != kind)
    throw Error(ErrorCode::ParseError, "expected kind=" + kind + " header");
  n = to_int(kv, "n");
  const int count = kind == "modal" ? n : n + 1;
  if (static_cast<int>(lines.size()) != count)
    throw Error(ErrorCode::ParseError, "expected " + std::to_string(count) + " rows, got " +
                                           std::to_string(lines.size()));
  Eigen::VectorXcd v(count);
  for (int r = 0; r < count; ++r) {
    const auto row = parse_row(lines[r], 3, r + 2);
    if (static_cast<int>(row[0]) != r + first_index)
      throw Error(ErrorCode::ParseError, "row " + std::to_string(r + 2) + ": index out of order");
    v(r) = cplx(row[1], row[2]);
  }
  return v;
}

template <class F>
auto with_input(const std::string& path, F f) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ConfigError, "cannot open '" + path + "'");
  return f(in);
}

}  // namespace

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_modal(std::ostream& os, const ModalState& s) {
  os << "# kind=modal n=" << s.truncation() << '\n';
  for (int k = 1; k <= s.truncation(); ++k)
    os << k << ',' << format_double(s(k).real()) << ',' << format_double(s(k).imag()) << '\n';
}

void write_grid(std::ostream& os, const Eigen::VectorXcd& samples) {
  const Eigen::Index m = samples.size() - 1;
  os << "# kind=grid n=" << m << '\n';
  for (Eigen::Index j = 0; j <= m; ++j)
    os << j << ',' << format_double(samples(j).real()) << ',' << format_double(samples(j).imag()) << '\n';
}

void write_control(std::ostream& os, const ControlSignal& u) {
  os << "# control q=" << u.channels() << " T=" << format_double(u.horizon()) << " m=" << u.intervals() << '\n';
  for (int j = 0; j < u.intervals(); ++j) {
    os << format_double(u.times(j));
    for (int c = 0; c < u.channels(); ++c) os << ',' << format_double(u.values(j, c));
    os << '\n';
  }
}

ModalState read_modal(std::istream& is) {
  int n = 0;
  return ModalState(read_indexed(is, "modal", 1, n));
}

Eigen::VectorXcd read_grid(std::istream& is) {
  int n = 0;
  return read_indexed(is, "grid", 0, n);
}

SampledField read_real_grid(std::istream& is) {
  const Eigen::VectorXcd v = read_grid(is);
  if (v.imag().cwiseAbs().maxCoeff() > 0.0)
    throw Error(ErrorCode::InvalidPotential, "real field has non-zero imaginary parts");
  return SampledField(v.real());
}

ControlSignal read_control(std::istream& is) {
  std::string header;
  const auto lines = data_lines(is, header);
  const auto kv = parse_header(header, "control");
  const int q = to_int(kv, "q");
  const int m = to_int(kv, "m");
  auto tit = kv.find("T");
  if (tit == kv.end()) throw Error(ErrorCode::ParseError, "header lacks 'T'");
  double T = 0.0;
  try {
    T = std::stod(tit->second);
  } catch (const std::exception&) {
    throw Error(ErrorCode::ParseError, "header value T=" + tit->second + " is not a number");
  }
  if (q < 1 || m < 1) throw Error(ErrorCode::ParseError, "control header needs q >= 1 and m >= 1");
  if (static_cast<int>(lines.size()) != m)
    throw Error(ErrorCode::ParseError, "expected " + std::to_string(m) + " rows, got " + std::to_string(lines.size()));
  Eigen::VectorXd t(m + 1);
  Eigen::MatrixXd v(m, q);
  for (int r = 0; r < m; ++r) {
    const auto row = parse_row(lines[r], static_cast<std::size_t>(q) + 1, r + 2);
    t(r) = row[0];
    for (int c = 0; c < q; ++c) v(r, c) = row[c + 1];
  }
  t(m) = T;
  try {
    return ControlSignal(std::move(t), std::move(v));
  } catch (const Error& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
}

ModalState load_modal(const std::string& path) {
  return with_input(path, [](std::istream& in) { return read_modal(in); });
}

SampledField load_real_grid(const std::string& path) {
  return with_input(path, [](std::istream& in) { return read_real_grid(in); });
}

ControlSignal load_control(const std::string& path) {
  return with_input(path, [](std::istream& in) { return read_control(in); });
}

void save_modal(const std::string& path, const ModalState& s) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::ConfigError, "cannot write '" + path + "'");
  write_modal(out, s);
}

void save_control(const std::string& path, const ControlSignal& u) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::ConfigError, "cannot write '" + path + "'");
  write_control(out, u);
}

CsvWriter::CsvWriter(std::ostream& os, const std::vector<std::string>& header) : os_(os), width_(header.size()) {
  row(header);
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != width_) throw Error(ErrorCode::ShapeMismatch, "csv row width mismatch");
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) os_ << ',';
    os_ << cells[i];
  }
  os_ << '\n';
}

}  // namespace nlsctl::textio
