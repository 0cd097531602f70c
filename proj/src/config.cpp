#include "nlsctl/config.hpp"

#include "nlsctl/error.hpp"
#include "nlsctl/textio.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <ostream>
#include <sstream>

namespace nlsctl {

namespace pt = boost::property_tree;

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

std::string canonical(ValueType t, const std::string& raw, const std::string& key) {
  const std::string v = trim(raw);
  auto bad = [&](const char* what) {
    return Error(ErrorCode::ConfigError, "key '" + key + "': '" + v + "' is not " + what);
  };
  switch (t) {
    case ValueType::Int: {
      std::size_t used = 0;
      try {
        const long x = std::stol(v, &used);
        if (used != v.size()) throw bad("an integer");
        return std::to_string(x);
      } catch (const std::logic_error&) {
        throw bad("an integer");
      }
    }
    case ValueType::Double: {
      std::size_t used = 0;
      try {
        const double x = std::stod(v, &used);
        if (used != v.size()) throw bad("a number");
        // Shortest round-trip form, so dump -> load -> dump is stable.
        char buf[32];
        const auto res = std::to_chars(buf, buf + sizeof buf, x);
        return std::string(buf, res.ptr);
      } catch (const std::logic_error&) {
        throw bad("a number");
      }
    }
    case ValueType::Bool:
      if (v == "true" || v == "1" || v == "yes") return "true";
      if (v == "false" || v == "0" || v == "no") return "false";
      throw bad("a boolean");
    case ValueType::String:
      return v;
  }
  return v;
}

const char* type_name(ValueType t) {
  switch (t) {
    case ValueType::Int: return "int";
    case ValueType::Double: return "float";
    case ValueType::String: return "string";
    case ValueType::Bool: return "bool";
  }
  return "?";
}

}  // namespace

Config::Config() {
  auto add = [&](const std::string& sec, const std::string& key, ValueType t, const std::string& v,
                 const std::string& help) { sections_[sec][key] = {t, canonical(t, v, sec + "." + key), help}; };
  using VT = ValueType;
  add("problem", "V", VT::String, "zero", "potential: built-in name or file:<grid file>");
  add("problem", "W", VT::String, "auto", "real-linear coefficient; auto = 2 p kappa phi^2p");
  add("problem", "Q", VT::String, "one,cos_pi,cos_2pi,x_sq", "comma-separated control profiles");
  add("problem", "kappa", VT::Double, "0.5", "nonlinearity strength");
  add("problem", "p", VT::Int, "1", "nonlinearity power");
  add("problem", "T", VT::Double, "1", "horizon");
  add("problem", "N", VT::Int, "16", "sine modes");
  add("problem", "steps", VT::Int, "2048", "time steps on [0,T]");
  add("problem", "grid", VT::Int, "0", "quadrature grid M; 0 = 4N");
  add("problem", "h3_ceiling", VT::Double, "1000", "blow-up guard in H^3");

  add("run", "seed", VT::Int, "20240601", "random seed");
  add("run", "out", VT::String, "out", "output directory");

  add("eigs", "orth_tol", VT::Double, "1e-10", "orthonormality tolerance");
  add("eigs", "residual_tol", VT::Double, "1e-08", "eigen-residual tolerance");

  add("saturation", "start", VT::String, "q", "level 0: q = span{Q_j phi}, phi12 = span{phi_1, phi_2}");
  add("saturation", "j_max", VT::Int, "40", "maximum ladder levels");
  add("saturation", "tol", VT::Double, "1e-08", "relative rank tolerance");

  add("kappa_sweep", "k_max", VT::Int, "3", "eigenvalue tracks");
  add("kappa_sweep", "kappa_lo", VT::Double, "-30", "lower end of the sweep");
  add("kappa_sweep", "kappa_hi", VT::Double, "0", "upper end of the sweep");
  add("kappa_sweep", "samples", VT::Int, "121", "uniform kappa samples");
  add("kappa_sweep", "N", VT::Int, "32", "modes for the sweep");
  add("kappa_sweep", "fd_step", VT::Double, "0.0001", "centred-difference step");
  add("kappa_sweep", "bisect_tol", VT::Double, "1e-10", "bisection width");

  add("mu_check", "mu", VT::String, "x_sq", "profile mu");
  add("mu_check", "K", VT::Int, "8", "modes checked; at most N/2");
  add("mu_check", "zero_tol", VT::Double, "1e-12", "coefficients below this count as zero");

  add("moment_demo", "mu", VT::String, "x_sq", "profile carrying the scalar control");
  add("moment_demo", "K", VT::Int, "8", "modes in the random target");
  add("moment_demo", "m_ctrl", VT::Int, "128", "control intervals");
  add("moment_demo", "ridge", VT::Double, "0", "Tikhonov parameter");
  add("moment_demo", "target_h3", VT::Double, "0.001", "H^3 size of the random target");
  add("moment_demo", "tol", VT::Double, "1e-06", "relative H^3 terminal tolerance");

  add("linctrl", "basis_size", VT::Int, "64", "bins per channel");
  add("linctrl", "target_h3", VT::Double, "0.001", "H^3 size of the random tangent target");
  add("linctrl", "residual_tol", VT::Double, "1e-06", "relative residual tolerance");
  add("linctrl", "warm_start_mu", VT::String, "", "profile for the W-free warm start; empty = none");

  add("steer", "tol", VT::Double, "1e-08", "H^3 terminal tolerance");
  add("steer", "max_iter", VT::Int, "6", "Newton iterations");
  add("steer", "bins", VT::Int, "64", "control bins per channel");
  add("steer", "delta", VT::Double, "0.01", "advisory H^3 radius around phi");
  add("steer", "radius", VT::Double, "0.001", "H^3 distance of the random endpoints from phi");
  add("steer", "two_leg", VT::Bool, "false", "also run the two-leg construction");
  add("steer", "psi0", VT::String, "", "modal file for psi0; empty = random");
  add("steer", "psi1", VT::String, "", "modal file for psi1; empty = random");
}

const ConfigEntry& Config::entry(const std::string& dotted) const {
  const auto dot = dotted.find('.');
  if (dot == std::string::npos) throw Error(ErrorCode::ConfigError, "key '" + dotted + "' needs a section");
  auto s = sections_.find(dotted.substr(0, dot));
  if (s == sections_.end()) throw Error(ErrorCode::ConfigError, "unknown section in '" + dotted + "'");
  auto k = s->second.find(dotted.substr(dot + 1));
  if (k == s->second.end()) throw Error(ErrorCode::ConfigError, "unknown key '" + dotted + "'");
  return k->second;
}

bool Config::has(const std::string& dotted) const {
  try {
    entry(dotted);
    return true;
  } catch (const Error&) {
    return false;
  }
}

void Config::set(const std::string& dotted, const std::string& value) {
  entry(dotted);  // validates the key
  const auto dot = dotted.find('.');
  ConfigEntry& e = sections_[dotted.substr(0, dot)][dotted.substr(dot + 1)];
  e.value = canonical(e.type, value, dotted);
}

void Config::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ConfigError, "cannot open config '" + path + "'");
  load(in, path);
}

void Config::load(std::istream& is, const std::string& origin) {
  pt::ptree tree;
  try {
    pt::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    throw Error(ErrorCode::ConfigError, origin + ": " + e.message() + " (line " + std::to_string(e.line()) + ")");
  }
  for (const auto& [sec, body] : tree) {
    if (body.empty() && !body.data().empty())
      throw Error(ErrorCode::ConfigError, origin + ": key '" + sec + "' outside a section");
    if (!sections_.count(sec)) throw Error(ErrorCode::ConfigError, origin + ": unknown section [" + sec + "]");
    for (const auto& [key, val] : body) set(sec + "." + key, val.data());
  }
}

long Config::get_int(const std::string& dotted) const {
  const auto& e = entry(dotted);
  if (e.type != ValueType::Int) throw Error(ErrorCode::ConfigError, "key '" + dotted + "' is not an int");
  return std::stol(e.value);
}

double Config::get_double(const std::string& dotted) const {
  const auto& e = entry(dotted);
  if (e.type != ValueType::Double) throw Error(ErrorCode::ConfigError, "key '" + dotted + "' is not a float");
  return std::stod(e.value);
}

const std::string& Config::get_string(const std::string& dotted) const { return entry(dotted).value; }

bool Config::get_bool(const std::string& dotted) const {
  const auto& e = entry(dotted);
  if (e.type != ValueType::Bool) throw Error(ErrorCode::ConfigError, "key '" + dotted + "' is not a bool");
  return e.value == "true";
}

std::uint64_t Config::seed() const { return static_cast<std::uint64_t>(get_int("run.seed")); }

void Config::dump(std::ostream& os, bool with_help) const {
  bool first = true;
  for (const auto& [sec, keys] : sections_) {
    if (!first) os << '\n';
    first = false;
    os << '[' << sec << "]\n";
    for (const auto& [key, e] : keys) {
      if (with_help) os << "; " << e.help << " (" << type_name(e.type) << ")\n";
      os << key << " = " << e.value << '\n';
    }
  }
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

Profile resolve_profile(const std::string& spec) {
  if (spec == "auto") return Profile();
  if (spec.rfind("file:", 0) == 0) {
    const std::string path = spec.substr(5);
    SampledField f;
    try {
      f = textio::load_real_grid(path);
    } catch (const Error& e) {
      throw Error(ErrorCode::ConfigError, "profile file '" + path + "': " + e.what());
    }
    return Profile::from_samples(f, spec);
  }
  return profiles::builtin(spec);
}

ProblemSetup problem_setup(const Config& cfg) {
  ProblemSetup s;
  s.V = resolve_profile(cfg.get_string("problem.V"));
  const std::string w = cfg.get_string("problem.W");
  s.W = resolve_profile(w);
  s.Q.clear();
  for (const auto& name : split_list(cfg.get_string("problem.Q"))) s.Q.push_back(resolve_profile(name));
  s.kappa = cfg.get_double("problem.kappa");
  s.p = static_cast<int>(cfg.get_int("problem.p"));
  s.T = cfg.get_double("problem.T");
  s.N = static_cast<int>(cfg.get_int("problem.N"));
  s.steps = static_cast<int>(cfg.get_int("problem.steps"));
  s.grid = static_cast<int>(cfg.get_int("problem.grid"));
  s.h3_ceiling = cfg.get_double("problem.h3_ceiling");
  if (s.N < 1 || s.steps < 1 || s.p < 1 || !(s.T > 0.0))
    throw Error(ErrorCode::ConfigError, "problem block needs N, steps, p >= 1 and T > 0");
  return s;
}

}  // namespace nlsctl
