#include "dampedwave/config.hpp"

#include "dampedwave/errors.hpp"
#include "dampedwave/fit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <sstream>

namespace dampedwave {

namespace {

std::string trim(const std::string& s)
{
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos)
    return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

/// key -> value pairs; malformed lines are collected as errors.
std::vector<std::pair<std::string, std::string>> parse_pairs(const std::string& text,
                                                             std::vector<std::string>& errors)
{
  std::vector<std::pair<std::string, std::string>> out;
  std::istringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos)
      line.erase(hash);
    line = trim(line);
    if (line.empty())
      continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      errors.push_back("line " + std::to_string(number) + ": expected key = value");
      continue;
    }
    out.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return out;
}

double to_double(const std::string& key, const std::string& value, std::vector<std::string>& errors)
{
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used == value.size())
      return v;
  } catch (const std::exception&) {
  }
  errors.push_back(key + ": '" + value + "' is not a number");
  return std::numeric_limits<double>::quiet_NaN();
}

std::vector<std::string> split_list(const std::string& value)
{
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(value);
  while (std::getline(in, item, ','))
    if (!trim(item).empty())
      out.push_back(trim(item));
  return out;
}

std::string read_file(const std::string& path)
{
  std::ifstream in(path);
  if (!in)
    throw ConfigError("cannot open '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

std::string join_list(const auto& values)
{
  std::ostringstream out;
  out << std::setprecision(17);
  for (std::size_t i = 0; i < values.size(); ++i)
    out << (i ? "," : "") << values[i];
  return out.str();
}

} // namespace

std::vector<std::string> RunConfig::violations() const
{
  auto out = DampingProfile::violations(beta, a, sigma, b);
  if (!(delta > 0.0))
    out.emplace_back("delta must be > 0");
  else if (!(a + sigma < b - 2.0 * delta))
    out.emplace_back("cutoff requires a + sigma < b - 2 delta");
  if (!longitudinal_index_valid(l, bc))
    out.emplace_back(bc == BoundaryCondition::Dirichlet
                         ? "Dirichlet branch requires a nonzero integer l"
                         : "Neumann branch requires a half-integer l");
  for (long m : m_list)
    if (m < 1)
      out.emplace_back("m_list entries must be >= 1, got " + std::to_string(m));
  if (m_list.empty()) {
    if (!(h_min > 0.0 && h_min < h_max))
      out.emplace_back("h range requires 0 < h_min < h_max");
    if (!(h_min < quasimode_h_max))
      out.emplace_back("quasimode range requires h_min < quasimode_h_max");
    if (h_count < 2)
      out.emplace_back("h_count must be >= 2");
  }
  for (const auto& v : DampingProfile::violations(beta, a, tail_sigma, tail_b))
    out.push_back("tail strip: " + v);
  if (!(tail_delta > 0.0 && a + tail_sigma < tail_b - 2.0 * tail_delta))
    out.emplace_back("tail strip: cutoff requires a + tail_sigma < tail_b - 2 tail_delta");
  if (tail_count < 3)
    out.emplace_back("tail_count must be >= 3");
  if (!(tail_h_fraction > 0.0 && tail_h_fraction <= 1.0))
    out.emplace_back("tail_h_fraction must lie in (0, 1]");
  if (!(cap_spacing > 0.0))
    out.emplace_back("cap_spacing must be > 0");
  if (cap_length != 0.0 && !(cap_length > 0.0))
    out.emplace_back("cap_length must be > 0 (or 0 for the default)");
  if (!(newton_tol > 0.0) || !(glue_tol > 0.0))
    out.emplace_back("tolerances must be > 0");
  for (const auto& v : DampingProfile::violations(beta, resolvent_a, resolvent_sigma, resolvent_b))
    out.push_back("resolvent strip: " + v);
  if (grid < 20)
    out.emplace_back("grid must be >= 20");
  if (!(q_min > 0.0 && q_min < q_max))
    out.emplace_back("q range requires 0 < q_min < q_max");
  if (q_count < 3)
    out.emplace_back("q_count must be >= 3");
  for (double h : evolve_h)
    if (!(h > 0.0))
      out.emplace_back("evolve_h entries must be > 0");
  if (!(evolve_qdt > 0.0) || !(evolve_efolds > 0.0))
    out.emplace_back("evolve_qdt and evolve_efolds must be > 0");
  return out;
}

void RunConfig::validate() const
{
  const auto bad = violations();
  if (bad.empty())
    return;
  std::ostringstream msg;
  msg << "invalid configuration (" << bad.size() << " problem" << (bad.size() > 1 ? "s" : "")
      << "):";
  for (const auto& v : bad)
    msg << "\n  - " << v;
  throw ConfigError(msg.str());
}

DampingProfile RunConfig::profile() const { return DampingProfile(beta, a, sigma, b, join); }

DampingProfile RunConfig::resolvent_profile() const
{
  return DampingProfile(beta, resolvent_a, resolvent_sigma, resolvent_b, join);
}

Cutoff RunConfig::cutoff() const { return Cutoff(profile(), delta); }

DampingProfile RunConfig::tail_profile() const
{
  return DampingProfile(beta, a, tail_sigma, tail_b, join);
}

Cutoff RunConfig::tail_cutoff() const { return Cutoff(tail_profile(), tail_delta); }

std::vector<double> RunConfig::h_values() const
{
  std::vector<double> out;
  if (!m_list.empty()) {
    for (long m : m_list)
      out.push_back(select_h(m, b));
    return out;
  }
  for (double h : log_space(h_min, h_max, h_count)) {
    const long m = std::max(1L, std::lround(b / (2.0 * std::numbers::pi * h * h)));
    out.push_back(select_h(m, b));
  }
  return out;
}

std::vector<double> RunConfig::quasimode_h_values() const
{
  if (!m_list.empty())
    return h_values();
  RunConfig narrow = *this;
  narrow.h_max = quasimode_h_max;
  return narrow.h_values();
}

std::string RunConfig::canonical() const
{
  std::ostringstream out;
  out << std::setprecision(17);
  out << "beta = " << beta << '\n'
      << "a = " << a << '\n'
      << "sigma = " << sigma << '\n'
      << "b = " << b << '\n'
      << "delta = " << delta << '\n'
      << "join = " << to_string(join) << '\n'
      << "bc = " << to_string(bc) << '\n'
      << "l = " << l << '\n'
      << "m_list = " << join_list(m_list) << '\n'
      << "h_min = " << h_min << '\n'
      << "h_max = " << h_max << '\n'
      << "h_count = " << h_count << '\n'
      << "quasimode_h_max = " << quasimode_h_max << '\n'
      << "tail_sigma = " << tail_sigma << '\n'
      << "tail_b = " << tail_b << '\n'
      << "tail_delta = " << tail_delta << '\n'
      << "tail_count = " << tail_count << '\n'
      << "tail_h_fraction = " << tail_h_fraction << '\n'
      << "cap_length = " << cap_length << '\n'
      << "cap_spacing = " << cap_spacing << '\n'
      << "newton_tol = " << newton_tol << '\n'
      << "glue_tol = " << glue_tol << '\n'
      << "resolvent_a = " << resolvent_a << '\n'
      << "resolvent_sigma = " << resolvent_sigma << '\n'
      << "resolvent_b = " << resolvent_b << '\n'
      << "grid = " << grid << '\n'
      << "q_min = " << q_min << '\n'
      << "q_max = " << q_max << '\n'
      << "q_count = " << q_count << '\n'
      << "evolve_h = " << join_list(evolve_h) << '\n'
      << "evolve_qdt = " << evolve_qdt << '\n'
      << "evolve_efolds = " << evolve_efolds << '\n';
  return out.str();
}

RunConfig default_config(double beta)
{
  RunConfig c;
  c.beta = beta;
  if (beta < 0.5) {
    c.q_min = 25.0;
    c.q_max = 1000.0;
    c.evolve_h = {0.12, 0.09};
  } else if (beta < 1.5) {
    c.evolve_h = {0.08, 0.06};
  } else {
    c.evolve_h = {0.035, 0.03};
    c.tail_h_fraction = 0.25;
  }
  return c;
}

RunConfig parse_config(const std::string& text, RunConfig base)
{
  std::vector<std::string> errors;
  RunConfig c = std::move(base);
  for (const auto& [key, value] : parse_pairs(text, errors)) {
    auto number = [&] { return to_double(key, value, errors); };
    auto count = [&]() -> std::size_t {
      const double v = number();
      if (!(v >= 0.0) || v != std::floor(v)) {
        errors.push_back(key + ": expected a non-negative integer");
        return 0;
      }
      return static_cast<std::size_t>(v);
    };
    if (key == "beta")
      c.beta = number();
    else if (key == "a")
      c.a = number();
    else if (key == "sigma")
      c.sigma = number();
    else if (key == "b")
      c.b = number();
    else if (key == "delta")
      c.delta = number();
    else if (key == "join") {
      if (value == "constant")
        c.join = Join::ConstantLevel;
      else if (value == "smooth")
        c.join = Join::SmoothBlend;
      else
        errors.push_back("join: expected 'constant' or 'smooth'");
    } else if (key == "bc") {
      if (value == "dirichlet")
        c.bc = BoundaryCondition::Dirichlet;
      else if (value == "neumann")
        c.bc = BoundaryCondition::Neumann;
      else
        errors.push_back("bc: expected 'dirichlet' or 'neumann'");
    } else if (key == "l")
      c.l = number();
    else if (key == "m_list") {
      c.m_list.clear();
      for (const auto& item : split_list(value)) {
        const double v = to_double(key, item, errors);
        if (v == std::floor(v))
          c.m_list.push_back(static_cast<long>(v));
        else
          errors.push_back("m_list: '" + item + "' is not an integer");
      }
    } else if (key == "h_min")
      c.h_min = number();
    else if (key == "h_max")
      c.h_max = number();
    else if (key == "quasimode_h_max")
      c.quasimode_h_max = number();
    else if (key == "h_count")
      c.h_count = count();
    else if (key == "tail_sigma")
      c.tail_sigma = number();
    else if (key == "tail_b")
      c.tail_b = number();
    else if (key == "tail_delta")
      c.tail_delta = number();
    else if (key == "tail_count")
      c.tail_count = count();
    else if (key == "tail_h_fraction")
      c.tail_h_fraction = number();
    else if (key == "cap_length")
      c.cap_length = number();
    else if (key == "cap_spacing")
      c.cap_spacing = number();
    else if (key == "newton_tol")
      c.newton_tol = number();
    else if (key == "glue_tol")
      c.glue_tol = number();
    else if (key == "resolvent_a")
      c.resolvent_a = number();
    else if (key == "resolvent_sigma")
      c.resolvent_sigma = number();
    else if (key == "resolvent_b")
      c.resolvent_b = number();
    else if (key == "grid")
      c.grid = count();
    else if (key == "q_min")
      c.q_min = number();
    else if (key == "q_max")
      c.q_max = number();
    else if (key == "q_count")
      c.q_count = count();
    else if (key == "evolve_h") {
      c.evolve_h.clear();
      for (const auto& item : split_list(value))
        c.evolve_h.push_back(to_double(key, item, errors));
    } else if (key == "evolve_qdt")
      c.evolve_qdt = number();
    else if (key == "evolve_efolds")
      c.evolve_efolds = number();
    else
      errors.push_back("unknown key '" + key + "'");
  }
  if (!errors.empty()) {
    std::ostringstream msg;
    msg << "cannot parse configuration:";
    for (const auto& e : errors)
      msg << "\n  - " << e;
    throw ConfigError(msg.str());
  }
  return c;
}

RunConfig load_config(const std::string& path, RunConfig base)
{
  return parse_config(read_file(path), std::move(base));
}

std::map<std::string, double> Tolerances::as_map() const
{
  return {{"cap_oracle", cap_oracle},
          {"cap_runtime", cap_runtime},
          {"neumann_beta2", neumann_beta2},
          {"neumann_beta1", neumann_beta1},
          {"eigen_exponent", eigen_exponent},
          {"eigen_runtime", eigen_runtime},
          {"residual_slope", residual_slope},
          {"imq_slope", imq_slope},
          {"resolvent_band", resolvent_band},
          {"resolvent_runtime", resolvent_runtime},
          {"decay_rate", decay_rate},
          {"energy_conservation", energy_conservation},
          {"gcc_r2", gcc_r2},
          {"cross_validation", cross_validation}};
}

Tolerances parse_tolerances(const std::string& text, Tolerances base)
{
  std::vector<std::string> errors;
  Tolerances t = base;
  std::map<std::string, double*> fields{{"cap_oracle", &t.cap_oracle},
                                        {"cap_runtime", &t.cap_runtime},
                                        {"neumann_beta2", &t.neumann_beta2},
                                        {"neumann_beta1", &t.neumann_beta1},
                                        {"eigen_exponent", &t.eigen_exponent},
                                        {"eigen_runtime", &t.eigen_runtime},
                                        {"residual_slope", &t.residual_slope},
                                        {"imq_slope", &t.imq_slope},
                                        {"resolvent_band", &t.resolvent_band},
                                        {"resolvent_runtime", &t.resolvent_runtime},
                                        {"decay_rate", &t.decay_rate},
                                        {"energy_conservation", &t.energy_conservation},
                                        {"gcc_r2", &t.gcc_r2},
                                        {"cross_validation", &t.cross_validation}};
  for (const auto& [key, value] : parse_pairs(text, errors)) {
    const auto it = fields.find(key);
    if (it == fields.end()) {
      errors.push_back("unknown tolerance '" + key + "'");
      continue;
    }
    const double v = to_double(key, value, errors);
    if (!(v > 0.0))
      errors.push_back(key + ": tolerance must be > 0");
    else
      *it->second = v;
  }
  if (!errors.empty()) {
    std::ostringstream msg;
    msg << "cannot parse tolerance file:";
    for (const auto& e : errors)
      msg << "\n  - " << e;
    throw ConfigError(msg.str());
  }
  return t;
}

Tolerances load_tolerances(const std::string& path, Tolerances base)
{
  return parse_tolerances(read_file(path), base);
}

std::string fnv1a_hex(const std::string& text)
{
  std::uint64_t hash = 14695981039346656037ULL;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 1099511628211ULL;
  }
  std::ostringstream out;
  out << std::hex << std::setw(16) << std::setfill('0') << hash;
  return out.str();
}

} // namespace dampedwave
