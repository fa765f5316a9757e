#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

namespace crn {

/// How an active primary user occupies spectrum.
enum class PuChannelModel {
  PerChannel,     // busy on each channel independently with pu_active_prob
  SingleChannel,  // busy on exactly one uniformly drawn channel
};

/// Multiplier on the size penalty in the centralized score.
enum class PenaltyScale {
  NetworkSize,  // N * p(|C|), the literal expansion of the objective
  ClusterSize,  // |C| * p(|C|)
};

/// When an SOC join or merge is taken in its refinement rounds.
enum class SocAcceptance {
  OwnCluster,  // the result beats the mover's current cluster
  Welfare,     // the summed metric of the affected clusters strictly grows
  Consent,     // the result beats every cluster it absorbs or replaces
};

class ConfigError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ScenarioConfig {
  std::size_t n_cr = 20;
  std::size_t n_pu = 10;
  std::size_t num_channels = 10;
  double pu_active_prob = 0.5;
  PuChannelModel pu_channel_model = PuChannelModel::PerChannel;
  double area_side = 1.0;
  double cr_range = 1.0 / 3.0;
  double pu_range = 1.0 / 3.0;
  std::size_t delta = 3;
  std::size_t delta1 = 1;
  std::optional<std::size_t> delta2;  // unset means N
  double t_factor = 1.3;
  double rho1 = 0.4;
  double rho2 = 0.6;
  PenaltyScale penalty_scale = PenaltyScale::NetworkSize;
  SocAcceptance soc_rule = SocAcceptance::Consent;
  std::uint64_t seed = 1;

  std::size_t effective_delta2() const { return delta2.value_or(n_cr); }

  void validate() const {
    if (n_cr == 0) throw ConfigError("n_cr must be positive");
    if (!(area_side > 0.0)) throw ConfigError("area_side must be positive");
    if (!(cr_range > 0.0) || !(pu_range > 0.0)) throw ConfigError("ranges must be positive");
    if (!(pu_active_prob >= 0.0 && pu_active_prob <= 1.0))
      throw ConfigError("pu_active_prob must lie in [0, 1]");
    if (!(t_factor > 1.0)) throw ConfigError("t_factor must exceed 1");
    if (num_channels == 0 || num_channels > 128) throw ConfigError("num_channels must lie in [1, 128]");
    if (delta == 0 || delta1 == 0) throw ConfigError("delta and delta1 must be positive");
    if (!(delta1 <= delta && delta <= effective_delta2()))
      throw ConfigError("delta window must satisfy delta1 <= delta <= delta2");
    if (rho1 < 0.0 || rho2 < rho1) throw ConfigError("penalties must satisfy 0 <= rho1 <= rho2");
  }
};

inline const std::vector<std::string_view>& config_keys() {
  static const std::vector<std::string_view> keys = {
      "n_cr",     "n_pu",   "num_channels", "pu_active_prob", "pu_channel_model", "area_side",
      "cr_range", "pu_range", "delta",      "delta1",         "delta2",           "t_factor",
      "rho1",     "rho2",   "penalty_scale", "soc_rule", "seed"};
  return keys;
}

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

template <class T>
T parse_number(const std::string& key, const std::string& value) {
  std::istringstream in(value);
  T out{};
  in >> out;
  if (in.fail() || !in.eof()) throw ConfigError("bad value for " + key + ": '" + value + "'");
  if constexpr (std::is_unsigned_v<T>)
    if (!value.empty() && value.front() == '-') throw ConfigError(key + " must be non-negative");
  return out;
}

}  // namespace detail

/// Sets one key from its text form. Unknown keys are rejected.
inline void set_config_key(ScenarioConfig& c, const std::string& key, const std::string& raw) {
  using detail::parse_number;
  const std::string v = detail::trim(raw);
  if (key == "n_cr") c.n_cr = parse_number<std::size_t>(key, v);
  else if (key == "n_pu") c.n_pu = parse_number<std::size_t>(key, v);
  else if (key == "num_channels") c.num_channels = parse_number<std::size_t>(key, v);
  else if (key == "pu_active_prob") c.pu_active_prob = parse_number<double>(key, v);
  else if (key == "pu_channel_model") {
    if (v == "per_channel") c.pu_channel_model = PuChannelModel::PerChannel;
    else if (v == "single_channel") c.pu_channel_model = PuChannelModel::SingleChannel;
    else throw ConfigError("pu_channel_model must be per_channel or single_channel");
  } else if (key == "area_side") c.area_side = parse_number<double>(key, v);
  else if (key == "cr_range") c.cr_range = parse_number<double>(key, v);
  else if (key == "pu_range") c.pu_range = parse_number<double>(key, v);
  else if (key == "delta") c.delta = parse_number<std::size_t>(key, v);
  else if (key == "delta1") c.delta1 = parse_number<std::size_t>(key, v);
  else if (key == "delta2") {
    if (v == "N" || v == "n") c.delta2.reset();
    else c.delta2 = parse_number<std::size_t>(key, v);
  } else if (key == "t_factor") c.t_factor = parse_number<double>(key, v);
  else if (key == "rho1") c.rho1 = parse_number<double>(key, v);
  else if (key == "rho2") c.rho2 = parse_number<double>(key, v);
  else if (key == "penalty_scale") {
    if (v == "N") c.penalty_scale = PenaltyScale::NetworkSize;
    else if (v == "|C|" || v == "C") c.penalty_scale = PenaltyScale::ClusterSize;
    else throw ConfigError("penalty_scale must be N or |C|");
  } else if (key == "soc_rule") {
    if (v == "consent") c.soc_rule = SocAcceptance::Consent;
    else if (v == "own") c.soc_rule = SocAcceptance::OwnCluster;
    else if (v == "welfare") c.soc_rule = SocAcceptance::Welfare;
    else throw ConfigError("soc_rule must be consent, own or welfare");
  } else if (key == "seed") c.seed = parse_number<std::uint64_t>(key, v);
  else throw ConfigError("unknown config key '" + key + "'");
}

/// Line-oriented `key = value`; `#` starts a comment.
inline ScenarioConfig parse_config(std::istream& in, ScenarioConfig base = {}) {
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    const auto body = detail::trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    const auto key = detail::trim(std::string_view(body).substr(0, eq));
    try {
      set_config_key(base, key, body.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return base;
}

inline ScenarioConfig load_config(const std::string& path, ScenarioConfig base = {}) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  return parse_config(in, base);
}

inline std::string to_config_text(const ScenarioConfig& c) {
  std::ostringstream out;
  out.precision(17);
  out << "n_cr = " << c.n_cr << "\n"
      << "n_pu = " << c.n_pu << "\n"
      << "num_channels = " << c.num_channels << "\n"
      << "pu_active_prob = " << c.pu_active_prob << "\n"
      << "pu_channel_model = "
      << (c.pu_channel_model == PuChannelModel::PerChannel ? "per_channel" : "single_channel") << "\n"
      << "area_side = " << c.area_side << "\n"
      << "cr_range = " << c.cr_range << "\n"
      << "pu_range = " << c.pu_range << "\n"
      << "delta = " << c.delta << "\n"
      << "delta1 = " << c.delta1 << "\n"
      << "delta2 = " << (c.delta2 ? std::to_string(*c.delta2) : std::string("N")) << "\n"
      << "t_factor = " << c.t_factor << "\n"
      << "rho1 = " << c.rho1 << "\n"
      << "rho2 = " << c.rho2 << "\n"
      << "penalty_scale = " << (c.penalty_scale == PenaltyScale::NetworkSize ? "N" : "|C|") << "\n"
      << "soc_rule = "
      << (c.soc_rule == SocAcceptance::Consent ? "consent" : c.soc_rule == SocAcceptance::Welfare ? "welfare" : "own")
      << "\n"
      << "seed = " << c.seed << "\n";
  return out.str();
}

/// Small-network comparison setup: 20 CRs, 10 PUs, both ranges A/3, delta 3.
inline ScenarioConfig small_network_preset() {
  ScenarioConfig c;
  c.n_cr = 20;
  c.n_pu = 10;
  c.area_side = 1.0;
  c.cr_range = 1.0 / 3.0;
  c.pu_range = 1.0 / 3.0;
  c.pu_channel_model = PuChannelModel::SingleChannel;
  c.delta = 3;
  c.rho1 = 0.4;
  c.rho2 = 0.6;
  return c;
}

/// Larger-network setup: CR range A/5, PU range 2A/5, 30 PUs. The desired
/// size is tabulated for 100/200/300 nodes; other sizes use
/// 60% of the expected neighbour count.
inline ScenarioConfig large_network_preset(std::size_t n_cr) {
  ScenarioConfig c;
  c.n_cr = n_cr;
  c.n_pu = 30;
  c.area_side = 1.0;
  c.cr_range = 0.2;
  c.pu_range = 0.4;
  c.pu_channel_model = PuChannelModel::SingleChannel;
  switch (n_cr) {
    case 100: c.delta = 6; break;
    case 200: c.delta = 12; break;
    case 300: c.delta = 20; break;
    default: {
      const double neighbours = 0.095 * static_cast<double>(n_cr);
      c.delta = std::max<std::size_t>(2, static_cast<std::size_t>(0.6 * neighbours + 0.5));
    }
  }
  return c;
}

}  // namespace crn
