#pragma once

// Scenario configuration: an INI file with the sections [physical],
// [controller], [trigger], [initial], [scheme], [scenario] and [output].
// Unknown sections and keys are rejected. Comments start with ';'.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "stefan/control.hpp"
#include "stefan/errors.hpp"
#include "stefan/params.hpp"

namespace stefan {

/// Initial profile T - Tm on [0, s0], written as "kind:argument".
///   linear:a     a (1 - x/s0)
///   quadratic:a  a (1 - (x/s0)^2)
///   cosine:a     a cos(pi x/(2 s0))
///   samples:v0,v1,...,vN  values at x = i s0/N, linearly interpolated
struct ProfileSpec {
  enum class Kind { linear, quadratic, cosine, samples };
  Kind kind{Kind::linear};
  double amplitude{1.0};
  std::vector<double> samples;

  std::function<double(double)> to_function(double s0, double Tm) const {
    switch (kind) {
      case Kind::linear: return [=, a = amplitude](double x) { return Tm + a * (1.0 - x / s0); };
      case Kind::quadratic:
        return [=, a = amplitude](double x) { return Tm + a * (1.0 - (x / s0) * (x / s0)); };
      case Kind::cosine:
        return [=, a = amplitude](double x) { return Tm + a * std::cos(std::numbers::pi * x / (2.0 * s0)); };
      case Kind::samples:
        return [=, v = samples](double x) {
          const double pos = std::clamp(x / s0, 0.0, 1.0) * static_cast<double>(v.size() - 1);
          const auto i = std::min(static_cast<std::size_t>(pos), v.size() - 2);
          const double w = pos - static_cast<double>(i);
          return Tm + (1.0 - w) * v[i] + w * v[i + 1];
        };
    }
    return {};
  }
};

inline std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string to_string(const ProfileSpec& p) {
  switch (p.kind) {
    case ProfileSpec::Kind::linear: return "linear:" + format_number(p.amplitude);
    case ProfileSpec::Kind::quadratic: return "quadratic:" + format_number(p.amplitude);
    case ProfileSpec::Kind::cosine: return "cosine:" + format_number(p.amplitude);
    case ProfileSpec::Kind::samples: {
      std::string out = "samples:";
      for (std::size_t i = 0; i < p.samples.size(); ++i) out += (i ? "," : "") + format_number(p.samples[i]);
      return out;
    }
  }
  return {};
}

namespace detail {

inline double parse_number(const std::string& text, const std::string& key) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw ConfigError(key + ": not a number: '" + text + "'");
  }
  while (used < text.size() && std::isspace(static_cast<unsigned char>(text[used]))) ++used;
  if (used != text.size() || !std::isfinite(v)) throw ConfigError(key + ": not a finite number: '" + text + "'");
  return v;
}

}  // namespace detail

inline ProfileSpec parse_profile(const std::string& text, const std::string& key) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw ConfigError(key + ": expected kind:argument, got '" + text + "'");
  const std::string kind = text.substr(0, colon);
  const std::string arg = text.substr(colon + 1);
  ProfileSpec p;
  if (kind == "samples") {
    p.kind = ProfileSpec::Kind::samples;
    std::stringstream ss(arg);
    std::string item;
    while (std::getline(ss, item, ',')) p.samples.push_back(detail::parse_number(item, key));
    if (p.samples.size() < 2) throw ConfigError(key + ": samples needs at least two values");
    return p;
  }
  if (kind == "linear") p.kind = ProfileSpec::Kind::linear;
  else if (kind == "quadratic") p.kind = ProfileSpec::Kind::quadratic;
  else if (kind == "cosine") p.kind = ProfileSpec::Kind::cosine;
  else throw ConfigError(key + ": unknown profile kind '" + kind + "'");
  p.amplitude = detail::parse_number(arg, key);
  return p;
}

struct InitialSpec {
  double s0{};
  ProfileSpec T0;
  ProfileSpec T0_hat;
  std::optional<double> H, H_hat_l, H_hat_u;
};

struct SchemeConfig {
  int nodes{61};
  double dt{0.5};
  double horizon{};
  int log_stride{10};
};

struct ScenarioSettings {
  ControlMode kind{ControlMode::event_triggered};
  double sampling_period{3000.0};
  bool unsafe{false};
  unsigned long seed{0};
};

struct OutputSettings {
  std::string directory{"out"};
  bool plot_script{false};
};

struct ScenarioConfig {
  MaterialConstants physical;
  ControllerConfig controller;
  TriggerConfig trigger;
  InitialSpec initial;
  SchemeConfig scheme;
  ScenarioSettings scenario;
  OutputSettings output;

  InitialData initial_data(const PhysicalParams& phys) const {
    return {initial.s0, initial.T0.to_function(initial.s0, phys.Tm), initial.T0_hat.to_function(initial.s0, phys.Tm),
            initial.H, initial.H_hat_l, initial.H_hat_u};
  }
};

/// Default horizon: time for the default event-triggered run to bring |s - s_r| below 0.02 cm, plus 20%.
inline constexpr double kDefaultHorizon = 14320.0;

/// The paraffin experiment, converted to cm-s-degC-J.
inline ScenarioConfig default_config() {
  ScenarioConfig c;
  c.physical = {0.0022, 7.9e-4, 2380.0, 2.1e5, 3.0, 37.0};
  c.controller = {3e-4, 0.1, 0.1, 2.0};
  c.trigger = {1.325e-2, 1e3, 0.5, 1e-8, 4.42e-3, std::nullopt};
  c.initial.s0 = 0.1;
  c.initial.T0 = {ProfileSpec::Kind::linear, 1.0, {}};
  c.initial.T0_hat = {ProfileSpec::Kind::linear, 10.0, {}};
  c.scheme = {61, 0.5, kDefaultHorizon, 10};
  return c;
}

inline ControlMode parse_mode(const std::string& s) {
  if (s == "event_triggered") return ControlMode::event_triggered;
  if (s == "continuous") return ControlMode::continuous;
  if (s == "sampled_data") return ControlMode::sampled_data;
  throw ConfigError("scenario.kind: expected event_triggered, continuous or sampled_data, got '" + s + "'");
}

inline boost::property_tree::ptree to_ptree(const ScenarioConfig& c) {
  boost::property_tree::ptree t;
  auto num = [&](const std::string& key, double v) { t.put(key, format_number(v)); };
  num("physical.k", c.physical.k);
  num("physical.rho", c.physical.rho);
  num("physical.cp", c.physical.cp);
  num("physical.latent_heat", c.physical.latent_heat);
  num("physical.length", c.physical.length);
  num("physical.melting_temperature", c.physical.melting_temperature);
  num("controller.c", c.controller.c);
  num("controller.lambda", c.controller.lambda);
  num("controller.epsilon", c.controller.epsilon);
  num("controller.setpoint", c.controller.s_r);
  num("trigger.eta", c.trigger.eta);
  num("trigger.gamma", c.trigger.gamma);
  num("trigger.delta", c.trigger.delta);
  num("trigger.m0", c.trigger.m0);
  num("trigger.A", c.trigger.A);
  if (c.trigger.b_star) num("trigger.b_star", *c.trigger.b_star);
  num("initial.s0", c.initial.s0);
  t.put("initial.T0", to_string(c.initial.T0));
  t.put("initial.T0_hat", to_string(c.initial.T0_hat));
  if (c.initial.H) num("initial.H", *c.initial.H);
  if (c.initial.H_hat_l) num("initial.H_hat_l", *c.initial.H_hat_l);
  if (c.initial.H_hat_u) num("initial.H_hat_u", *c.initial.H_hat_u);
  t.put("scheme.nodes", c.scheme.nodes);
  num("scheme.dt", c.scheme.dt);
  num("scheme.horizon", c.scheme.horizon);
  t.put("scheme.log_stride", c.scheme.log_stride);
  t.put("scenario.kind", to_string(c.scenario.kind));
  num("scenario.sampling_period", c.scenario.sampling_period);
  t.put("scenario.unsafe", c.scenario.unsafe ? "true" : "false");
  t.put("scenario.seed", c.scenario.seed);
  t.put("output.directory", c.output.directory);
  t.put("output.plot_script", c.output.plot_script ? "true" : "false");
  return t;
}

inline std::string serialize(const ScenarioConfig& c) {
  std::ostringstream os;
  boost::property_tree::write_ini(os, to_ptree(c));
  return os.str();
}

namespace detail {

inline const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s = {
      {"physical", {"k", "rho", "cp", "latent_heat", "length", "melting_temperature"}},
      {"controller", {"c", "lambda", "epsilon", "setpoint"}},
      {"trigger", {"eta", "gamma", "delta", "m0", "A", "b_star"}},
      {"initial", {"s0", "T0", "T0_hat", "H", "H_hat_l", "H_hat_u"}},
      {"scheme", {"nodes", "dt", "horizon", "log_stride"}},
      {"scenario", {"kind", "sampling_period", "unsafe", "seed"}},
      {"output", {"directory", "plot_script"}},
  };
  return s;
}

inline bool parse_bool(const std::string& v, const std::string& key) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(key + ": expected true or false, got '" + v + "'");
}

inline long parse_integer(const std::string& v, const std::string& key) {
  const double d = parse_number(v, key);
  if (d != std::floor(d)) throw ConfigError(key + ": expected an integer, got '" + v + "'");
  return static_cast<long>(d);
}

}  // namespace detail

/// Missing keys keep their default values.
inline ScenarioConfig from_ptree(const boost::property_tree::ptree& t) {
  const auto& schema = detail::schema();
  for (const auto& [section, body] : t) {
    auto it = schema.find(section);
    if (it == schema.end()) throw ConfigError("unknown section [" + section + "]");
    for (const auto& [key, value] : body) {
      if (!it->second.count(key)) throw ConfigError("unknown key " + section + "." + key);
      (void)value;
    }
  }
  ScenarioConfig c = default_config();
  auto text = [&](const std::string& key) -> std::optional<std::string> {
    auto v = t.get_optional<std::string>(boost::property_tree::ptree::path_type(key, '.'));
    return v ? std::optional<std::string>(*v) : std::nullopt;
  };
  auto num = [&](const std::string& key, double& dst) {
    if (auto v = text(key)) dst = detail::parse_number(*v, key);
  };
  auto opt = [&](const std::string& key, std::optional<double>& dst) {
    if (auto v = text(key)) dst = detail::parse_number(*v, key);
  };
  num("physical.k", c.physical.k);
  num("physical.rho", c.physical.rho);
  num("physical.cp", c.physical.cp);
  num("physical.latent_heat", c.physical.latent_heat);
  num("physical.length", c.physical.length);
  num("physical.melting_temperature", c.physical.melting_temperature);
  num("controller.c", c.controller.c);
  num("controller.lambda", c.controller.lambda);
  num("controller.epsilon", c.controller.epsilon);
  num("controller.setpoint", c.controller.s_r);
  num("trigger.eta", c.trigger.eta);
  num("trigger.gamma", c.trigger.gamma);
  num("trigger.delta", c.trigger.delta);
  num("trigger.m0", c.trigger.m0);
  num("trigger.A", c.trigger.A);
  opt("trigger.b_star", c.trigger.b_star);
  num("initial.s0", c.initial.s0);
  if (auto v = text("initial.T0")) c.initial.T0 = parse_profile(*v, "initial.T0");
  if (auto v = text("initial.T0_hat")) c.initial.T0_hat = parse_profile(*v, "initial.T0_hat");
  opt("initial.H", c.initial.H);
  opt("initial.H_hat_l", c.initial.H_hat_l);
  opt("initial.H_hat_u", c.initial.H_hat_u);
  if (auto v = text("scheme.nodes")) c.scheme.nodes = static_cast<int>(detail::parse_integer(*v, "scheme.nodes"));
  num("scheme.dt", c.scheme.dt);
  num("scheme.horizon", c.scheme.horizon);
  if (auto v = text("scheme.log_stride"))
    c.scheme.log_stride = static_cast<int>(detail::parse_integer(*v, "scheme.log_stride"));
  if (auto v = text("scenario.kind")) c.scenario.kind = parse_mode(*v);
  num("scenario.sampling_period", c.scenario.sampling_period);
  if (auto v = text("scenario.unsafe")) c.scenario.unsafe = detail::parse_bool(*v, "scenario.unsafe");
  if (auto v = text("scenario.seed"))
    c.scenario.seed = static_cast<unsigned long>(detail::parse_integer(*v, "scenario.seed"));
  if (auto v = text("output.directory")) c.output.directory = *v;
  if (auto v = text("output.plot_script")) c.output.plot_script = detail::parse_bool(*v, "output.plot_script");

  if (c.scheme.nodes < 3) throw ConfigError("scheme.nodes must be at least 3");
  if (!(c.scheme.dt > 0.0)) throw ConfigError("scheme.dt must be positive");
  if (!(c.scheme.horizon > 0.0)) throw ConfigError("scheme.horizon must be positive");
  if (c.scheme.log_stride < 1) throw ConfigError("scheme.log_stride must be at least 1");
  return c;
}

inline ScenarioConfig parse_config(const std::string& text) {
  // The INI reader only knows whole-line comments; drop trailing ones first.
  std::istringstream raw(text);
  std::string stripped, line;
  while (std::getline(raw, line)) stripped += line.substr(0, line.find(';')) + '\n';
  std::istringstream is(stripped);
  boost::property_tree::ptree t;
  try {
    boost::property_tree::read_ini(is, t);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  return from_ptree(t);
}

inline ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

/// Replaces one "section.key" entry, with the same validation as a file.
inline ScenarioConfig with_override(const ScenarioConfig& c, const std::string& key, const std::string& value) {
  auto t = to_ptree(c);
  const auto dot = key.find('.');
  if (dot == std::string::npos) throw ConfigError("override key must be section.key, got '" + key + "'");
  t.put(boost::property_tree::ptree::path_type(key, '.'), value);
  return from_ptree(t);
}

}  // namespace stefan
