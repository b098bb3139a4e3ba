#pragma once

#include <charconv>
#include <cstdint>
#include <functional>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "dcarl/kv.hpp"
#include "dcarl/schedule.hpp"
#include "dcarl/worldsim.hpp"

namespace dcarl::cli {

// Every run parameter. Serialized as flat "key = value" text; see README for
// the key list.
struct ExperimentConfig {
  // plan
  FrameIndex frames = 321;
  std::vector<int> strides{8};  // one value: fixed test stride; several: train-mode draw
  FrameIndex segment_length = 9;
  FrameIndex overlap = 1;
  double alpha_c = 0.7;
  double sigma_c = 0.3;
  // world
  long dim = 4;
  double lipschitz = 1.0;
  double mu = 0.01;
  double sigma = 0.0;
  std::string dynamics = "identity";  // identity | orthogonal | random
  double control = 0.1;
  std::string trajectory;  // optional pose file driving the controls
  std::uint64_t seed = 0;
  // error model
  double eta = 0.01;
  double sigma_int = 0.0;
  double dv0 = 0.0;
  double c_kf = 0.1;
  std::string scenario = "both";  // global | downsampled_ar | both
  bool momentum = true;
  bool substitution = true;
  std::string local_motion = "ground_truth";  // ground_truth | linear
  double diverge_cap = 1e300;
  // run
  std::size_t trials = 1;
  std::string grid = "4:4,8:8,16:16";
  std::string out = ".";

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

namespace detail {

inline bool parse_bool(const std::string& s, std::size_t line) {
  if (s == "true" || s == "1" || s == "on" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "off" || s == "no") return false;
  throw ParseError("not a boolean: '" + s + "'", line);
}

inline std::string join(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

struct Field {
  const char* key;
  std::function<void(ExperimentConfig&, const std::string&, std::size_t)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

inline const std::vector<Field>& fields() {
  using C = ExperimentConfig;
  auto num = [](double C::*m) {
    return std::pair{
        std::function<void(C&, const std::string&, std::size_t)>(
            [m](C& c, const std::string& v, std::size_t l) { c.*m = parse_double(v, l); }),
        std::function<std::string(const C&)>([m](const C& c) { return format_double(c.*m); })};
  };
  auto integer = [](auto C::*m) {
    return std::pair{
        std::function<void(C&, const std::string&, std::size_t)>(
            [m](C& c, const std::string& v, std::size_t l) {
              const auto x = parse_int(v, l);
              if (x < 0) throw ParseError("value must be >= 0: '" + v + "'", l);
              c.*m = static_cast<std::remove_reference_t<decltype(c.*m)>>(x);
            }),
        std::function<std::string(const C&)>([m](const C& c) { return std::to_string(c.*m); })};
  };
  auto text = [](std::string C::*m) {
    return std::pair{
        std::function<void(C&, const std::string&, std::size_t)>(
            [m](C& c, const std::string& v, std::size_t) { c.*m = v; }),
        std::function<std::string(const C&)>([m](const C& c) { return c.*m; })};
  };
  auto flag = [](bool C::*m) {
    return std::pair{
        std::function<void(C&, const std::string&, std::size_t)>(
            [m](C& c, const std::string& v, std::size_t l) { c.*m = parse_bool(v, l); }),
        std::function<std::string(const C&)>([m](const C& c) { return std::string(c.*m ? "true" : "false"); })};
  };
  auto make = [](const char* key, auto pr) { return Field{key, pr.first, pr.second}; };
  static const std::vector<Field> f = {
      make("frames", integer(&C::frames)),
      Field{"strides",
            [](C& c, const std::string& v, std::size_t l) {
              c.strides.clear();
              for (const auto& s : split_list(v, ',')) c.strides.push_back(static_cast<int>(parse_int(s, l)));
            },
            [](const C& c) { return join(c.strides); }},
      make("segment_length", integer(&C::segment_length)),
      make("overlap", integer(&C::overlap)),
      make("alpha_c", num(&C::alpha_c)),
      make("sigma_c", num(&C::sigma_c)),
      make("dim", integer(&C::dim)),
      make("lipschitz", num(&C::lipschitz)),
      make("mu", num(&C::mu)),
      make("sigma", num(&C::sigma)),
      make("dynamics", text(&C::dynamics)),
      make("control", num(&C::control)),
      make("trajectory", text(&C::trajectory)),
      Field{"seed",
            [](C& c, const std::string& v, std::size_t l) {
              auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), c.seed);
              if (ec != std::errc() || ptr != v.data() + v.size())
                throw ParseError("not an unsigned 64-bit seed: '" + v + "'", l);
            },
            [](const C& c) { return std::to_string(c.seed); }},
      make("eta", num(&C::eta)),
      make("sigma_int", num(&C::sigma_int)),
      make("dv0", num(&C::dv0)),
      make("c_kf", num(&C::c_kf)),
      make("scenario", text(&C::scenario)),
      make("momentum", flag(&C::momentum)),
      make("substitution", flag(&C::substitution)),
      make("local_motion", text(&C::local_motion)),
      make("diverge_cap", num(&C::diverge_cap)),
      make("trials", integer(&C::trials)),
      make("grid", text(&C::grid)),
      make("out", text(&C::out)),
  };
  return f;
}

}  // namespace detail

inline void set_config_value(ExperimentConfig& cfg, const std::string& key, const std::string& value,
                             std::size_t line = 0) {
  for (const auto& f : detail::fields())
    if (key == f.key) {
      f.set(cfg, value, line);
      return;
    }
  throw ParseError("unknown config key '" + key + "'", line);
}

inline void apply_config(ExperimentConfig& cfg, std::istream& in) {
  for (const auto& [key, entry] : parse_key_values(in)) set_config_value(cfg, key, entry.value, entry.line);
}

inline void write_config(std::ostream& out, const ExperimentConfig& cfg) {
  for (const auto& f : detail::fields()) out << f.key << " = " << f.get(cfg) << '\n';
}

inline std::vector<worldsim::KeyframeScenario> scenarios_of(const ExperimentConfig& c) {
  using worldsim::KeyframeScenario;
  if (c.scenario == "global") return {KeyframeScenario::global};
  if (c.scenario == "downsampled_ar") return {KeyframeScenario::downsampled_ar};
  if (c.scenario == "both") return {KeyframeScenario::global, KeyframeScenario::downsampled_ar};
  throw InvalidInput("scenario must be global, downsampled_ar or both");
}

inline worldsim::DynamicsKind dynamics_of(const ExperimentConfig& c) {
  if (c.dynamics == "identity") return worldsim::DynamicsKind::identity;
  if (c.dynamics == "orthogonal") return worldsim::DynamicsKind::orthogonal;
  if (c.dynamics == "random") return worldsim::DynamicsKind::random;
  throw InvalidInput("dynamics must be identity, orthogonal or random");
}

inline worldsim::LocalMotion local_motion_of(const ExperimentConfig& c) {
  if (c.local_motion == "ground_truth") return worldsim::LocalMotion::ground_truth;
  if (c.local_motion == "linear") return worldsim::LocalMotion::linear;
  throw InvalidInput("local_motion must be ground_truth or linear");
}

// Checks shared by all subcommands; throws InvalidInput with a user-facing message.
inline void validate_config(const ExperimentConfig& c) {
  require(c.frames >= 1, "frames must be >= 1");
  require(!c.strides.empty(), "strides must not be empty");
  for (int s : c.strides) require(s >= 1, "strides must be >= 1");
  require(c.segment_length > c.overlap, "segment length must exceed overlap");
  require(c.dim >= 1, "dim must be >= 1");
  require(c.lipschitz >= 0 && c.mu >= 0 && c.sigma >= 0 && c.eta >= 0 && c.sigma_int >= 0 &&
              c.dv0 >= 0 && c.c_kf >= 0 && c.sigma_c >= 0,
          "model parameters must be >= 0");
  require(c.diverge_cap > 0, "diverge_cap must be > 0");
  require(c.trials >= 1, "trials must be >= 1");
  scenarios_of(c);
  dynamics_of(c);
  local_motion_of(c);
}

inline schedule::StridePolicy policy_of(const ExperimentConfig& c) {
  return c.strides.size() == 1 ? schedule::StridePolicy::test(c.strides.front())
                               : schedule::StridePolicy::train(c.strides);
}

inline schedule::PlanOptions plan_options_of(const ExperimentConfig& c) {
  schedule::PlanOptions p;
  p.total_frames = c.frames;
  p.policy = policy_of(c);
  p.segment_length = c.segment_length;
  p.overlap = c.overlap;
  p.conditioning = {c.alpha_c, c.sigma_c};
  return p;
}

inline worldsim::DcarOptions dcar_options_of(const ExperimentConfig& c) {
  worldsim::DcarOptions o;
  o.interp_noise = c.sigma_int;
  o.initial_velocity_error = c.dv0;
  o.momentum = c.momentum;
  o.substitution = c.substitution;
  o.local_motion = local_motion_of(c);
  return o;
}

}  // namespace dcarl::cli
