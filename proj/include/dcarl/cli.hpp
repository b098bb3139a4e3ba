#pragma once

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "dcarl/config.hpp"
#include "dcarl/errormodel.hpp"
#include "dcarl/metrics.hpp"
#include "dcarl/plan_io.hpp"
#include "dcarl/report.hpp"
#include "dcarl/schedule.hpp"
#include "dcarl/trajectory.hpp"
#include "dcarl/worldsim.hpp"

namespace dcarl::cli {

enum ExitCode : int { kOk = 0, kInternal = 1, kInvalidInput = 2 };

struct RunContext {
  ExperimentConfig config;
  bool svg = false;
  std::ostream* out = &std::cout;
  std::ostream* err = &std::cerr;

  std::filesystem::path out_dir() const { return config.out; }
};

namespace detail {

inline std::ofstream open_output(const RunContext& ctx, const std::string& name) {
  std::filesystem::create_directories(ctx.out_dir());
  std::ofstream f(ctx.out_dir() / name, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + (ctx.out_dir() / name).string());
  return f;
}

inline worldsim::WorldConfig world_of(const ExperimentConfig& c) {
  worldsim::WorldParams p;
  p.dim = c.dim;
  p.lipschitz = c.lipschitz;
  p.bias_norm = c.mu;
  p.noise_std = c.sigma;
  p.control_amplitude = c.control;
  p.dynamics = dynamics_of(c);
  p.seed = c.seed;
  auto world = worldsim::make_world(p);
  if (!c.trajectory.empty()) {
    std::ifstream f(c.trajectory);
    if (!f) throw InvalidInput("cannot read trajectory file " + c.trajectory);
    Trajectory traj = read_trajectory(f);
    if (traj.size() >= 2) {
      std::vector<FrameIndex> dense;
      for (FrameIndex t = traj.first_index(); t <= traj.last_index(); ++t) dense.push_back(t);
      world.controls = worldsim::controls_from_trajectory(metrics::densify_trajectory(traj, dense), c.dim);
    }
  }
  return world;
}

inline RolloutPlan plan_of(const ExperimentConfig& c) {
  Rng rng = make_rng(c.seed, "plan");
  return schedule::build_plan(plan_options_of(c), rng);
}

inline void write_trace(std::ostream& os, const worldsim::RolloutTrace& tr) {
  CsvWriter csv(os, {"frame", "err_norm", "bound_total", "anchor", "leakage", "noise", "is_keyframe",
                     "segment_id"});
  for (std::size_t t = 0; t < tr.error_norms.size(); ++t) {
    const auto& b = tr.bounds[t];
    csv.row({std::to_string(tr.generated.start_index() + static_cast<FrameIndex>(t)),
             CsvWriter::num(tr.error_norms[t]), CsvWriter::num(b.total), CsvWriter::num(b.anchor),
             CsvWriter::num(b.leakage), CsvWriter::num(b.noise), tr.is_keyframe[t] ? "1" : "0",
             std::to_string(tr.segment_id[t])});
  }
}

inline std::vector<double> frame_axis(std::size_t n) {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = static_cast<double>(i);
  return x;
}

struct GridCell {
  FrameIndex gen = 0, interp = 0;
};

inline std::vector<GridCell> parse_grid(const std::string& text) {
  std::vector<GridCell> out;
  for (const auto& item : split_list(text, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw InvalidInput("grid cell '" + item + "' is not gen:int");
    GridCell c{parse_int(item.substr(0, colon)), parse_int(item.substr(colon + 1))};
    require(c.gen >= 1 && c.interp >= 1, "grid strides must be >= 1");
    require(c.interp % c.gen == 0,
            "grid cell '" + item + "': interpolation stride must be a multiple of the generation stride");
    out.push_back(c);
  }
  require(!out.empty(), "ablation grid is empty");
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------

inline int cmd_plan(const RunContext& ctx) {
  const auto& c = ctx.config;
  auto plan = detail::plan_of(c);
  {
    auto f = detail::open_output(ctx, "plan.txt");
    write_plan(f, plan);
  }
  auto& o = *ctx.out;
  o << "frames      " << plan.total_frames << '\n';
  o << "keyframes   " << plan.keyframes.size() << " (last " << plan.keyframes.back() << ")\n";
  o << "segments    " << plan.segments.size() << '\n';
  o << "overlap     " << plan.overlap << '\n';
  o << "segment  start  end  history  keyframes\n";
  for (std::size_t i = 0; i < plan.segments.size(); ++i) {
    const auto& s = plan.segments[i];
    o << std::setw(7) << i << std::setw(7) << s.start << std::setw(5) << s.end << std::setw(9)
      << s.history_indices.size() << "  ";
    for (auto k : s.keyframe_indices) o << k << ' ';
    o << '\n';
  }
  const auto violations = validate_plan(plan);
  for (const auto& v : violations) *ctx.err << "violation: " << v << '\n';
  o << (violations.empty() ? "plan valid\n" : "plan INVALID\n");
  return violations.empty() ? kOk : kInternal;
}

inline int cmd_bounds(const RunContext& ctx) {
  const auto& c = ctx.config;
  const auto scenarios = scenarios_of(c);
  const bool downsampled = scenarios.size() == 1 && scenarios.front() == worldsim::KeyframeScenario::downsampled_ar;
  const double T = static_cast<double>(c.strides.front());
  const auto N = static_cast<std::size_t>(c.frames);

  std::vector<double> ar_upper(N), dcar(N);
  std::size_t diverged_rows = 0;
  {
    auto f = detail::open_output(ctx, "bounds.csv");
    CsvWriter csv(f, {"frame", "ar_upper", "ar_lower", "ar_variance", "dcar_bound", "anchor", "leakage",
                      "noise", "diverged"});
    for (std::size_t t = 0; t < N; ++t) {
      errormodel::ArBound up;
      if (t > 0) up = errormodel::ar_error_upper_bound(c.lipschitz, c.eta, t, c.diverge_cap);
      const double anchor =
          downsampled ? errormodel::anchor_term(errormodel::DownsampledArKeyframes{t, c.eta}, T) : c.c_kf;
      const auto b = errormodel::unified_bound(T, c.dv0, c.sigma_int, anchor);
      ar_upper[t] = up.value;
      dcar[t] = b.total;
      diverged_rows += up.diverged ? 1 : 0;
      csv.row({std::to_string(t), CsvWriter::num(up.value),
               CsvWriter::num(errormodel::ar_bias_lower_bound(c.mu, t)),
               CsvWriter::num(errormodel::ar_variance(c.sigma * c.sigma, t)), CsvWriter::num(b.total),
               CsvWriter::num(b.anchor), CsvWriter::num(b.leakage), CsvWriter::num(b.noise),
               up.diverged ? "1" : "0"});
    }
  }
  if (ctx.svg) {
    auto f = detail::open_output(ctx, "bounds.svg");
    const auto x = detail::frame_axis(N);
    write_svg_chart(f, "error bounds", "frame", {{"AR upper", x, ar_upper}, {"DCAR bound", x, dcar}});
  }
  *ctx.out << "wrote " << (ctx.out_dir() / "bounds.csv").string() << " (" << N << " rows";
  if (diverged_rows) *ctx.out << ", " << diverged_rows << " diverged";
  *ctx.out << ")\nlast row: ar_upper=" << CsvWriter::num(ar_upper.back())
           << " dcar_bound=" << CsvWriter::num(dcar.back()) << '\n';
  return kOk;
}

inline int cmd_simulate(const RunContext& ctx) {
  const auto& c = ctx.config;
  require(c.frames >= 2, "simulate needs frames >= 2");
  const auto world = detail::world_of(c);
  const auto plan = detail::plan_of(c);
  worldsim::CompareOptions opt;
  opt.scenarios = scenarios_of(c);
  opt.keyframes.error_cap = c.c_kf;
  opt.dcar = dcar_options_of(c);
  opt.trials = c.trials;
  opt.seed = c.seed;
  const auto rep = worldsim::compare_pipelines(world, plan, opt);
  const auto N = static_cast<std::size_t>(plan.total_frames);

  {
    auto f = detail::open_output(ctx, "trace_ar.csv");
    detail::write_trace(f, rep.ar_example);
  }
  for (std::size_t s = 0; s < rep.scenarios.size(); ++s) {
    auto f = detail::open_output(ctx, std::string("trace_dcar_") + worldsim::to_string(rep.scenarios[s].scenario) + ".csv");
    detail::write_trace(f, rep.dcar_examples[s]);
  }
  {
    auto f = detail::open_output(ctx, "curves.csv");
    std::vector<std::string> header{"frame", "ar_mean", "ar_mse"};
    for (const auto& sc : rep.scenarios) {
      const std::string n = worldsim::to_string(sc.scenario);
      header.insert(header.end(), {n + "_mean", n + "_mse", n + "_ratio"});
    }
    CsvWriter csv(f, header);
    for (std::size_t t = 0; t < N; ++t) {
      std::vector<std::string> row{std::to_string(t), CsvWriter::num(rep.ar.mean_error[t]),
                                   CsvWriter::num(rep.ar.mse[t])};
      for (const auto& sc : rep.scenarios)
        row.insert(row.end(), {CsvWriter::num(sc.dcar.mean_error[t]), CsvWriter::num(sc.dcar.mse[t]),
                               CsvWriter::num(sc.ratio[t])});
      csv.row(row);
    }
  }
  const bool deterministic = c.sigma_int == 0.0;
  std::size_t total_violations = 0;
  {
    auto f = detail::open_output(ctx, "violations.csv");
    CsvWriter csv(f, {"scenario", "checked", "violations", "max_error", "final_ar", "final_dcar", "final_ratio"});
    for (const auto& sc : rep.scenarios) {
      total_violations += sc.violations;
      csv.row({worldsim::to_string(sc.scenario), deterministic ? "1" : "0", std::to_string(sc.violations),
               CsvWriter::num(sc.max_error), CsvWriter::num(rep.ar.mean_error.back()),
               CsvWriter::num(sc.dcar.mean_error.back()), CsvWriter::num(sc.ratio.back())});
    }
  }
  if (ctx.svg) {
    auto f = detail::open_output(ctx, "curves.svg");
    const auto x = detail::frame_axis(N);
    std::vector<Series> series{{"pure AR", x, rep.ar.mean_error}};
    for (const auto& sc : rep.scenarios)
      series.push_back({std::string("DCAR ") + worldsim::to_string(sc.scenario), x, sc.dcar.mean_error});
    write_svg_chart(f, "mean error norm", "frame", series);
  }

  auto& o = *ctx.out;
  o << "trials " << rep.trials << ", frames " << N << ", keyframes " << plan.keyframes.size() << ", segments "
    << plan.segments.size() << '\n';
  o << "final AR mean error " << CsvWriter::num(rep.ar.mean_error.back()) << '\n';
  for (const auto& sc : rep.scenarios)
    o << "final DCAR (" << worldsim::to_string(sc.scenario) << ") mean error "
      << CsvWriter::num(sc.dcar.mean_error.back()) << ", AR/DCAR ratio " << CsvWriter::num(sc.ratio.back())
      << '\n';
  if (deterministic)
    o << "bound violations: " << total_violations << '\n';
  else
    o << "bound violations: not checked (sigma_int > 0)\n";
  return kOk;
}

struct EvalOptions {
  std::string est_path, ref_path;
  std::string align = "sim3";             // sim3 | se3
  std::string rotation = "translation";   // translation | orientation | raw
};

inline int cmd_eval(const RunContext& ctx, const EvalOptions& eo) {
  auto load = [](const std::string& path) {
    std::ifstream f(path);
    if (!f) throw InvalidInput("cannot read " + path);
    try {
      return read_trajectory(f);
    } catch (const ParseError& e) {
      throw InvalidInput(path + ": " + e.what());
    }
  };
  const Trajectory est_raw = load(eo.est_path);
  const Trajectory ref = load(eo.ref_path);
  require(eo.align == "sim3" || eo.align == "se3", "--align must be sim3 or se3");
  const bool with_scale = eo.align == "sim3";
  metrics::RotationAlignment mode;
  if (eo.rotation == "translation") mode = metrics::RotationAlignment::translation;
  else if (eo.rotation == "orientation") mode = metrics::RotationAlignment::orientation;
  else if (eo.rotation == "raw") mode = metrics::RotationAlignment::raw;
  else throw InvalidInput("--are-mode must be translation, orientation or raw");

  // Match by frame index; a sparse estimate is densified onto the reference indices.
  bool same = est_raw.size() == ref.size();
  for (std::size_t i = 0; same && i < ref.size(); ++i) same = est_raw.index(i) == ref.index(i);
  std::vector<FrameIndex> targets;
  for (std::size_t i = 0; i < ref.size(); ++i) targets.push_back(ref.index(i));
  const Trajectory est = same ? est_raw : metrics::densify_trajectory(est_raw, targets);

  const auto al = metrics::align_similarity(est, ref, with_scale);
  const double ate = al.rmse;
  const double are = metrics::are(est, ref, mode, with_scale);
  const double are_translation = metrics::are(est, ref, metrics::RotationAlignment::translation, with_scale);
  const double are_orientation = metrics::are(est, ref, metrics::RotationAlignment::orientation, with_scale);
  const double smooth = est.size() >= 3 ? metrics::smoothness(est) : 0.0;

  {
    auto f = detail::open_output(ctx, "metrics.csv");
    CsvWriter csv(f, {"name", "value", "n_items"});
    const auto n = std::to_string(est.size());
    csv.row({"ate", CsvWriter::num(ate), n});
    csv.row({"are_deg", CsvWriter::num(are), n});
    csv.row({"smoothness", CsvWriter::num(smooth), n});
    csv.row({"align_scale", CsvWriter::num(al.scale), n});
  }
  auto& o = *ctx.out;
  o << std::setprecision(10);
  o << "poses       " << est.size() << (same ? "" : " (estimate densified onto reference indices)") << '\n';
  o << "alignment   " << eo.align << " scale=" << al.scale << " t=(" << al.translation.transpose() << ")"
    << (al.degenerate ? " [degenerate: rotation not unique]" : "") << '\n';
  o << "rotation    " << al.rotation.row(0) << " | " << al.rotation.row(1) << " | " << al.rotation.row(2) << '\n';
  o << "ATE         " << ate << '\n';
  o << "ARE (deg)   " << are << " [" << eo.rotation << "]\n";
  o << "smoothness  " << smooth << '\n';
  if (std::abs(are_translation - are_orientation) > 0.1)
    o << "note: ARE differs between translation-fit (" << are_translation << ") and orientation-fit ("
      << are_orientation << ") rotation alignment by more than 0.1 deg\n";
  return kOk;
}

inline int cmd_ablate(const RunContext& ctx) {
  const auto& c = ctx.config;
  const auto grid = detail::parse_grid(c.grid);
  require(c.frames >= 2, "ablate needs frames >= 2");
  const auto world = detail::world_of(c);
  const auto gt = worldsim::simulate_ground_truth(world, c.frames - 1);
  const auto scenarios = scenarios_of(c);
  worldsim::KeyframeOptions ko;
  ko.scenario = scenarios.size() == 1 ? scenarios.front() : worldsim::KeyframeScenario::downsampled_ar;
  ko.error_cap = c.c_kf;
  const auto dcar = dcar_options_of(c);

  auto f = detail::open_output(ctx, "ablate.csv");
  CsvWriter csv(f, {"gen_stride", "int_stride", "keyframes_gen", "keyframes_int", "segments", "final_error",
                    "max_error", "max_bound", "leakage_term", "violations"});
  auto& o = *ctx.out;
  o << "gen  int  kf_gen  kf_int  final_error  max_bound  violations\n";
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const auto cell = grid[g];
    const auto gen_kf = schedule::keyframes_at_stride(c.frames, cell.gen);
    const auto int_kf = schedule::filter_keyframes(gen_kf, cell.interp);
    const auto plan = schedule::build_plan_with_keyframes(c.frames, int_kf, cell.interp + c.overlap, c.overlap,
                                                          {c.alpha_c, c.sigma_c});
    double final_sum = 0.0, max_err = 0.0, max_bound = 0.0;
    std::size_t violations = 0;
    for (std::size_t trial = 0; trial < c.trials; ++trial) {
      Rng kf_rng = make_rng(c.seed, "ablate-keyframes", g * 1000003 + trial);
      const auto kf = worldsim::generate_keyframes(world, gt, gen_kf, ko, kf_rng);
      Rng dc_rng = make_rng(c.seed, "ablate-dcar", g * 1000003 + trial);
      const auto tr = worldsim::rollout_dcar(world, plan, kf, dcar, dc_rng);
      final_sum += tr.error_norms.back();
      for (std::size_t t = 0; t < tr.error_norms.size(); ++t) {
        max_err = std::max(max_err, tr.error_norms[t]);
        max_bound = std::max(max_bound, tr.bounds[t].total);
      }
      if (dcar.interp_noise == 0.0) violations += worldsim::count_violations(tr);
    }
    const double final_err = final_sum / static_cast<double>(c.trials);
    csv.row({std::to_string(cell.gen), std::to_string(cell.interp), std::to_string(gen_kf.size()),
             std::to_string(int_kf.size()), std::to_string(plan.segments.size()), CsvWriter::num(final_err),
             CsvWriter::num(max_err), CsvWriter::num(max_bound),
             CsvWriter::num(errormodel::cumulative_leakage_bound(static_cast<double>(cell.interp), c.dv0)),
             std::to_string(violations)});
    o << std::setw(3) << cell.gen << std::setw(5) << cell.interp << std::setw(8) << gen_kf.size() << std::setw(8)
      << int_kf.size() << "  " << CsvWriter::num(final_err) << "  " << CsvWriter::num(max_bound) << "  "
      << violations << '\n';
  }
  return kOk;
}

// ---------------------------------------------------------------------------

// Entry point shared by the binary and the tests. args excludes the program name.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out = std::cout,
                   std::ostream& err = std::cerr) {
  CLI::App app{"Divide-and-conquer long-rollout scheduling and error-bound toolkit", "dcarl"};
  app.require_subcommand(1);
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  bool svg = false;
  std::vector<std::string> overrides;
  app.add_option("--config", config_path, "key = value config file");
  app.add_option("--seed", seed, "base random seed");
  app.add_option("--out", out_dir, "output directory");
  app.add_flag("--svg", svg, "also write SVG charts");
  app.add_option("--set", overrides, "override a config key (key=value), repeatable");

  auto* plan_cmd = app.add_subcommand("plan", "build and validate a rollout plan");
  auto* bounds_cmd = app.add_subcommand("bounds", "closed-form error bound curves");
  auto* sim_cmd = app.add_subcommand("simulate", "Monte-Carlo pure-AR vs DCAR in the toy world");
  auto* eval_cmd = app.add_subcommand("eval", "ATE / ARE / smoothness of a trajectory");
  auto* ablate_cmd = app.add_subcommand("ablate", "sweep (generation, interpolation) stride pairs");
  EvalOptions eo;
  eval_cmd->add_option("estimate", eo.est_path, "estimated trajectory file")->required();
  eval_cmd->add_option("reference", eo.ref_path, "reference trajectory file")->required();
  eval_cmd->add_option("--align", eo.align, "sim3 (with scale) or se3");
  eval_cmd->add_option("--are-mode", eo.rotation, "ARE rotation alignment: translation, orientation, raw");
  std::optional<std::string> grid;
  ablate_cmd->add_option("--grid", grid, "stride pairs gen:int separated by commas");
  for (auto* sub : {plan_cmd, bounds_cmd, sim_cmd, eval_cmd, ablate_cmd}) sub->fallthrough();

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidInput;
  }

  try {
    RunContext ctx;
    ctx.out = &out;
    ctx.err = &err;
    ctx.svg = svg;
    if (!config_path.empty()) {
      std::ifstream f(config_path);
      if (!f) throw InvalidInput("cannot read config " + config_path);
      try {
        apply_config(ctx.config, f);
      } catch (const ParseError& e) {
        throw InvalidInput(config_path + ": " + e.what());
      }
    }
    for (const auto& kv : overrides) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw InvalidInput("--set expects key=value, got '" + kv + "'");
      set_config_value(ctx.config, trim(kv.substr(0, eq)), trim(kv.substr(eq + 1)));
    }
    if (seed) ctx.config.seed = *seed;
    if (out_dir) ctx.config.out = *out_dir;
    if (grid) ctx.config.grid = *grid;
    validate_config(ctx.config);

    if (plan_cmd->parsed()) return cmd_plan(ctx);
    if (bounds_cmd->parsed()) return cmd_bounds(ctx);
    if (sim_cmd->parsed()) return cmd_simulate(ctx);
    if (eval_cmd->parsed()) return cmd_eval(ctx, eo);
    if (ablate_cmd->parsed()) return cmd_ablate(ctx);
  } catch (const InvalidInput& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidInput;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kInternal;
  }
  return kInternal;
}

}  // namespace dcarl::cli
