// holo: experiment harness for the holographic transformer.
//
//   holo verify      property suite P1-P8
//   holo gradcheck   analytic vs finite-difference gradients
//   holo train       train on the configured synthetic task
//   holo eval        metrics of a checkpoint on a dataset container
//   holo robustness  noise sweep with RD/RI and RAUC
//   holo report      consolidate run directories into tables
//
// Exit status: 0 ok, 1 check or metric failure, 2 usage or config error.

#include <charconv>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "holo/experiment.hpp"
#include "holo/report.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kFail = 1;
constexpr int kUsage = 2;

struct Args {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::vector<std::string> ablate;
  std::string noise;
  std::optional<std::string> grid;
  std::string checkpoint;
  std::string data;
};

void add_common(CLI::App* sub, Args& a) {
  sub->add_option("--config", a.config, "JSON run configuration")->check(CLI::ExistingFile);
  sub->add_option("--seed", a.seed, "Override the run seed");
  sub->add_option("--out", a.out, "Output directory (overrides config 'out')");
  sub->add_option("--ablate", a.ablate, "Disable a component (repeatable or comma list)")
      ->delimiter(',')
      ->check(CLI::IsMember({"phase_decay", "coherent_sum", "reconstruction"}));
}

void add_noise(CLI::App* sub, Args& a) {
  sub->add_option("--noise", a.noise, "Noise axis")->check(CLI::IsMember({"sigma", "tau"}));
  sub->add_option("--grid", a.grid, "Noise levels v1,v2,... starting at 0");
}

void add_inputs(CLI::App* sub, Args& a) {
  sub->add_option("--checkpoint", a.checkpoint, "Checkpoint (default <out>/checkpoint.holock)");
  sub->add_option("--data", a.data, "Dataset container (default <out>/test.holods)");
}

// Strict "v1,v2,...": no empty fields, every field a whole number.
std::vector<double> parse_grid(const std::string& text) {
  if (text.empty()) throw holo::ConfigError("--grid: empty grid");
  std::vector<double> out;
  std::size_t start = 0;
  while (true) {
    const auto end = text.find(',', start);
    const auto field = text.substr(start, end == std::string::npos ? end : end - start);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (field.empty() || ec != std::errc() || ptr != field.data() + field.size()) {
      throw holo::ConfigError("--grid: bad value '" + field + "'");
    }
    out.push_back(v);
    if (end == std::string::npos) break;
    start = end + 1;
  }
  return out;
}

holo::RunConfig resolve(const Args& a) {
  auto cfg = a.config.empty() ? holo::default_run_config() : holo::load_run_config(a.config);
  if (a.seed) cfg.seed = *a.seed;
  if (!a.out.empty()) cfg.out = a.out;
  for (const auto& s : a.ablate) {
    if (s == "phase_decay") cfg.model.ablate_phase_decay = true;
    if (s == "coherent_sum") cfg.model.ablate_coherent_sum = true;
    if (s == "reconstruction") cfg.model.ablate_reconstruction = true;
  }
  if (!a.noise.empty()) {
    const auto axis = holo::noise_axis_from_string(a.noise);
    if (axis != cfg.robustness.axis && !a.grid) cfg.robustness.grid.clear();
    cfg.robustness.axis = axis;
  }
  if (a.grid) cfg.robustness.grid = parse_grid(*a.grid);
  cfg.validate();
  return cfg;
}

std::filesystem::path input_or(const std::string& given, const std::filesystem::path& fallback) {
  return given.empty() ? fallback : std::filesystem::path(given);
}

int run_verify(const Args& a) {
  const auto cfg = resolve(a);
  const auto res = holo::cmd_verify(cfg);
  for (const auto& r : res.reports) {
    std::cout << holo::to_json_line(r) << '\n';
    if (!r.acceptable()) {
      std::cerr << "FAIL " << r.property << " max_violation=" << r.max_violation
                << " tolerance=" << r.tolerance << '\n';
    } else if (r.negative_control) {
      std::cerr << "control " << r.property << ": " << holo::to_string(r.status()) << '\n';
    }
  }
  return res.ok ? kOk : kFail;
}

int run_gradcheck(const Args& a) {
  const auto cfg = resolve(a);
  const auto res = holo::cmd_gradcheck(cfg);
  for (const auto& [task, r] : res.reports) {
    std::cout << holo::to_json_line(r, task) << '\n';
    if (!r.pass) {
      std::cerr << "FAIL " << holo::to_string(task) << " seed " << r.seed
                << " max_rel_err=" << r.max_rel_err << '\n';
    }
  }
  return res.ok ? kOk : kFail;
}

int run_train(const Args& a) {
  const auto cfg = resolve(a);
  const auto res = holo::cmd_train(cfg, [](const holo::EpochRecord& r) {
    std::fprintf(stderr, "epoch %zu  loss %.6f  task %.6f  recon %.6f  lr %.3g  (%.1fs)\n",
                 r.epoch, r.loss.total, r.loss.task, r.loss.recon, r.lr, r.wall_seconds);
  });
  std::cout << holo::metrics_json(res.metrics, cfg.model, false);
  return kOk;
}

int run_eval(const Args& a) {
  const auto cfg = resolve(a);
  const auto ck = input_or(a.checkpoint, cfg.out / "checkpoint.holock");
  const auto m = holo::cmd_eval(ck, input_or(a.data, cfg.out / "test.holods"), cfg.out);
  std::cout << holo::metrics_json(m, holo::load_checkpoint(ck).config, false);
  return kOk;
}

int run_robustness(const Args& a) {
  const auto cfg = resolve(a);
  const auto grid = cfg.robustness.grid.empty() ? holo::default_grid(cfg.robustness.axis)
                                                : cfg.robustness.grid;
  const auto r = holo::cmd_robustness(input_or(a.checkpoint, cfg.out / "checkpoint.holock"),
                                      input_or(a.data, cfg.out / "test.holods"),
                                      cfg.robustness.axis, grid, cfg.robustness.seed, cfg.out);
  std::cout << holo::robustness_json(r, false);
  return kOk;
}

int run_report(const Args& a) {
  const auto cfg = resolve(a);
  const auto res = holo::cmd_report(cfg.out);
  for (const auto& m : res.missing) std::cerr << "warning: run '" << m << "' has no metrics\n";
  std::cout << "report: " << res.runs.size() << " runs -> " << res.out_dir.string() << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Holographic transformer experiment harness"};
  app.require_subcommand(1);
  Args a;

  auto* verify = app.add_subcommand("verify", "Run the P1-P8 property suite");
  auto* gradcheck = app.add_subcommand("gradcheck", "Check model gradients numerically");
  auto* train = app.add_subcommand("train", "Train on the configured synthetic task");
  auto* eval = app.add_subcommand("eval", "Evaluate a checkpoint on a dataset");
  auto* robust = app.add_subcommand("robustness", "Noise sweep with RD/RI and RAUC");
  auto* report = app.add_subcommand("report", "Consolidate runs under --out into tables");
  for (auto* s : {verify, gradcheck, train, eval, robust, report}) add_common(s, a);
  add_noise(robust, a);
  add_inputs(eval, a);
  add_inputs(robust, a);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (verify->parsed()) return run_verify(a);
    if (gradcheck->parsed()) return run_gradcheck(a);
    if (train->parsed()) return run_train(a);
    if (eval->parsed()) return run_eval(a);
    if (robust->parsed()) return run_robustness(a);
    if (report->parsed()) return run_report(a);
  } catch (const holo::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kUsage;
  } catch (const holo::DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kUsage;
  } catch (const holo::TrainingDiverged& e) {
    std::cerr << "training diverged: " << e.what() << '\n';
    return kFail;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFail;
  }
  return kUsage;
}
