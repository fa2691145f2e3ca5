// crcmap: risk-control toolkit for pixel-level probability maps.
//
// Subcommands: calibrate, evaluate, sweep, threeway, apply, simulate,
// mc-check, split. Every command is a pure function of its flags and input
// files; outputs embed provenance (parameters + content digests) and never
// timestamps, so reruns are byte-identical.
//
// Exit codes: 0 success, 1 I/O or format, 2 validation, 3 statistical
// infeasibility (including a failed mc-check bound).

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "crcmap/bootstrap.hpp"
#include "crcmap/crc.hpp"
#include "crcmap/io.hpp"
#include "crcmap/metrics.hpp"
#include "crcmap/report.hpp"
#include "crcmap/synth.hpp"
#include "crcmap/threeway.hpp"

namespace {

using namespace crcmap;

int exit_class(Errc code) {
  switch (code) {
    case Errc::IoFailure:
    case Errc::BadMagic:
    case Errc::BadVersion:
    case Errc::TruncatedPayload:
    case Errc::ScoreOutOfRange:
    case Errc::BadLabel:
    case Errc::BadHeader:
    case Errc::BadField:
      return 1;
    case Errc::InvalidArgument:
    case Errc::EmptyInput:
    case Errc::AlphaOutOfRange:
    case Errc::AurocOutOfRange:
    case Errc::DegeneratePrevalence:
      return 2;
    case Errc::NoPositives:
    case Errc::NoNegatives:
    case Errc::AlphaTooLargeForSample:
    case Errc::Infeasible:
    case Errc::TooFewPositives:
    case Errc::MetricUndefined:
      return 3;
  }
  return 2;
}

/// Flat JSON object as a CLI11 config source: {"alpha": 0.05, ...}
/// supplies defaults for the active subcommand; explicit flags win.
class JsonConfig : public CLI::Config {
 public:
  std::string to_config(const CLI::App* app, bool default_also, bool,
                        std::string) const override {
    nlohmann::ordered_json j;
    for (const CLI::Option* opt : app->get_options({})) {
      if (opt->get_lnames().empty() || !opt->get_configurable()) continue;
      const std::string name = opt->get_lnames().front();
      if (opt->count() > 0) {
        j[name] = opt->results().front();
      } else if (default_also && !opt->get_default_str().empty()) {
        j[name] = opt->get_default_str();
      }
    }
    return j.dump(2) + "\n";
  }

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(input);
    } catch (const nlohmann::json::exception& e) {
      throw CLI::FileError(std::string("config parse error: ") + e.what());
    }
    if (!j.is_object())
      throw CLI::FileError("config must be a JSON object of key/value pairs");
    std::vector<CLI::ConfigItem> items;
    for (const auto& [key, value] : j.items()) {
      CLI::ConfigItem item;
      item.name = key;
      if (value.is_string()) {
        item.inputs.push_back(value.get<std::string>());
      } else if (value.is_array()) {
        for (const auto& element : value)
          item.inputs.push_back(element.is_string()
                                    ? element.get<std::string>()
                                    : element.dump());
      } else {
        item.inputs.push_back(value.dump());
      }
      items.push_back(std::move(item));
    }
    return items;
  }
};

/// Effective parameters of the parsed subcommand, for provenance.
std::vector<std::pair<std::string, std::string>> collect_params(
    const CLI::App* sub) {
  std::vector<std::pair<std::string, std::string>> params;
  for (const CLI::Option* opt : sub->get_options({})) {
    if (opt->get_lnames().empty()) continue;
    const std::string name = opt->get_lnames().front();
    if (name == "help") continue;
    std::string value;
    if (opt->count() > 0) {
      const auto& results = opt->results();
      for (std::size_t i = 0; i < results.size(); ++i) {
        if (i) value += ",";
        value += results[i];
      }
    } else {
      value = opt->get_default_str();
    }
    if (!value.empty()) params.emplace_back(name, value);
  }
  for (const CLI::Option* opt : sub->get_positionals()) {
    if (opt->count() > 0) params.emplace_back(opt->get_name(), opt->results().front());
  }
  return params;
}

Provenance make_provenance(
    const CLI::App* sub, const std::string& command,
    const std::vector<std::pair<std::string, std::string>>& inputs) {
  Provenance prov;
  prov.command = command;
  prov.parameters = collect_params(sub);
  for (const auto& [role, path] : inputs)
    prov.inputs.push_back({role, path, fnv1a64_digest(path)});
  return prov;
}

std::vector<double> parse_grid(const std::string& text) {
  double start = 0.0, stop = 0.0, step = 0.0;
  const auto first = text.find(':');
  const auto second = text.find(':', first + 1);
  require(first != std::string::npos && second != std::string::npos,
          Errc::InvalidArgument, "--grid expects start:stop:step");
  try {
    start = std::stod(text.substr(0, first));
    stop = std::stod(text.substr(first + 1, second - first - 1));
    step = std::stod(text.substr(second + 1));
  } catch (const std::exception&) {
    throw Error(Errc::InvalidArgument, "--grid expects numeric start:stop:step");
  }
  require(step > 0.0, Errc::InvalidArgument, "grid step must be positive");
  require(stop >= start, Errc::InvalidArgument, "grid stop must be >= start");
  const auto count =
      static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
  std::vector<double> grid;
  grid.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    double v = start + static_cast<double>(i) * step;
    if (v > stop) v = stop;
    grid.push_back(v);
  }
  return grid;
}

std::array<double, 3> parse_ratios(const std::string& text) {
  std::array<double, 3> ratios{};
  const auto first = text.find(',');
  const auto second = text.find(',', first + 1);
  require(first != std::string::npos && second != std::string::npos,
          Errc::InvalidArgument, "--ratios expects a,b,c");
  try {
    ratios[0] = std::stod(text.substr(0, first));
    ratios[1] = std::stod(text.substr(first + 1, second - first - 1));
    ratios[2] = std::stod(text.substr(second + 1));
  } catch (const std::exception&) {
    throw Error(Errc::InvalidArgument, "--ratios expects numeric a,b,c");
  }
  return ratios;
}

void write_text_file(const std::filesystem::path& path,
                     const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(out.is_open(), Errc::IoFailure, "cannot open " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  require(out.good(), Errc::IoFailure, "write failed for " + path.string());
}

// ---- per-subcommand parameter bags ----

struct CalibrateArgs {
  std::string scores, out;
  double alpha = 0.05;
};

struct EvaluateArgs {
  std::string scores, threshold, out;
  double lambda = 0.5;
  bool lambda_given = false;
  std::uint32_t bootstrap = 0;
  double confidence = 0.95;
  std::uint64_t seed = 0;
  unsigned threads = 0;
};

struct SweepArgs {
  std::string scores, grid, out;
};

struct ThreeWayArgs {
  std::string scores, out;
  double alpha_cw = 0.5;
  double c_fn = 5.0;
  double c_fp = 1.0;
  double rho_lo = 0.9;
  double rho_hi = 1.1;
};

struct ApplyArgs {
  std::string scores, zones, out, report;
};

struct SimulateArgs {
  std::string out;
  double auroc = 0.969;
  double prevalence = 0.05;
  std::uint32_t images = 100;
  std::uint32_t height = 64;
  std::uint32_t width = 64;
  std::uint64_t seed = 42;
  double latent_offset = 0.0;
};

struct McArgs {
  std::string mode;
  std::string out;
  double auroc = 0.97;
  double prevalence = 0.05;
  double alpha = 0.05;
  std::uint32_t trials = 1000;
  std::uint64_t cal_pixels = 50000;
  std::uint64_t test_pixels = 50000;
  std::uint64_t seed = 42;
  unsigned threads = 0;
  double latent_offset = 0.0;
  double tol = 0.01;
  double alpha_cw = 0.5;
  double c_fn = 5.0;
  double c_fp = 1.0;
  double rho_lo = 0.9;
  double rho_hi = 1.1;
  double rho_test = 1.0;
  bool rho_test_given = false;
  double max_violation = 0.05;
};

struct SplitArgs {
  std::string scores, out_prefix;
  std::string ratios = "0.7,0.15,0.15";
  std::uint64_t seed = 42;
};

int run_calibrate(const CLI::App* sub, const CalibrateArgs& args) {
  const ScoreMapSet set = read_container(args.scores);
  const CalibrationResult result = calibrate_fnr(set, RiskSpec(args.alpha));
  save_calibration(args.out, result,
                   make_provenance(sub, "calibrate", {{"scores", args.scores}}));
  return 0;
}

int run_evaluate(const CLI::App* sub, const EvaluateArgs& args) {
  const ScoreMapSet set = read_container(args.scores);
  std::vector<std::pair<std::string, std::string>> inputs = {
      {"scores", args.scores}};
  double lambda = args.lambda;
  if (!args.threshold.empty()) {
    lambda = load_calibration(args.threshold).lambda_hat;
    inputs.push_back({"threshold", args.threshold});
  }

  MetricsReport report = point_metrics(set, lambda);
  report.auroc.value = auroc(set);
  report.auprc.value = auprc(set);
  if (args.bootstrap > 0) {
    BootstrapSpec spec;
    spec.resamples = args.bootstrap;
    spec.confidence = args.confidence;
    spec.seed = args.seed;
    const MetricsReport resampled =
        bootstrap_report(set, lambda, spec, args.threads);
    report.coverage.ci = resampled.coverage.ci;
    report.fnr.ci = resampled.fnr.ci;
    report.set_size.ci = resampled.set_size.ci;
    report.auroc.ci = resampled.auroc.ci;
    report.auprc.ci = resampled.auprc.ci;
    report.precision.ci = resampled.precision.ci;
    report.f1.ci = resampled.f1.ci;
    report.iou.ci = resampled.iou.ci;
  }
  report.validate();
  save_metrics_report(args.out, lambda, report,
                      make_provenance(sub, "evaluate", inputs));
  return 0;
}

int run_sweep(const CLI::App* sub, const SweepArgs& args) {
  (void)sub;
  const ScoreMapSet set = read_container(args.scores);
  const std::vector<double> grid = parse_grid(args.grid);
  write_sweep_csv(fnr_sweep(set, grid), args.out);
  return 0;
}

int run_threeway(const CLI::App* sub, const ThreeWayArgs& args) {
  const ScoreMapSet set = read_container(args.scores);
  const ZoneThresholds zones =
      calibrate_three_way(set, CostSpec(args.c_fn, args.c_fp), args.alpha_cw,
                          ShiftInterval(args.rho_lo, args.rho_hi));
  save_zone_thresholds(
      args.out, zones,
      make_provenance(sub, "threeway", {{"scores", args.scores}}));
  return 0;
}

int run_apply(const CLI::App* sub, const ApplyArgs& args) {
  const ScoreMapSet set = read_container(args.scores);
  const ZoneThresholds zones = load_zone_thresholds(args.zones);
  const ZoneAssignment assignment = assign_zones(set, zones);
  write_zone_container(assignment.maps, args.out);
  const std::string report_path =
      args.report.empty() ? args.out + ".report.json" : args.report;
  save_zone_report(report_path, zones, assignment.report,
                   make_provenance(sub, "apply",
                                   {{"scores", args.scores},
                                    {"zones", args.zones}}));
  return 0;
}

int run_simulate(const CLI::App* sub, const SimulateArgs& args) {
  const BiNormalModel model = model_from_auroc(args.auroc, args.prevalence);
  const ScoreMapSet set = generate(model, args.images, args.height,
                                   args.width, args.seed, args.latent_offset);
  write_container(set, args.out);
  const Provenance prov = make_provenance(sub, "simulate", {});
  std::vector<InputDigest> outputs = {
      {"container", args.out, fnv1a64_digest(args.out)}};
  std::cout << render_split_summary(outputs, {set.size()}, prov);
  return 0;
}

int run_mc_check(const CLI::App* sub, const McArgs& args) {
  const BiNormalModel model = model_from_auroc(args.auroc, args.prevalence);
  McConfig config;
  config.n_cal_pixels = args.cal_pixels;
  config.n_test_pixels = args.test_pixels;
  config.trials = args.trials;
  config.seed = args.seed;
  config.threads = args.threads;
  config.latent_offset = args.latent_offset;

  McResult result;
  KeyValues extras;
  std::string criterion;
  bool passed = false;

  if (args.mode == "fnr") {
    result = mc_fnr_guarantee(model, args.alpha, config);
    const double bound =
        args.alpha +
        2.0 * result.std_risk / std::sqrt(static_cast<double>(result.trials));
    passed = result.mean_risk <= bound;
    criterion = "mean_risk <= alpha + 2*std/sqrt(trials)";
    extras = {{"alpha", args.alpha}, {"bound", bound}};
  } else if (args.mode == "setsize") {
    const SetSizeCheck check = mc_set_size(model, args.alpha, config);
    result.trials = check.trials;
    result.mean_risk = check.mc_mean;
    result.std_risk = check.mc_std;
    const double rel =
        std::fabs(check.mc_mean - check.closed_form) / check.closed_form;
    result.violation_fraction = 0.0;
    passed = rel <= args.tol;
    criterion = "|mc_mean - closed_form| / closed_form <= tol";
    extras = {{"closed_form", check.closed_form},
              {"relative_error", rel},
              {"tol", args.tol}};
  } else if (args.mode == "threeway") {
    ThreeWayMcConfig tw;
    tw.base = config;
    if (args.rho_test_given) tw.rho_test = args.rho_test;
    const ThreeWayMcResult check =
        mc_threeway_check(model, CostSpec(args.c_fn, args.c_fp), args.alpha_cw,
                          ShiftInterval(args.rho_lo, args.rho_hi), tw);
    result = check.risk;
    passed = check.risk.violation_fraction <= args.max_violation &&
             (check.risk.trials == check.undecided_trials ||
              check.risk.mean_risk <= check.mean_bound);
    criterion =
        "violation_fraction <= max_violation and mean_risk <= mean_bound";
    extras = {{"mean_bound", check.mean_bound},
              {"max_violation", args.max_violation},
              {"frac_lambda_min_zero", check.frac_lambda_min_zero},
              {"frac_safe_zero", check.frac_safe_zero},
              {"mean_safe_fraction", check.mean_safe_fraction},
              {"mean_monitor_fraction", check.mean_monitor_fraction},
              {"mean_lambda_base", check.mean_lambda_base},
              {"undecided_trials",
               static_cast<double>(check.undecided_trials)}};
  } else {
    throw Error(Errc::InvalidArgument,
                "mc-check mode must be fnr, setsize, or threeway");
  }

  const std::string text = render_mc_result(
      args.mode, result, extras, passed, criterion,
      make_provenance(sub, "mc-check", {}));
  std::cout << text;
  if (!args.out.empty()) write_text_file(args.out, text);
  if (!passed) {
    std::cerr << "mc-check: asserted bound failed\n";
    return 3;
  }
  return 0;
}

int run_split(const CLI::App* sub, const SplitArgs& args) {
  const ScoreMapSet set = read_container(args.scores);
  SplitSpec spec;
  spec.seed = args.seed;
  spec.ratios = parse_ratios(args.ratios);
  const auto parts = split(set, spec);

  const char* part_roles[3] = {"train", "calibration", "test"};
  std::vector<InputDigest> outputs;
  std::vector<std::size_t> sizes;
  for (int i = 0; i < 3; ++i) {
    const std::string path =
        args.out_prefix + "." + part_roles[i] + ".crcs";
    if (parts[i].empty()) {
      sizes.push_back(0);
      outputs.push_back({part_roles[i], "", ""});
      continue;
    }
    write_container(parts[i], path);
    sizes.push_back(parts[i].size());
    outputs.push_back({part_roles[i], path, fnv1a64_digest(path)});
  }
  std::cout << render_split_summary(
      outputs, sizes, make_provenance(sub, "split", {{"scores", args.scores}}));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distribution-free risk control for pixel-level score maps"};
  app.require_subcommand(1);
  const auto formatter = std::make_shared<JsonConfig>();

  const auto add_config = [&](CLI::App* sub) {
    sub->set_config("--config", "",
                    "JSON file with default parameter values (flags win)");
    sub->config_formatter(formatter);
  };

  CalibrateArgs cal;
  CLI::App* cmd_calibrate =
      app.add_subcommand("calibrate", "Select an FNR-controlling threshold");
  add_config(cmd_calibrate);
  cmd_calibrate->add_option("--scores", cal.scores, "input score container")
      ->required();
  cmd_calibrate->add_option("--alpha", cal.alpha, "target FNR level")
      ->capture_default_str();
  cmd_calibrate->add_option("--out", cal.out, "output threshold file")
      ->required();

  EvaluateArgs eval;
  CLI::App* cmd_evaluate =
      app.add_subcommand("evaluate", "Metric suite at a threshold");
  add_config(cmd_evaluate);
  cmd_evaluate->add_option("--scores", eval.scores, "input score container")
      ->required();
  CLI::Option* opt_threshold = cmd_evaluate->add_option(
      "--threshold", eval.threshold, "threshold file from calibrate");
  CLI::Option* opt_lambda =
      cmd_evaluate->add_option("--lambda", eval.lambda, "explicit threshold");
  opt_threshold->excludes(opt_lambda);
  cmd_evaluate
      ->add_option("--bootstrap", eval.bootstrap,
                   "bootstrap resamples (0 = no intervals)")
      ->capture_default_str();
  cmd_evaluate
      ->add_option("--confidence", eval.confidence, "interval confidence")
      ->capture_default_str();
  cmd_evaluate->add_option("--seed", eval.seed, "bootstrap seed")
      ->capture_default_str();
  cmd_evaluate->add_option("--threads", eval.threads, "worker threads (0 = auto)")
      ->capture_default_str();
  cmd_evaluate->add_option("--out", eval.out, "output report file")->required();

  SweepArgs sweep_args;
  CLI::App* cmd_sweep =
      app.add_subcommand("sweep", "FNR/set-size curve over a threshold grid");
  add_config(cmd_sweep);
  cmd_sweep->add_option("--scores", sweep_args.scores, "input score container")
      ->required();
  cmd_sweep
      ->add_option("--grid", sweep_args.grid, "inclusive grid start:stop:step")
      ->required();
  cmd_sweep->add_option("--out", sweep_args.out, "output CSV")->required();

  ThreeWayArgs tw;
  CLI::App* cmd_threeway = app.add_subcommand(
      "threeway", "Shift-aware SAFE/MONITOR/EVACUATE calibration");
  add_config(cmd_threeway);
  cmd_threeway->add_option("--scores", tw.scores, "calibration container")
      ->required();
  cmd_threeway->add_option("--alpha-cw", tw.alpha_cw, "cost-weighted level")
      ->capture_default_str();
  cmd_threeway->add_option("--cfn", tw.c_fn, "false-negative cost")
      ->capture_default_str();
  cmd_threeway->add_option("--cfp", tw.c_fp, "false-positive cost")
      ->capture_default_str();
  cmd_threeway->add_option("--rho-lo", tw.rho_lo, "prevalence ratio lower end")
      ->capture_default_str();
  cmd_threeway->add_option("--rho-hi", tw.rho_hi, "prevalence ratio upper end")
      ->capture_default_str();
  cmd_threeway->add_option("--out", tw.out, "output zones file")->required();

  ApplyArgs apply_args;
  CLI::App* cmd_apply =
      app.add_subcommand("apply", "Assign zones and report decided risk");
  add_config(cmd_apply);
  cmd_apply->add_option("--scores", apply_args.scores, "input score container")
      ->required();
  cmd_apply->add_option("--zones", apply_args.zones, "zones file from threeway")
      ->required();
  cmd_apply->add_option("--out", apply_args.out, "output zone container")
      ->required();
  cmd_apply->add_option("--report", apply_args.report,
                        "output report (default <out>.report.json)");

  SimulateArgs sim;
  CLI::App* cmd_simulate =
      app.add_subcommand("simulate", "Generate a bi-normal synthetic container");
  add_config(cmd_simulate);
  cmd_simulate->add_option("--auroc", sim.auroc, "target AUROC in [0.5, 1)")
      ->capture_default_str();
  cmd_simulate
      ->add_option("--prevalence", sim.prevalence, "positive-class fraction")
      ->capture_default_str();
  cmd_simulate->add_option("--images", sim.images, "image count")
      ->capture_default_str();
  cmd_simulate->add_option("--height", sim.height, "image height")
      ->capture_default_str();
  cmd_simulate->add_option("--width", sim.width, "image width")
      ->capture_default_str();
  cmd_simulate->add_option("--seed", sim.seed, "generator seed")
      ->capture_default_str();
  cmd_simulate
      ->add_option("--latent-offset", sim.latent_offset,
                   "latent shift applied to both classes")
      ->capture_default_str();
  cmd_simulate->add_option("--out", sim.out, "output container")->required();

  McArgs mc;
  CLI::App* cmd_mc = app.add_subcommand(
      "mc-check", "Monte-Carlo verification of the statistical guarantees");
  add_config(cmd_mc);
  cmd_mc->add_option("mode", mc.mode, "fnr | setsize | threeway")->required();
  cmd_mc->add_option("--auroc", mc.auroc, "model AUROC")->capture_default_str();
  cmd_mc->add_option("--prevalence", mc.prevalence, "model prevalence")
      ->capture_default_str();
  cmd_mc->add_option("--alpha", mc.alpha, "risk level under test")
      ->capture_default_str();
  cmd_mc->add_option("--trials", mc.trials, "Monte-Carlo trials")
      ->capture_default_str();
  cmd_mc->add_option("--cal-pixels", mc.cal_pixels, "calibration pixels/trial")
      ->capture_default_str();
  cmd_mc->add_option("--test-pixels", mc.test_pixels, "test pixels/trial")
      ->capture_default_str();
  cmd_mc->add_option("--seed", mc.seed, "trial seed")->capture_default_str();
  cmd_mc->add_option("--threads", mc.threads, "worker threads (0 = auto)")
      ->capture_default_str();
  cmd_mc
      ->add_option("--latent-offset", mc.latent_offset,
                   "latent shift for score concentration")
      ->capture_default_str();
  cmd_mc->add_option("--tol", mc.tol, "setsize: relative tolerance")
      ->capture_default_str();
  cmd_mc->add_option("--alpha-cw", mc.alpha_cw, "threeway: cost-weighted level")
      ->capture_default_str();
  cmd_mc->add_option("--cfn", mc.c_fn, "threeway: false-negative cost")
      ->capture_default_str();
  cmd_mc->add_option("--cfp", mc.c_fp, "threeway: false-positive cost")
      ->capture_default_str();
  cmd_mc->add_option("--rho-lo", mc.rho_lo, "threeway: shift interval low")
      ->capture_default_str();
  cmd_mc->add_option("--rho-hi", mc.rho_hi, "threeway: shift interval high")
      ->capture_default_str();
  CLI::Option* opt_rho_test = cmd_mc->add_option(
      "--rho-test", mc.rho_test,
      "threeway: fixed deployment ratio (default: drawn inside interval)");
  cmd_mc
      ->add_option("--max-violation", mc.max_violation,
                   "threeway: allowed per-trial violation fraction")
      ->capture_default_str();
  cmd_mc->add_option("--out", mc.out, "also write the result JSON here");

  SplitArgs sp;
  CLI::App* cmd_split = app.add_subcommand(
      "split", "Deterministic train/calibration/test partition");
  add_config(cmd_split);
  cmd_split->add_option("--scores", sp.scores, "input score container")
      ->required();
  cmd_split->add_option("--seed", sp.seed, "shuffle seed")
      ->capture_default_str();
  cmd_split->add_option("--ratios", sp.ratios, "partition ratios a,b,c")
      ->capture_default_str();
  cmd_split->add_option("--out-prefix", sp.out_prefix, "output path prefix")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand(cmd_calibrate)) return run_calibrate(cmd_calibrate, cal);
    if (app.got_subcommand(cmd_evaluate)) {
      eval.lambda_given = opt_lambda->count() > 0;
      require(eval.lambda_given || !eval.threshold.empty(),
              Errc::InvalidArgument,
              "evaluate needs --threshold or --lambda");
      return run_evaluate(cmd_evaluate, eval);
    }
    if (app.got_subcommand(cmd_sweep)) return run_sweep(cmd_sweep, sweep_args);
    if (app.got_subcommand(cmd_threeway)) return run_threeway(cmd_threeway, tw);
    if (app.got_subcommand(cmd_apply)) return run_apply(cmd_apply, apply_args);
    if (app.got_subcommand(cmd_simulate)) return run_simulate(cmd_simulate, sim);
    if (app.got_subcommand(cmd_mc)) {
      mc.rho_test_given = opt_rho_test->count() > 0;
      return run_mc_check(cmd_mc, mc);
    }
    if (app.got_subcommand(cmd_split)) return run_split(cmd_split, sp);
  } catch (const Error& e) {
    std::cerr << "crcmap: " << e.what() << "\n";
    return exit_class(e.code());
  } catch (const std::exception& e) {
    std::cerr << "crcmap: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
