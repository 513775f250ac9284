// Command line front end: simulate, resample, rank, detect, draw, benchmark.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "trajfda/io/csv.hpp"
#include "trajfda/io/figures.hpp"
#include "trajfda/io/report.hpp"
#include "trajfda/io/svg.hpp"
#include "trajfda/trajfda.hpp"

namespace fs = std::filesystem;
using namespace trajfda;
using io::Json;

namespace {

struct Options {
  std::string input, output, labels, format = "auto";
  std::uint64_t seed = 0;

  // depth
  std::string method = "projection";
  int directions = 180;
  std::uint64_t max_triples = 200000;
  bool exact_msbd = false;

  // rules
  std::vector<double> alpha{0.975};
  double factor = 1.5;
  double quantile = 0.993;
  double h_fraction = 0.0;  // 0: default subset size
  int mcd_starts = 500;

  // simulation
  std::string model = "m1";
  std::size_t k = 0;
  bool contaminate = false;
  std::size_t replicates = 100;
  double noise_scale = 1.0;

  // gp-sample
  std::size_t n = 1000;
  MaternSpec matern;

  // ingest
  std::size_t target_k = 200;
  std::string lambda = "gcv";
  std::string align = "none";
};

depth::PointwiseDepthMethod depth_method(const Options& o) {
  if (o.method == "mahalanobis") return depth::PointwiseDepthMethod::mahalanobis();
  return depth::PointwiseDepthMethod::projection(o.directions);
}

MsbdConfig msbd_config(const Options& o) {
  MsbdConfig c;
  c.seed = RandomSeed{o.seed};
  if (o.exact_msbd) {
    c.max_triples.reset();
  } else {
    c.max_triples = o.max_triples;
  }
  return c;
}

DetectConfigs rule_configs(const Options& o, double alpha) {
  DetectConfigs c;
  c.wo.alpha = alpha;
  c.msbd.factor = o.factor;
  c.rmd.quantile = o.quantile;
  c.rmd.seed = RandomSeed{o.seed};
  c.rmd.n_starts = o.mcd_starts;
  if (o.h_fraction > 0.0) c.rmd.h_fraction = o.h_fraction;
  return c;
}

Json config_json(const Options& o, const std::string& command) {
  Json j;
  j["command"] = command;
  j["seed"] = o.seed;
  j["method"] = o.method;
  if (o.method == "projection") j["directions"] = o.directions;
  if (o.exact_msbd) {
    j["max_triples"] = nullptr;
  } else {
    j["max_triples"] = o.max_triples;
  }
  Json alphas = Json::array();
  for (double a : o.alpha) alphas.push_back(io::json_number(a));
  j["alpha"] = alphas;
  j["factor"] = io::json_number(o.factor);
  j["quantile"] = io::json_number(o.quantile);
  j["h_fraction"] = o.h_fraction > 0.0 ? io::json_number(o.h_fraction) : Json(nullptr);
  j["mcd_starts"] = o.mcd_starts;
  return j;
}

void emit(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    std::cout.flush();
    return;
  }
  io::write_file_atomic(path, content);
}

TrajectoryEnsemble load_ensemble(const Options& o) {
  if (o.input.empty()) throw Error(Errc::InvalidConfig, "--input is required");
  return io::to_ensemble(io::ingest_csv_file(o.input));
}

/// out.svg with alpha 0.95 becomes out_a0.95.svg when several alphas are drawn.
std::string per_alpha_path(const std::string& base, double alpha, bool several) {
  if (!several) return base;
  char tag[32];
  std::snprintf(tag, sizeof tag, "_a%g", alpha);
  fs::path p(base);
  return (p.parent_path() / (p.stem().string() + tag + p.extension().string())).string();
}

std::string resolved_format(const Options& o) {
  if (o.format != "auto") return o.format;
  return fs::path(o.output).extension() == ".svg" ? "svg" : "json";
}

void run_simulate(const Options& o) {
  ModelSpec spec;
  spec.model = parse_model(o.model);
  spec.k = o.k;
  spec.seed = RandomSeed{o.seed};
  spec.contaminate = o.contaminate;
  spec.options.noise_scale = o.noise_scale;
  spec.validate();
  const auto sim = generate(spec);
  std::ostringstream csv;
  io::write_csv(csv, io::to_table(sim.ensemble));
  emit(o.output, csv.str());
  std::string labels = o.labels;
  if (labels.empty() && !o.output.empty() && o.output != "-") labels = o.output + ".labels";
  if (!labels.empty()) {
    std::ostringstream lab;
    io::write_labels(lab, sim.ensemble, sim.outlier);
    io::write_file_atomic(labels, lab.str());
  }
}

void run_gp_sample(const Options& o) {
  MaternSpec spec = o.matern;
  spec.k = o.k == 0 ? spec.k : o.k;
  spec.validate();
  if (o.n < 1) throw Error(Errc::InvalidConfig, "--n must be positive");
  const auto e = gp_sample(spec, o.n, RandomSeed{o.seed});
  std::ostringstream csv;
  io::write_csv(csv, io::to_table(e));
  emit(o.output, csv.str());
}

void run_ingest(const Options& o) {
  if (o.input.empty()) throw Error(Errc::InvalidConfig, "--input is required");
  const auto table = io::ingest_csv_file(o.input);
  SmoothingConfig cfg;
  cfg.target_k = o.target_k;
  if (o.lambda == "gcv") {
    cfg.lambda_mode = SmoothingConfig::Lambda::Gcv;
  } else {
    cfg.lambda_mode = SmoothingConfig::Lambda::Fixed;
    try {
      cfg.lambda = std::stod(o.lambda);
    } catch (const std::exception&) {
      throw Error(Errc::InvalidConfig, "--lambda must be 'gcv' or a positive number");
    }
  }
  cfg.align = o.align == "start" ? SmoothingConfig::Align::CommonStart : SmoothingConfig::Align::None;
  const auto e = smooth_resample(table.tracks, cfg);
  std::ostringstream csv;
  io::write_csv(csv, io::to_table(e, table.coordinate_names));
  emit(o.output, csv.str());
}

void run_rank(const Options& o) {
  const auto e = load_ensemble(o);
  const auto ranking = rank(e, msbd_config(o));
  const auto bands = assign_bands(ranking);
  emit(o.output, io::dump(io::report_json(config_json(o, "rank"), &ranking, nullptr, &bands)));
}

void run_detect(const Options& o) {
  if (o.alpha.size() != 1) throw Error(Errc::InvalidConfig, "detect takes a single --alpha");
  const auto e = load_ensemble(o);
  const auto profiles = profile_ensemble(e, depth_method(o));
  const auto ranking = rank(e, msbd_config(o));
  const auto report = detect_all(e, profiles, ranking, rule_configs(o, o.alpha.front()));
  emit(o.output, io::dump(io::report_json(config_json(o, "detect"), &ranking, &report, nullptr)));
}

BoxplotConfig boxplot_config(const Options& o, double alpha) {
  BoxplotConfig c;
  c.method = depth_method(o);
  c.rule.alpha = alpha;
  return c;
}

void run_boxplot(const Options& o) {
  const auto e = load_ensemble(o);
  const bool several = o.alpha.size() > 1;
  if (several && (o.output.empty() || o.output == "-")) {
    throw Error(Errc::InvalidConfig, "several alphas need an --output file name");
  }
  const std::string fmt = resolved_format(o);
  for (double alpha : o.alpha) {
    const auto box = build_boxplot(e, boxplot_config(o, alpha), msbd_config(o));
    const std::string path = per_alpha_path(o.output, alpha, several);
    if (fmt == "svg") {
      char title[64];
      std::snprintf(title, sizeof title, "alpha = %g", alpha);
      emit(path, io::emit_boxplot_svg(io::make_boxplot_figure(e, box), title));
    } else {
      Json cfg = config_json(o, "boxplot");
      cfg["alpha"] = io::json_number(alpha);
      emit(path, io::dump(io::report_json(cfg, &box.ranking, nullptr, &box.bands, box.outlier_ids)));
    }
  }
}

void run_msbdwo(const Options& o) {
  const auto e = load_ensemble(o);
  const bool several = o.alpha.size() > 1;
  if (several && (o.output.empty() || o.output == "-")) {
    throw Error(Errc::InvalidConfig, "several alphas need an --output file name");
  }
  const std::string fmt = resolved_format(o);
  const auto full = rank(e, msbd_config(o));
  for (double alpha : o.alpha) {
    const auto box = build_boxplot(e, boxplot_config(o, alpha), msbd_config(o));
    const auto fig = io::make_msbdwo_figure(e, box, full);
    const std::string path = per_alpha_path(o.output, alpha, several);
    emit(path, fmt == "svg" ? io::emit_msbdwo_svg(fig) : io::dump(io::msbdwo_json(fig)));
  }
}

void run_benchmark(const Options& o) {
  if (o.alpha.size() != 1) throw Error(Errc::InvalidConfig, "benchmark takes a single --alpha");
  ModelSpec spec;
  spec.model = parse_model(o.model);
  spec.k = o.k;
  spec.seed = RandomSeed{o.seed};
  spec.contaminate = true;
  spec.options.noise_scale = o.noise_scale;
  spec.validate();
  DetectorConfigs det;
  det.method = depth_method(o);
  det.msbd = msbd_config(o);
  det.rules = rule_configs(o, o.alpha.front());
  const auto result = benchmark(spec, o.replicates, det);
  std::cout << io::benchmark_table(model_name(spec.model), result);
  std::cout.flush();
  if (!o.output.empty()) {
    Json cfg = config_json(o, "benchmark");
    cfg["model"] = model_name(spec.model);
    cfg["k"] = spec.grid_size();
    emit(o.output, io::dump(io::benchmark_json(cfg, result)));
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Trajectory functional boxplots and outlier detection"};
  app.require_subcommand(1, 1);
  app.set_config("--config", "", "flat key = value file; command line flags win");
  Options o;

  app.add_option("-i,--input", o.input, "ensemble or raw track CSV");
  app.add_option("-o,--output", o.output, "output file (stdout when omitted)");
  app.add_option("--labels", o.labels, "label sidecar written by simulate (default <output>.labels)");
  app.add_option("--format", o.format, "json, svg or auto (from the output extension)")
      ->check(CLI::IsMember({"auto", "json", "svg"}));
  app.add_option("--seed", o.seed, "random seed");

  app.add_option("--method", o.method, "pointwise depth")->check(CLI::IsMember({"projection", "mahalanobis"}));
  app.add_option("--directions", o.directions, "projection directions")->check(CLI::Range(8, 100000));
  app.add_option("--max-triples", o.max_triples, "sample simplices above this count")->check(CLI::Range(100, 1 << 30));
  app.add_flag("--exact-msbd", o.exact_msbd, "always enumerate every simplex");

  app.add_option("--alpha", o.alpha, "WO cutoff level(s), comma separated")
      ->delimiter(',')
      ->check(CLI::Range(0.5, 1.0));
  app.add_option("--factor", o.factor, "MSBD central region inflation")->check(CLI::Range(1.0, 1e6));
  app.add_option("--quantile", o.quantile, "RMD F quantile")->check(CLI::Range(0.0, 1.0));
  app.add_option("--h-fraction", o.h_fraction, "MCD subset fraction (default (n+q+1)/2)");
  app.add_option("--mcd-starts", o.mcd_starts, "MCD random starts")->check(CLI::PositiveNumber);

  app.add_option("--model", o.model, "m1, m2, m3 or m4")->check(CLI::IsMember({"m1", "m2", "m3", "m4"}));
  app.add_option("--k", o.k, "grid size (0 = default)");
  app.add_flag("--contaminate", o.contaminate, "append the model's outliers");
  app.add_option("--replicates", o.replicates, "benchmark replicates")->check(CLI::Range(2, 1000000));
  app.add_option("--noise-scale", o.noise_scale, "multiplies every model noise sd")->check(CLI::NonNegativeNumber);

  app.add_option("--n", o.n, "number of GP samples");
  app.add_option("--sigma1", o.matern.sigma1);
  app.add_option("--sigma2", o.matern.sigma2);
  app.add_option("--alpha11", o.matern.alpha11);
  app.add_option("--alpha22", o.matern.alpha22);
  app.add_option("--alpha12", o.matern.alpha12);
  app.add_option("--nu11", o.matern.nu11);
  app.add_option("--nu22", o.matern.nu22);
  app.add_option("--nu12", o.matern.nu12);
  app.add_option("--rho12", o.matern.rho12);

  app.add_option("--target-k", o.target_k, "resampled grid size");
  app.add_option("--lambda", o.lambda, "gcv or a fixed smoothing parameter");
  app.add_option("--align", o.align, "none or start")->check(CLI::IsMember({"none", "start"}));

  const std::vector<std::pair<std::string, std::string>> commands{
      {"simulate", "write a model ensemble CSV and its label sidecar"},
      {"gp-sample", "write bivariate Matern GP samples as CSV"},
      {"ingest", "smooth and resample raw tracks onto a common grid"},
      {"rank", "MSBD ranking and central bands as JSON"},
      {"detect", "WO, MSBD and RMD outlier rules as JSON"},
      {"boxplot", "trajectory functional boxplot (SVG, or JSON bands)"},
      {"msbdwo", "MSBD-WO scatter (JSON or SVG)"},
      {"benchmark", "detection rates over simulated replicates"},
  };
  for (const auto& [name, help] : commands) app.add_subcommand(name, help)->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return 1;
  }

  const std::string cmd = app.get_subcommands().front()->get_name();
  try {
    if (cmd == "simulate") run_simulate(o);
    else if (cmd == "gp-sample") run_gp_sample(o);
    else if (cmd == "ingest") run_ingest(o);
    else if (cmd == "rank") run_rank(o);
    else if (cmd == "detect") run_detect(o);
    else if (cmd == "boxplot") run_boxplot(o);
    else if (cmd == "msbdwo") run_msbdwo(o);
    else if (cmd == "benchmark") run_benchmark(o);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.numerical() ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
