#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "rhoflow/bayes.hpp"
#include "rhoflow/causal.hpp"
#include "rhoflow/io.hpp"
#include "rhoflow/plot.hpp"
#include "rhoflow/simgen.hpp"
#include "rhoflow/training.hpp"

namespace rhoflow::cli {

namespace fs = std::filesystem;

int exit_code(ErrorCategory category) noexcept {
  switch (category) {
    case ErrorCategory::usage:
      return kExitUsage;
    case ErrorCategory::data:
      return kExitData;
    case ErrorCategory::numeric:
      return kExitNumeric;
    case ErrorCategory::io:
      return kExitIo;
  }
  return kExitInternal;
}

namespace {

double parse_real(std::string_view text, std::string_view what) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v)) {
    throw DomainError("cannot parse " + std::string(what) + " value '" + std::string(text) + "'");
  }
  return v;
}

std::vector<double> parse_list(std::string_view text, std::string_view what) {
  std::vector<double> values;
  std::size_t start = 0;
  while (true) {
    const auto comma = text.find(',', start);
    values.push_back(parse_real(text.substr(start, comma - start), what));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return values;
}

std::vector<double> parse_grid(const std::string& text, std::size_t min_size) {
  std::vector<double> grid;
  if (text == "default11") {
    grid = default_curve_grid();
  } else if (text == "default41") {
    grid = default_bayes_grid();
  } else {
    grid = parse_list(text, "grid");
  }
  validate_grid(grid, -0.99, 0.99, min_size);
  return grid;
}

std::string fmt(double v) { return format_double(v); }

// State shared by all subcommands.
struct Options {
  std::optional<std::uint64_t> seed;
  std::string manifest;
  std::string data;
  std::string a_kind = "continuous";
  std::string y_kind = "continuous";
  std::string config;
  std::optional<std::size_t> epochs;
  std::optional<double> lr;
  std::optional<std::size_t> batch;
  std::optional<std::size_t> patience;
  std::optional<double> roughness;
  unsigned jobs = 1;
  std::string out;
  std::string csv;
  std::string plot;
  std::string grid;
  std::optional<double> a1;
  std::optional<double> a0;

  // simulate
  std::string scm;
  std::size_t n = 50000;
  // fit
  std::optional<double> rho;
  std::string history;
  // bayes
  std::string prior = "uniform";
  std::string quantity = "ace";
  double level = 0.95;
  double threshold = 0.0;
  std::string curve;
  // report
  std::string posterior;
  std::string out_dir;
};

class Context {
 public:
  Context(std::string command, std::vector<std::string> args, const Options& opt, std::ostream& out)
      : opt_(opt), out_(out) {
    manifest_.command = std::move(command);
    manifest_.argv = std::move(args);
    manifest_.tool_version = library_version();
  }

  const Options& opt() const { return opt_; }
  std::ostream& out() { return out_; }

  std::uint64_t seed() {
    if (!seed_) {
      seed_ = resolve_seed(opt_.seed);
      if (!opt_.seed) {
        manifest_.argv.push_back("--seed");
        manifest_.argv.push_back(std::to_string(*seed_));
      }
      manifest_.seeds.push_back(*seed_);
    }
    return *seed_;
  }

  void input(const std::string& path) {
    manifest_.input_hashes.emplace_back(path, sha256_file(path));
  }
  void output(const std::string& path) { manifest_.outputs.push_back(path); }
  void config(const std::string& key, const std::string& value) { manifest_.config[key] = value; }

  ObservationalDataset dataset() {
    if (opt_.data.empty()) throw DomainError("--data is required");
    const auto a_kind = VariableKind::parse(opt_.a_kind);
    const auto y_kind = VariableKind::parse(opt_.y_kind);
    config("a_kind", a_kind.to_string());
    config("y_kind", y_kind.to_string());
    auto ds = load_dataset(opt_.data, a_kind, y_kind);
    input(opt_.data);
    return ds;
  }

  TrainConfig train_config() {
    TrainConfig cfg;
    cfg.seed = opt_.seed ? 0 : resolve_seed(std::nullopt);
    if (!opt_.config.empty()) {
      input(opt_.config);
      cfg = load_train_config(opt_.config, cfg);
    }
    if (opt_.seed) cfg.seed = *opt_.seed;
    if (!seed_) {
      seed_ = cfg.seed;
      if (!opt_.seed) {
        manifest_.argv.push_back("--seed");
        manifest_.argv.push_back(std::to_string(cfg.seed));
      }
      manifest_.seeds.push_back(cfg.seed);
    }
    if (opt_.epochs) cfg.max_epochs = *opt_.epochs;
    if (opt_.lr) cfg.learning_rate = *opt_.lr;
    if (opt_.batch) cfg.batch_size = *opt_.batch;
    if (opt_.patience) cfg.patience = *opt_.patience;
    if (opt_.roughness) cfg.roughness = *opt_.roughness;
    cfg.validate();
    config("train_config", train_config_to_json(cfg));
    return cfg;
  }

  void finish(const std::string& default_manifest) {
    seed();  // commands without randomness still record the seed they ran under
    const std::string path = opt_.manifest.empty() ? default_manifest : opt_.manifest;
    manifest_.outputs.push_back(path);
    save_manifest(manifest_, path);
  }

 private:
  const Options& opt_;
  std::ostream& out_;
  RunManifest manifest_;
  std::optional<std::uint64_t> seed_;
};

std::string manifest_for(const std::string& out, const std::string& command) {
  return out.empty() ? "rhoflow-" + command + ".manifest.json" : out + ".manifest.json";
}

void require(const std::string& value, const char* flag) {
  if (value.empty()) throw DomainError(std::string(flag) + " is required");
}

// ------------------------------------------------------------------ commands

void cmd_simulate(Context& ctx) {
  const auto& o = ctx.opt();
  require(o.scm, "--scm");
  require(o.out, "--out");
  if (o.n < 2) throw DomainError("--n must be at least 2");
  const auto seed = ctx.seed();
  const auto colon = o.scm.find(':');
  const std::string family = o.scm.substr(0, colon);
  const std::string arg = colon == std::string::npos ? std::string() : o.scm.substr(colon + 1);
  ObservationalDataset ds;
  if (family == "table1" || family == "linear") {
    LinearScmSpec spec;
    if (family == "table1") {
      spec = table1_scm(static_cast<int>(parse_real(arg, "--scm table1 index")));
    } else {
      const auto v = parse_list(arg, "--scm linear");
      if (v.size() != 3) throw DomainError("--scm linear:ALPHA,BETA,DELTA needs three values");
      spec = {v[0], v[1], v[2]};
      spec.validate();
    }
    const auto stats = linear_scm_stats(spec);
    ds = sample_linear_scm(spec, o.n, seed);
    ctx.out() << "rho_p_obs " << fmt(stats.rho_p_obs) << "\nrho_true " << fmt(stats.rho_true)
              << "\nace_true " << fmt(stats.ace_true) << '\n';
    ctx.config("ace_true", fmt(stats.ace_true));
  } else if (family == "binary") {
    const double k = parse_real(arg, "--scm binary index");
    if (!(k >= 1.0) || k != std::floor(k)) throw DomainError("--scm binary:K needs K >= 1");
    const auto spec = binary_suite_scm(kBinarySuiteSeed, static_cast<std::size_t>(k) - 1);
    auto sample = sample_binary_scm(spec, o.n, seed);
    ds = std::move(sample.dataset);
    ctx.out() << "ace_true " << fmt(sample.ace_true) << "\nkinds a=binary y=binary\n";
    ctx.config("ace_true", fmt(sample.ace_true));
  } else {
    throw DomainError("unknown --scm '" + o.scm + "' (expected table1:K, binary:K or linear:A,B,D)");
  }
  ctx.config("scm", o.scm);
  ctx.config("n", std::to_string(o.n));
  save_dataset(ds, o.out);
  ctx.output(o.out);
  ctx.finish(manifest_for(o.out, "simulate"));
}

// Only a binary treatment has natural levels.
TreatmentLevels treatment_levels(Context& ctx, const ObservationalDataset& ds) {
  const auto& o = ctx.opt();
  if (!o.a1 != !o.a0) throw DomainError("--a1 and --a0 must be given together");
  TreatmentLevels levels{1.0, 0.0};
  if (o.a1) {
    levels = {*o.a1, *o.a0};
  } else if (!ds.a_kind.is_binary()) {
    throw DomainError("--a1 and --a0 are required unless the treatment is binary");
  }
  if (levels.treated == levels.control) throw DomainError("--a1 and --a0 must differ");
  ctx.config("a1", fmt(levels.treated));
  ctx.config("a0", fmt(levels.control));
  return levels;
}

void cmd_fit(Context& ctx) {
  const auto& o = ctx.opt();
  require(o.out, "--out");
  if (!o.rho) throw DomainError("--rho is required");
  const auto ds = ctx.dataset();
  const auto levels = treatment_levels(ctx, ds);
  const auto cfg = ctx.train_config();
  ctx.config("rho", fmt(*o.rho));
  const auto result = fit(ds, CopulaCorrelation(*o.rho), cfg);
  save_model(result.model, o.out);
  ctx.output(o.out);
  if (!o.history.empty()) {
    std::string text = "epoch,train_nll,val_nll,val_objective\n";
    for (const auto& e : result.report.nll_history) {
      text += std::to_string(e.epoch) + ',' + fmt(e.train_nll) + ',' + fmt(e.val_nll) + ',' +
              fmt(e.val_objective) + '\n';
    }
    write_text_file(o.history, text);
    ctx.output(o.history);
  }
  const auto est = estimate_ace(result.model, ds, levels, cfg.seed);
  ctx.out() << "epochs " << result.report.epochs_run << "\nbest_epoch " << result.report.best_epoch
            << "\nval_nll " << fmt(result.report.final_val_nll) << "\nace " << fmt(est.ace) << '\n';
  if (est.quantized_ace) ctx.out() << "quantized_ace " << fmt(*est.quantized_ace) << '\n';
  ctx.finish(manifest_for(o.out, "fit"));
}

RhoCurve train_curve(Context& ctx, const ObservationalDataset& ds, const std::vector<double>& grid,
                     TrainConfig& cfg) {
  const auto& o = ctx.opt();
  if (o.jobs == 0) throw DomainError("--jobs must be positive");
  const auto levels = treatment_levels(ctx, ds);
  ctx.config("jobs", std::to_string(o.jobs));
  return rho_curve(ds, grid, cfg, levels, o.jobs);
}

void cmd_curve(Context& ctx) {
  const auto& o = ctx.opt();
  require(o.out, "--out");
  const auto grid = parse_grid(o.grid.empty() ? "default11" : o.grid, 2);
  const auto ds = ctx.dataset();
  auto cfg = ctx.train_config();
  ctx.config("grid", o.grid.empty() ? "default11" : o.grid);
  const auto curve = train_curve(ctx, ds, grid, cfg);
  save_curve_json(curve, cfg, o.out);
  ctx.output(o.out);
  if (!o.csv.empty()) {
    save_curve_csv(curve, o.csv);
    ctx.output(o.csv);
  }
  if (!o.plot.empty()) {
    const auto [csv, svg] = emit_curve_plot(curve, o.plot);
    ctx.output(csv.string());
    ctx.output(svg.string());
  }
  for (const auto& p : curve.points) {
    ctx.out() << "rho " << std::setw(6) << fmt(p.rho) << "  ace " << fmt(p.ace);
    if (p.quantized_ace) ctx.out() << "  quantized " << fmt(*p.quantized_ace);
    ctx.out() << '\n';
  }
  ctx.out() << "rho_value " << fmt(curve.rho_value) << "\ninf_ace " << fmt(curve.inf_ace)
            << "\nsup_ace " << fmt(curve.sup_ace) << '\n';
  if (curve.af_bounds) {
    ctx.out() << "af_bounds " << fmt(curve.af_bounds->lower) << ' ' << fmt(curve.af_bounds->upper)
              << '\n';
  }
  ctx.finish(manifest_for(o.out, "curve"));
}

void cmd_value(Context& ctx) {
  const auto& o = ctx.opt();
  const auto ds = ctx.dataset();
  const double rs = spearman(ds.a, ds.y);
  const double rv = rho_value(ds);
  ctx.out() << "spearman " << fmt(rs) << "\nrho_value " << fmt(rv) << '\n';
  if (!o.out.empty()) {
    write_text_file(o.out, "{\n  \"spearman\": " + fmt(rs) + ",\n  \"rho_value\": " + fmt(rv) + "\n}\n");
    ctx.output(o.out);
  }
  ctx.finish(manifest_for(o.out, "value"));
}

void cmd_bounds(Context& ctx) {
  const auto& o = ctx.opt();
  const auto ds = ctx.dataset();
  if (!ds.a_kind.is_binary() || !ds.y_kind.is_binary()) {
    throw DomainError("bounds needs --a-kind binary --y-kind binary");
  }
  const auto b = af_bounds(ds);
  ctx.out() << "af_lower " << fmt(b.lower) << "\naf_upper " << fmt(b.upper) << '\n';
  if (!o.out.empty()) {
    write_text_file(o.out,
                    "{\n  \"lower\": " + fmt(b.lower) + ",\n  \"upper\": " + fmt(b.upper) + "\n}\n");
    ctx.output(o.out);
  }
  ctx.finish(manifest_for(o.out, "bounds"));
}

void cmd_bayes(Context& ctx) {
  const auto& o = ctx.opt();
  require(o.out, "--out");
  const auto prior = RhoPrior::parse(o.prior);
  if (o.quantity != "ace" && o.quantity != "ey1" && o.quantity != "ey0") {
    throw DomainError("--quantity must be ace, ey1 or ey0");
  }
  if (!(o.level > 0.0 && o.level < 1.0)) throw DomainError("--level must lie in (0, 1)");
  if (!o.curve.empty() && !o.data.empty()) {
    throw DomainError("--curve and --data are mutually exclusive");
  }
  RhoCurve curve;
  if (!o.curve.empty()) {
    if (!o.grid.empty()) throw DomainError("--grid cannot be combined with --curve");
    ctx.input(o.curve);
    curve = load_curve(o.curve);
  } else {
    const auto grid = parse_grid(o.grid.empty() ? "default41" : o.grid, 2);
    ctx.config("grid", o.grid.empty() ? "default41" : o.grid);
    const auto ds = ctx.dataset();
    auto cfg = ctx.train_config();
    curve = train_curve(ctx, ds, grid, cfg);
  }
  GridEvaluation eval;
  for (const auto& p : curve.points) {
    eval.grid.push_back(p.rho);
    eval.q_values.push_back(o.quantity == "ace" ? p.ace : o.quantity == "ey1" ? p.mean_y1 : p.mean_y0);
  }
  ctx.config("prior", prior.to_string());
  ctx.config("quantity", o.quantity);
  ctx.config("level", fmt(o.level));
  ctx.config("threshold", fmt(o.threshold));
  const auto summary = summarize_posterior(eval, prior, o.quantity, o.level, o.threshold);
  save_posterior_json(summary, o.out);
  ctx.output(o.out);
  if (!o.csv.empty()) {
    save_posterior_csv(summary, o.csv);
    ctx.output(o.csv);
  }
  if (!o.plot.empty()) {
    const auto [csv, svg] = emit_posterior_plot(summary, o.plot);
    ctx.output(csv.string());
    ctx.output(svg.string());
  }
  ctx.out() << "posterior_mean " << fmt(summary.posterior.mean()) << "\ncredible_interval "
            << fmt(summary.interval.lo) << ' ' << fmt(summary.interval.hi) << "\nprob_greater "
            << fmt(summary.prob_greater) << '\n';
  ctx.finish(manifest_for(o.out, "bayes"));
}

void cmd_report(Context& ctx) {
  const auto& o = ctx.opt();
  require(o.out_dir, "--out-dir");
  if (o.curve.empty() && o.posterior.empty()) {
    throw DomainError("report needs --curve and/or --posterior");
  }
  std::error_code ec;
  fs::create_directories(o.out_dir, ec);
  if (ec) throw IoError("cannot create directory '" + o.out_dir + "'");
  const fs::path dir(o.out_dir);
  std::ostringstream summary;
  if (!o.curve.empty()) {
    ctx.input(o.curve);
    const auto curve = load_curve(o.curve);
    const auto [csv, svg] = emit_curve_plot(curve, dir / "curve");
    ctx.output(csv.string());
    ctx.output(svg.string());
    summary << "curve points " << curve.points.size() << "\nrho_value " << fmt(curve.rho_value)
            << "\ninf_ace " << fmt(curve.inf_ace) << "\nsup_ace " << fmt(curve.sup_ace) << '\n';
    if (curve.crossing_rho) summary << "crossing_rho " << fmt(*curve.crossing_rho) << '\n';
    if (curve.af_bounds) {
      summary << "af_bounds " << fmt(curve.af_bounds->lower) << ' ' << fmt(curve.af_bounds->upper)
              << '\n';
    }
  }
  if (!o.posterior.empty()) {
    ctx.input(o.posterior);
    const auto post = load_posterior(o.posterior);
    const auto [csv, svg] = emit_posterior_plot(post, dir / "posterior");
    ctx.output(csv.string());
    ctx.output(svg.string());
    const auto pmf = dir / "posterior_pmf.csv";
    save_pmf_csv(post, pmf);
    ctx.output(pmf.string());
    summary << "quantity " << post.quantity << "\nprior " << post.prior << "\nposterior_mean "
            << fmt(post.posterior.mean()) << "\ncredible_interval " << fmt(post.interval.lo) << ' '
            << fmt(post.interval.hi) << "\nprob_greater " << fmt(post.prob_greater) << '\n';
  }
  const auto summary_path = (dir / "summary.txt").string();
  write_text_file(summary_path, summary.str());
  ctx.output(summary_path);
  ctx.out() << summary.str();
  ctx.finish((dir / "manifest.json").string());
}

// --------------------------------------------------------------------- app

void add_seed(CLI::App* sub, Options& o) {
  sub->add_option("--seed", o.seed, "Base random seed (default: $RHOFLOW_SEED, else 0)");
  sub->add_option("--manifest", o.manifest, "Manifest path (default: <out>.manifest.json)");
}

void add_data(CLI::App* sub, Options& o) {
  sub->add_option("--data", o.data, "Dataset CSV with header a,y");
  sub->add_option("--a-kind", o.a_kind, "continuous | binary | categorical:K");
  sub->add_option("--y-kind", o.y_kind, "continuous | binary | categorical:K");
}

void add_training(CLI::App* sub, Options& o) {
  sub->add_option("--config", o.config, "Training config JSON");
  sub->add_option("--epochs", o.epochs, "Maximum epochs");
  sub->add_option("--lr", o.lr, "Learning rate");
  sub->add_option("--batch-size", o.batch, "Minibatch size");
  sub->add_option("--patience", o.patience, "Early-stopping patience");
  sub->add_option("--roughness", o.roughness, "Spline roughness penalty weight");
  sub->add_option("--a1", o.a1, "Treated level for do(A := a1), default 1 for a binary treatment");
  sub->add_option("--a0", o.a0, "Control level for do(A := a0), default 0 for a binary treatment");
}

int rerun(const std::string& manifest_path, std::ostream& out, std::ostream& err) {
  const auto m = load_manifest(manifest_path);
  if (m.tool_version != library_version()) {
    err << "warning: manifest written by version " << m.tool_version << ", running "
        << library_version() << '\n';
  }
  for (const auto& [path, hash] : m.input_hashes) {
    if (sha256_file(path) != hash) throw DataError("input '" + path + "' changed since the run");
  }
  return run(m.argv, out, err);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Causal effect sensitivity analysis with Gaussian-copula normalizing flows",
               "rhoflow"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(library_version()));
  Options o;
  std::string manifest_in;

  auto* simulate = app.add_subcommand("simulate", "Sample a synthetic dataset");
  simulate->add_option("--scm", o.scm, "table1:K | binary:K | linear:ALPHA,BETA,DELTA");
  simulate->add_option("--n", o.n, "Number of observations");
  simulate->add_option("--out", o.out, "Output CSV");
  add_seed(simulate, o);

  auto* fitc = app.add_subcommand("fit", "Train one flow at a fixed rho");
  add_data(fitc, o);
  add_training(fitc, o);
  add_seed(fitc, o);
  fitc->add_option("--rho", o.rho, "Copula correlation in [-0.99, 0.99]");
  fitc->add_option("--out", o.out, "Output model JSON");
  fitc->add_option("--history", o.history, "Optional per-epoch NLL CSV");

  auto* curve = app.add_subcommand("curve", "Estimate the ACE over a rho grid");
  add_data(curve, o);
  add_training(curve, o);
  add_seed(curve, o);
  curve->add_option("--grid", o.grid, "default11 | default41 | comma-separated values");
  curve->add_option("--jobs", o.jobs, "Grid points trained in parallel");
  curve->add_option("--out", o.out, "Output curve JSON");
  curve->add_option("--csv", o.csv, "Optional curve CSV");
  curve->add_option("--plot", o.plot, "Optional plot stem (writes STEM.csv, STEM.svg)");

  auto* value = app.add_subcommand("value", "Compute the rho-value");
  add_data(value, o);
  add_seed(value, o);
  value->add_option("--out", o.out, "Optional JSON output");

  auto* bounds = app.add_subcommand("bounds", "Assumption-free bounds for binary data");
  add_data(bounds, o);
  add_seed(bounds, o);
  bounds->add_option("--out", o.out, "Optional JSON output");

  auto* bayes = app.add_subcommand("bayes", "Posterior of a causal quantity under a rho prior");
  add_data(bayes, o);
  add_training(bayes, o);
  add_seed(bayes, o);
  bayes->add_option("--curve", o.curve, "Reuse a curve JSON instead of training");
  bayes->add_option("--grid", o.grid, "default11 | default41 | comma-separated values");
  bayes->add_option("--jobs", o.jobs, "Grid points trained in parallel");
  bayes->add_option("--prior", o.prior, "uniform | beta:ALPHA,BETA | truncnorm:MU,SIGMA");
  bayes->add_option("--quantity", o.quantity, "ace | ey1 | ey0");
  bayes->add_option("--level", o.level, "Credible level");
  bayes->add_option("--threshold", o.threshold, "Threshold for P(Q > threshold)");
  bayes->add_option("--out", o.out, "Output posterior JSON");
  bayes->add_option("--csv", o.csv, "Optional density CSV");
  bayes->add_option("--plot", o.plot, "Optional plot stem");

  auto* report = app.add_subcommand("report", "Plots and a summary from saved results");
  report->add_option("--curve", o.curve, "Curve JSON");
  report->add_option("--posterior", o.posterior, "Posterior JSON");
  report->add_option("--out-dir", o.out_dir, "Output directory");
  add_seed(report, o);

  auto* rerunc = app.add_subcommand("rerun", "Re-execute the command recorded in a manifest");
  rerunc->add_option("--manifest", manifest_in, "Manifest JSON")->required();

  const std::vector<std::pair<CLI::App*, std::function<void(Context&)>>> commands = {
      {simulate, cmd_simulate}, {fitc, cmd_fit},     {curve, cmd_curve},  {value, cmd_value},
      {bounds, cmd_bounds},     {bayes, cmd_bayes},  {report, cmd_report}};

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << library_version() << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\nRun with --help for usage.\n";
    return kExitUsage;
  }

  try {
    if (rerunc->parsed()) return rerun(manifest_in, out, err);
    for (const auto& [sub, handler] : commands) {
      if (!sub->parsed()) continue;
      Context ctx(sub->get_name(), args, o, out);
      handler(ctx);
      return kExitOk;
    }
    err << "usage error: no command given\n";
    return kExitUsage;
  } catch (const Error& e) {
    static constexpr const char* kNames[] = {"usage", "data", "numeric", "io"};
    err << kNames[static_cast<int>(e.category())] << " error: " << e.what() << '\n';
    return exit_code(e.category());
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
}

}  // namespace rhoflow::cli
