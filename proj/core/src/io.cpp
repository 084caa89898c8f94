#include "rhoflow/io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <system_error>

#include <openssl/evp.h>

#include "json.hpp"
#include "rhoflow/errors.hpp"

#ifndef RHOFLOW_VERSION
#define RHOFLOW_VERSION "0.0.0"
#endif

namespace rhoflow {

using nlohmann::json;

namespace {

json parse_json(std::string_view text, std::string_view what) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw DataError("malformed " + std::string(what) + " JSON: " + e.what());
  }
}

// Runs a JSON field extraction, mapping type errors onto DataError.
template <class F>
auto extract(std::string_view what, F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw DataError("invalid " + std::string(what) + " document: " + e.what());
  }
}

json finite(double v) {
  if (!std::isfinite(v)) throw NumericError("refusing to serialize a non-finite value");
  return v;
}

json finite_array(std::span<const double> values) {
  json arr = json::array();
  for (double v : values) arr.push_back(finite(v));
  return arr;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  return out;
}

std::string_view trim_cr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

double parse_field(std::string_view field, char column, std::size_t line) {
  if (field.empty()) {
    std::ostringstream os;
    os << "missing value in column " << column << " at line " << line;
    throw DataError(os.str());
  }
  double value = 0.0;
  const auto* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    std::ostringstream os;
    os << "cannot parse '" << field << "' in column " << column << " at line " << line;
    throw DataError(os.str());
  }
  if (!std::isfinite(value)) {
    std::ostringstream os;
    os << "non-finite value in column " << column << " at line " << line;
    throw DataError(os.str());
  }
  return value;
}

void check_schema(double v, const VariableKind& kind, char column, std::size_t line) {
  if (!kind.is_discrete()) return;
  if (v != std::floor(v) || v < 0.0 || v >= static_cast<double>(kind.cardinality())) {
    std::ostringstream os;
    os << "value " << format_double(v) << " in column " << column << " at line " << line
       << " violates schema " << kind.to_string();
    throw DataError(os.str());
  }
}

}  // namespace

const char* library_version() noexcept { return RHOFLOW_VERSION; }

std::string format_double(double value) {
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc()) throw NumericError("cannot format number");
  return std::string(buf.data(), ptr);
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream os;
  os << in.rdbuf();
  if (in.bad()) throw IoError("failed reading '" + path.string() + "'");
  return os.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  auto tmp = path;
  tmp += ".tmp";
  {
    auto out = open_output(tmp);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    out.flush();
    if (!out) throw IoError("failed writing '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot move output into place at '" + path.string() + "'");
  }
}

// ---------------------------------------------------------------- datasets

ObservationalDataset read_dataset_csv(std::istream& in, VariableKind a_kind, VariableKind y_kind,
                                      std::string name) {
  ObservationalDataset ds;
  ds.a_kind = a_kind;
  ds.y_kind = y_kind;
  ds.name = std::move(name);
  std::string line;
  if (!std::getline(in, line)) throw DataError("dataset is empty (expected header 'a,y')");
  std::string_view header = trim_cr(line);
  if (header.starts_with("\xEF\xBB\xBF")) header.remove_prefix(3);
  if (header != "a,y") {
    throw DataError("line 1: expected header 'a,y', found '" + std::string(header) + "'");
  }
  std::size_t line_no = 1;
  std::size_t blank_line = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view row = trim_cr(line);
    if (row.empty()) {
      if (blank_line == 0) blank_line = line_no;
      continue;
    }
    if (blank_line != 0) {
      std::ostringstream os;
      os << "missing values at line " << blank_line << " (blank line)";
      throw DataError(os.str());
    }
    const auto comma = row.find(',');
    if (comma == std::string_view::npos || row.find(',', comma + 1) != std::string_view::npos) {
      std::ostringstream os;
      os << "line " << line_no << ": expected exactly two comma-separated fields";
      throw DataError(os.str());
    }
    const double a = parse_field(row.substr(0, comma), 'a', line_no);
    const double y = parse_field(row.substr(comma + 1), 'y', line_no);
    check_schema(a, a_kind, 'a', line_no);
    check_schema(y, y_kind, 'y', line_no);
    ds.a.push_back(a);
    ds.y.push_back(y);
  }
  if (in.bad()) throw IoError("failed reading dataset");
  if (ds.size() == 0) throw DataError("dataset has a header but no rows");
  ds.validate();
  return ds;
}

ObservationalDataset load_dataset(const std::filesystem::path& path, VariableKind a_kind,
                                  VariableKind y_kind) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open dataset '" + path.string() + "'");
  try {
    return read_dataset_csv(in, a_kind, y_kind, path.stem().string());
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void write_dataset_csv(std::ostream& out, const ObservationalDataset& dataset) {
  dataset.validate();
  std::string text = "a,y\n";
  text.reserve(dataset.size() * 40);
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    text += format_double(dataset.a[i]);
    text += ',';
    text += format_double(dataset.y[i]);
    text += '\n';
  }
  out << text;
}

void save_dataset(const ObservationalDataset& dataset, const std::filesystem::path& path) {
  std::ostringstream os;
  write_dataset_csv(os, dataset);
  write_text_file(path, os.str());
}

// ------------------------------------------------------------------ models

std::string model_to_json(const RhoGnfModel& model) {
  json j;
  j["format"] = "rhoflow-model";
  j["version"] = 1;
  j["rho"] = model.rho().value();
  j["a_kind"] = model.a_kind().to_string();
  j["y_kind"] = model.y_kind().to_string();
  j["hidden_layers"] = model.hidden_layers();
  j["dequant_sigma"] = model.dequant_sigma();
  j["a_standardizer"] = {{"shift", model.a_standardizer().shift},
                         {"scale", model.a_standardizer().scale}};
  j["y_standardizer"] = {{"shift", model.y_standardizer().shift},
                         {"scale", model.y_standardizer().scale}};
  j["parameters"] = finite_array(model.parameters());
  return dump(j);
}

RhoGnfModel model_from_json(std::string_view text) {
  const json j = parse_json(text, "model");
  return extract("model", [&] {
    if (j.at("format").get<std::string>() != "rhoflow-model") {
      throw DataError("not a rhoflow model document");
    }
    RhoGnfModel model(CopulaCorrelation(j.at("rho").get<double>()),
                      VariableKind::parse(j.at("a_kind").get<std::string>()),
                      VariableKind::parse(j.at("y_kind").get<std::string>()),
                      j.at("hidden_layers").get<std::vector<int>>(), 0,
                      j.at("dequant_sigma").get<double>());
    const auto& sa = j.at("a_standardizer");
    const auto& sy = j.at("y_standardizer");
    model.set_standardizers({sa.at("shift").get<double>(), sa.at("scale").get<double>()},
                            {sy.at("shift").get<double>(), sy.at("scale").get<double>()});
    const auto params = j.at("parameters").get<std::vector<double>>();
    if (params.size() != model.parameter_count()) {
      throw DataError("model parameter count does not match its architecture");
    }
    model.set_parameters(params);
    return model;
  });
}

void save_model(const RhoGnfModel& model, const std::filesystem::path& path) {
  write_text_file(path, model_to_json(model));
}

RhoGnfModel load_model(const std::filesystem::path& path) {
  return model_from_json(read_text_file(path));
}

// ------------------------------------------------------------------ config

namespace {

json config_json(const TrainConfig& c) {
  return {{"learning_rate", c.learning_rate},
          {"cosine_decay", c.cosine_decay},
          {"min_lr_fraction", c.min_lr_fraction},
          {"batch_size", c.batch_size},
          {"max_epochs", c.max_epochs},
          {"patience", c.patience},
          {"validation_fraction", c.validation_fraction},
          {"seed", c.seed},
          {"hidden_layers", c.hidden_layers},
          {"dequant_sigma", c.dequant_sigma},
          {"roughness", c.roughness},
          {"ema_decay", c.ema_decay}};
}

TrainConfig config_from(const json& j, TrainConfig c) {
  if (!j.is_object()) throw DataError("training config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (key == "learning_rate") c.learning_rate = value.get<double>();
    else if (key == "cosine_decay") c.cosine_decay = value.get<bool>();
    else if (key == "min_lr_fraction") c.min_lr_fraction = value.get<double>();
    else if (key == "batch_size") c.batch_size = value.get<std::size_t>();
    else if (key == "max_epochs") c.max_epochs = value.get<std::size_t>();
    else if (key == "patience") c.patience = value.get<std::size_t>();
    else if (key == "validation_fraction") c.validation_fraction = value.get<double>();
    else if (key == "seed") c.seed = value.get<std::uint64_t>();
    else if (key == "hidden_layers") c.hidden_layers = value.get<std::vector<int>>();
    else if (key == "dequant_sigma") c.dequant_sigma = value.get<double>();
    else if (key == "roughness") c.roughness = value.get<double>();
    else if (key == "ema_decay") c.ema_decay = value.get<double>();
    else throw DataError("unknown training config key '" + key + "'");
  }
  c.validate();
  return c;
}

}  // namespace

std::string train_config_to_json(const TrainConfig& config) { return dump(config_json(config)); }

TrainConfig train_config_from_json(std::string_view text, TrainConfig base) {
  const json j = parse_json(text, "training config");
  return extract("training config", [&] { return config_from(j, std::move(base)); });
}

TrainConfig load_train_config(const std::filesystem::path& path, TrainConfig base) {
  return train_config_from_json(read_text_file(path), std::move(base));
}

// ------------------------------------------------------------------ curves

std::string curve_to_json(const RhoCurve& curve, const TrainConfig& config) {
  json j;
  j["grid"] = finite_array(curve.grid());
  j["ace"] = finite_array(curve.aces());
  json y1 = json::array(), y0 = json::array(), qa = json::array(), seeds = json::array();
  for (const auto& p : curve.points) {
    y1.push_back(finite(p.mean_y1));
    y0.push_back(finite(p.mean_y0));
    qa.push_back(p.quantized_ace ? finite(*p.quantized_ace) : json(nullptr));
    seeds.push_back(p.seed);
  }
  j["mean_y1"] = y1;
  j["mean_y0"] = y0;
  j["quantized_ace"] = qa;
  j["seeds"] = seeds;
  j["rho_value"] = finite(curve.rho_value);
  j["crossing_rho"] = curve.crossing_rho ? finite(*curve.crossing_rho) : json(nullptr);
  j["inf_ace"] = finite(curve.inf_ace);
  j["sup_ace"] = finite(curve.sup_ace);
  if (curve.af_bounds) {
    j["af_bounds"] = {{"lower", curve.af_bounds->lower}, {"upper", curve.af_bounds->upper}};
  }
  j["config"] = config_json(config);
  return dump(j);
}

RhoCurve curve_from_json(std::string_view text) {
  const json j = parse_json(text, "curve");
  return extract("curve", [&] {
    RhoCurve c;
    const auto grid = j.at("grid").get<std::vector<double>>();
    const auto ace = j.at("ace").get<std::vector<double>>();
    const auto y1 = j.at("mean_y1").get<std::vector<double>>();
    const auto y0 = j.at("mean_y0").get<std::vector<double>>();
    const auto& qa = j.at("quantized_ace");
    const auto seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    const std::size_t n = grid.size();
    if (n == 0 || ace.size() != n || y1.size() != n || y0.size() != n || qa.size() != n ||
        seeds.size() != n) {
      throw DataError("curve arrays must be non-empty and of equal length");
    }
    for (std::size_t i = 0; i < n; ++i) {
      CurvePoint p{grid[i], ace[i], y1[i], y0[i], std::nullopt, seeds[i]};
      if (!qa[i].is_null()) p.quantized_ace = qa[i].get<double>();
      c.points.push_back(p);
    }
    c.rho_value = j.at("rho_value").get<double>();
    if (!j.at("crossing_rho").is_null()) c.crossing_rho = j.at("crossing_rho").get<double>();
    c.inf_ace = j.at("inf_ace").get<double>();
    c.sup_ace = j.at("sup_ace").get<double>();
    if (j.contains("af_bounds")) {
      c.af_bounds = AfBounds{j["af_bounds"].at("lower").get<double>(),
                             j["af_bounds"].at("upper").get<double>()};
    }
    return c;
  });
}

void save_curve_json(const RhoCurve& curve, const TrainConfig& config,
                     const std::filesystem::path& path) {
  write_text_file(path, curve_to_json(curve, config));
}

RhoCurve load_curve(const std::filesystem::path& path) {
  return curve_from_json(read_text_file(path));
}

void save_curve_csv(const RhoCurve& curve, const std::filesystem::path& path) {
  std::string text = "rho,ace,mean_y1,mean_y0,quantized_ace,seed\n";
  for (const auto& p : curve.points) {
    text += format_double(p.rho) + ',' + format_double(p.ace) + ',' + format_double(p.mean_y1) +
            ',' + format_double(p.mean_y0) + ',' +
            (p.quantized_ace ? format_double(*p.quantized_ace) : std::string()) + ',' +
            std::to_string(p.seed) + '\n';
  }
  write_text_file(path, text);
}

// -------------------------------------------------------------- posteriors

PosteriorSummary summarize_posterior(GridEvaluation evaluation, const RhoPrior& prior,
                                     std::string quantity, double level, double threshold) {
  PosteriorSummary s;
  s.quantity = std::move(quantity);
  s.prior = prior.to_string();
  s.prior_pmf = discretize_prior(prior, evaluation.grid);
  s.evaluation = std::move(evaluation);
  s.posterior = posterior_q(s.evaluation, s.prior_pmf);
  s.interval = credible_interval(s.posterior, level);
  s.threshold = threshold;
  s.prob_greater = prob_greater(s.posterior, threshold);
  return s;
}

std::string posterior_to_json(const PosteriorSummary& s) {
  json j;
  j["quantity"] = s.quantity;
  j["prior"] = s.prior;
  j["grid"] = finite_array(s.evaluation.grid);
  j["q_values"] = finite_array(s.evaluation.q_values);
  j["prior_pmf"] = finite_array(s.prior_pmf);
  j["support"] = finite_array(s.posterior.support);
  j["pmf"] = finite_array(s.posterior.pmf);
  j["bandwidth"] = kernel_bandwidth(s.posterior);
  const auto pts = density_grid(s.posterior);
  const auto dens = smooth_density(s.posterior, pts);
  json samples = json::array();
  for (std::size_t i = 0; i < pts.size(); ++i) samples.push_back({finite(pts[i]), finite(dens[i])});
  j["density_samples"] = samples;
  j["credible_interval"] = {{"level", s.interval.level},
                            {"lo", finite(s.interval.lo)},
                            {"hi", finite(s.interval.hi)},
                            {"method", "equal-tailed, smoothed density"}};
  j["prob_greater"] = {{"threshold", s.threshold},
                       {"value", s.prob_greater},
                       {"convention", "discrete pmf"}};
  return dump(j);
}

PosteriorSummary posterior_from_json(std::string_view text) {
  const json j = parse_json(text, "posterior");
  return extract("posterior", [&] {
    PosteriorSummary s;
    s.quantity = j.at("quantity").get<std::string>();
    s.prior = j.at("prior").get<std::string>();
    s.evaluation.grid = j.at("grid").get<std::vector<double>>();
    s.evaluation.q_values = j.at("q_values").get<std::vector<double>>();
    s.prior_pmf = j.at("prior_pmf").get<std::vector<double>>();
    s.posterior.support = j.at("support").get<std::vector<double>>();
    s.posterior.pmf = j.at("pmf").get<std::vector<double>>();
    const auto& ci = j.at("credible_interval");
    s.interval = {ci.at("level").get<double>(), ci.at("lo").get<double>(),
                  ci.at("hi").get<double>()};
    const auto& pg = j.at("prob_greater");
    s.threshold = pg.at("threshold").get<double>();
    s.prob_greater = pg.at("value").get<double>();
    s.evaluation.validate();
    try {
      s.posterior.validate();
    } catch (const DomainError& e) {
      throw DataError(e.what());
    }
    return s;
  });
}

void save_posterior_json(const PosteriorSummary& summary, const std::filesystem::path& path) {
  write_text_file(path, posterior_to_json(summary));
}

PosteriorSummary load_posterior(const std::filesystem::path& path) {
  return posterior_from_json(read_text_file(path));
}

void save_posterior_csv(const PosteriorSummary& summary, const std::filesystem::path& path) {
  const auto pts = density_grid(summary.posterior);
  const auto dens = smooth_density(summary.posterior, pts);
  std::string text = "q,density\n";
  for (std::size_t i = 0; i < pts.size(); ++i) {
    text += format_double(pts[i]) + ',' + format_double(dens[i]) + '\n';
  }
  write_text_file(path, text);
}

void save_pmf_csv(const PosteriorSummary& summary, const std::filesystem::path& path) {
  std::string text = "q,pmf\n";
  for (std::size_t i = 0; i < summary.posterior.support.size(); ++i) {
    text += format_double(summary.posterior.support[i]) + ',' +
            format_double(summary.posterior.pmf[i]) + '\n';
  }
  write_text_file(path, text);
}

// --------------------------------------------------------------- manifests

std::string manifest_to_json(const RunManifest& m) {
  json j;
  j["command"] = m.command;
  j["argv"] = m.argv;
  j["seeds"] = m.seeds;
  j["config"] = m.config;
  json inputs = json::array();
  for (const auto& [path, hash] : m.input_hashes) inputs.push_back({{"path", path}, {"sha256", hash}});
  j["inputs"] = inputs;
  j["outputs"] = m.outputs;
  j["tool_version"] = m.tool_version;
  return dump(j);
}

RunManifest manifest_from_json(std::string_view text) {
  const json j = parse_json(text, "manifest");
  return extract("manifest", [&] {
    RunManifest m;
    m.command = j.at("command").get<std::string>();
    m.argv = j.at("argv").get<std::vector<std::string>>();
    m.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    m.config = j.at("config").get<std::map<std::string, std::string>>();
    for (const auto& in : j.at("inputs")) {
      m.input_hashes.emplace_back(in.at("path").get<std::string>(),
                                  in.at("sha256").get<std::string>());
    }
    m.outputs = j.at("outputs").get<std::vector<std::string>>();
    m.tool_version = j.at("tool_version").get<std::string>();
    return m;
  });
}

void save_manifest(const RunManifest& manifest, const std::filesystem::path& path) {
  write_text_file(path, manifest_to_json(manifest));
}

RunManifest load_manifest(const std::filesystem::path& path) {
  return manifest_from_json(read_text_file(path));
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for hashing");
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
    throw IoError("SHA-256 initialisation failed");
  }
  std::array<char, 1 << 16> buf{};
  while (in) {
    in.read(buf.data(), buf.size());
    if (in.gcount() > 0 &&
        EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount())) != 1) {
      throw IoError("SHA-256 update failed");
    }
  }
  if (in.bad()) throw IoError("failed reading '" + path.string() + "'");
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_DigestFinal_ex(ctx.get(), md.data(), &len) != 1) throw IoError("SHA-256 final failed");
  std::ostringstream os;
  os << std::hex << std::setfill('0');
  for (unsigned int i = 0; i < len; ++i) os << std::setw(2) << static_cast<int>(md[i]);
  return os.str();
}

std::uint64_t resolve_seed(std::optional<std::uint64_t> flag) {
  if (flag) return *flag;
  const char* env = std::getenv("RHOFLOW_SEED");
  if (env == nullptr || *env == '\0') return 0;
  std::uint64_t seed = 0;
  const std::string_view text(env);
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), seed);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw DomainError("RHOFLOW_SEED must be a non-negative integer, got '" + std::string(text) + "'");
  }
  return seed;
}

}  // namespace rhoflow
