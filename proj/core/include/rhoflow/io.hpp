#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rhoflow/bayes.hpp"
#include "rhoflow/causal.hpp"
#include "rhoflow/dataset.hpp"
#include "rhoflow/flow.hpp"
#include "rhoflow/training.hpp"

namespace rhoflow {

/// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

/// Reads a dataset from CSV text with header "a,y". Errors name the 1-based
/// line of the file (the header is line 1).
ObservationalDataset read_dataset_csv(std::istream& in, VariableKind a_kind, VariableKind y_kind,
                                      std::string name = {});
ObservationalDataset load_dataset(const std::filesystem::path& path, VariableKind a_kind,
                                  VariableKind y_kind);
void write_dataset_csv(std::ostream& out, const ObservationalDataset& dataset);
void save_dataset(const ObservationalDataset& dataset, const std::filesystem::path& path);

/// Full-precision JSON document of the model.
std::string model_to_json(const RhoGnfModel& model);
RhoGnfModel model_from_json(std::string_view text);
void save_model(const RhoGnfModel& model, const std::filesystem::path& path);
RhoGnfModel load_model(const std::filesystem::path& path);

std::string train_config_to_json(const TrainConfig& config);
/// Keys absent from the document keep their defaults; unknown keys are errors.
TrainConfig train_config_from_json(std::string_view text, TrainConfig base = {});
TrainConfig load_train_config(const std::filesystem::path& path, TrainConfig base = {});

std::string curve_to_json(const RhoCurve& curve, const TrainConfig& config);
RhoCurve curve_from_json(std::string_view text);
void save_curve_json(const RhoCurve& curve, const TrainConfig& config,
                     const std::filesystem::path& path);
RhoCurve load_curve(const std::filesystem::path& path);
/// One row per grid point: rho,ace,mean_y1,mean_y0,quantized_ace,seed.
void save_curve_csv(const RhoCurve& curve, const std::filesystem::path& path);

/// Everything the bayes command reports.
struct PosteriorSummary {
  std::string quantity;  ///< ace, ey1 or ey0
  std::string prior;     ///< RhoPrior::to_string
  GridEvaluation evaluation;
  std::vector<double> prior_pmf;
  DiscretePosterior posterior;
  CredibleInterval interval;
  double threshold = 0.0;
  double prob_greater = 0.0;
};

PosteriorSummary summarize_posterior(GridEvaluation evaluation, const RhoPrior& prior,
                                     std::string quantity, double level, double threshold);

std::string posterior_to_json(const PosteriorSummary& summary);
PosteriorSummary posterior_from_json(std::string_view text);
void save_posterior_json(const PosteriorSummary& summary, const std::filesystem::path& path);
PosteriorSummary load_posterior(const std::filesystem::path& path);
/// Density table q,density over density_grid (512 points).
void save_posterior_csv(const PosteriorSummary& summary, const std::filesystem::path& path);
/// Support table q,pmf.
void save_pmf_csv(const PosteriorSummary& summary, const std::filesystem::path& path);

/// Record of one CLI invocation, enough to re-run it.
struct RunManifest {
  std::string command;
  std::vector<std::string> argv;
  std::vector<std::uint64_t> seeds;
  std::map<std::string, std::string> config;
  std::vector<std::pair<std::string, std::string>> input_hashes;  ///< path, SHA-256 hex
  std::vector<std::string> outputs;
  std::string tool_version;
};

std::string manifest_to_json(const RunManifest& manifest);
RunManifest manifest_from_json(std::string_view text);
void save_manifest(const RunManifest& manifest, const std::filesystem::path& path);
RunManifest load_manifest(const std::filesystem::path& path);

/// Lowercase hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

/// The flag value if given, else RHOFLOW_SEED, else 0. Throws DomainError
/// for a malformed RHOFLOW_SEED.
std::uint64_t resolve_seed(std::optional<std::uint64_t> flag);

std::string read_text_file(const std::filesystem::path& path);
/// Writes through a temporary file renamed into place.
void write_text_file(const std::filesystem::path& path, std::string_view text);

const char* library_version() noexcept;

}  // namespace rhoflow
