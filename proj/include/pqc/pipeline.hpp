#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pqc/autoencoder.hpp"
#include "pqc/kmeans.hpp"
#include "pqc/labeling.hpp"
#include "pqc/pca.hpp"
#include "pqc/tsne.hpp"
#include "pqc/waveform.hpp"

namespace pqc {

/// Everything a full run needs; a JSON config file maps onto this 1:1 and
/// CLI flags override individual fields.
struct PipelineConfig {
  std::string data_path;
  std::string exemplars_path;  // empty = skip labeling
  std::string out_dir = "out";
  std::uint64_t seed = 0;
  int threads = 1;

  int min_cycles = 8;
  int target_cycles = 16;

  TrainConfig train;  // .seed is derived from the global seed

  double variance_target = 0.95;
  Index pca_fixed_m = 0;  // 0 = pick by variance target

  Index k = 0;  // 0 = choose by elbow over [k_min, k_max]
  Index k_min = 2;
  Index k_max = 15;
  int n_init = 10;
  int max_iter = 300;
  double tol = 1e-6;

  std::string strategy = "greedy-matching";
  double threshold = 0.0;

  TsneConfig tsne;
  bool run_tsne = true;

  static PipelineConfig from_json(const nlohmann::json& j);
  static PipelineConfig load(const std::string& path);
  nlohmann::json to_json() const;
  void validate() const;
};

/// Derived per-stage seeds so one global seed pins the whole run.
namespace seeds {
inline constexpr std::uint64_t kSplit = 101;
inline constexpr std::uint64_t kTrain = 102;
inline constexpr std::uint64_t kKMeans = 103;
inline constexpr std::uint64_t kTsne = 104;
}  // namespace seeds

/// Runs preprocess -> train -> encode -> PCA -> cluster -> silhouette ->
/// label -> t-SNE -> PCA-3, persisting each stage's artifact under
/// cfg.out_dir, and finally writes and returns report.json. Failures are
/// rethrown as stage_error carrying the stage name; completed artifacts
/// stay on disk.
nlohmann::json run_all(const PipelineConfig& cfg);

/// Trains one autoencoder per bottleneck width (shared seed), reruns the
/// cluster stage, and tabulates validation MSE and mean silhouette;
/// recommends the width with the best silhouette.
nlohmann::json sweep_bottleneck(const PipelineConfig& cfg,
                                const std::vector<Index>& dims);

/// Fig-5 style scatter source: scores of the first three principal
/// components of the feature matrix.
MatrixXd report_pca3(const MatrixXd& features);

/// Encode + PCA-transform labeled reference records with the same
/// preprocessing as the main data; unlabeled records are dropped with a
/// warning.
std::vector<LabeledExemplar> encode_exemplars(const Dataset& raw,
                                              EncoderNet<float>& encoder,
                                              const Pca<double>& pca,
                                              int min_cycles, int target_cycles,
                                              std::vector<std::string>* warnings);

nlohmann::json similarity_table_json(const SimilarityTable& table);
nlohmann::json label_assignment_json(const LabelAssignment& a);

}  // namespace pqc
