// pqcluster: clustering pipeline for power-quality event waveforms.
// Exit codes: 0 success, 2 bad config/usage, 3 stage failure, 4 numerical abort.

#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "pqc/errors.hpp"
#include "pqc/io.hpp"
#include "pqc/model_io.hpp"
#include "pqc/pipeline.hpp"
#include "pqc/synth.hpp"

namespace {

using nlohmann::json;

void print_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
}

void write_json(const std::string& path, const json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw pqc::config_error("cannot write " + path);
  out << j.dump(2) << '\n';
}

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw pqc::config_error("cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw pqc::config_error(std::string("JSON parse error: ") + e.what());
  }
  return j;
}

std::vector<std::string> label_names(const std::vector<int>& assignments,
                                     const json& labels_doc) {
  std::map<int, std::string> names;
  if (labels_doc.contains("assignment"))
    for (const auto& [k, v] : labels_doc["assignment"]["labels"].items())
      names[std::stoi(k)] = v.get<std::string>();
  std::vector<std::string> out;
  out.reserve(assignments.size());
  for (int a : assignments) {
    auto it = names.find(a);
    out.push_back(it != names.end() ? it->second
                                    : "cluster_" + std::to_string(a));
  }
  return out;
}

void cmd_gen(std::uint64_t seed, int count_per_class, double noise,
             double short_fraction, int samples_per_cycle, int cycles,
             const std::string& out) {
  pqc::GenConfig cfg;
  cfg.seed = seed;
  cfg.noise_std = noise;
  cfg.short_fraction = short_fraction;
  cfg.samples_per_cycle = samples_per_cycle;
  cfg.n_cycles = cycles;
  for (pqc::EventLabel label : pqc::kAllLabels)
    cfg.class_mix[label] = count_per_class;
  const pqc::Dataset d = pqc::gen_dataset(cfg);
  pqc::write_dataset_jsonl(d, out);
  std::cout << "wrote " << d.size() << " records to " << out << '\n';
}

void cmd_preprocess(const std::string& in, const std::string& out,
                    int min_cycles, int target_cycles, std::uint64_t seed) {
  pqc::Dataset d = pqc::read_dataset_jsonl(in);
  const pqc::Index before = d.size();
  d = pqc::preprocess(d, min_cycles, target_cycles);
  if (d.size() < before)
    std::cerr << "warning: dropped " << before - d.size()
              << " records shorter than " << min_cycles << " cycles\n";
  if (!d.split) d = pqc::split_dataset(std::move(d), {0.70, 0.15, 0.15}, seed);
  pqc::write_dataset_jsonl(d, out);
  std::cout << "preprocessed " << d.size() << " records to " << out << '\n';
}

void cmd_train(const std::string& data, int epochs, int batch, double lr,
               std::uint64_t seed, pqc::Index latent,
               const std::string& out_model) {
  pqc::Dataset d = pqc::read_dataset_jsonl(data);
  if (!d.split)
    throw pqc::config_error("dataset has no train/val/test split; run preprocess first");
  pqc::TrainConfig cfg;
  cfg.epochs = epochs;
  cfg.batch_size = batch;
  cfg.learning_rate = lr;
  cfg.seed = seed;
  cfg.arch.latent_dim = latent;
  cfg.arch.in_length = d.records.front().samples();
  auto model = pqc::train_autoencoder<float>(d, cfg);
  pqc::save_autoencoder(out_model, model);
  std::cout << "epoch " << cfg.epochs << ": train " << model.history.train.back()
            << " val " << model.history.val.back() << "; model saved to "
            << out_model << '\n';
}

void cmd_encode(const std::string& model_path, const std::string& data,
                const std::string& out_features) {
  auto model = pqc::load_autoencoder<float>(model_path);
  const pqc::Dataset d = pqc::read_dataset_jsonl(data);
  const pqc::MatrixXd f = pqc::encode_dataset(d, model.encoder);
  std::vector<std::string> ids;
  for (const auto& r : d.records) ids.push_back(r.id);
  pqc::write_features_csv(out_features, ids, f);
  std::cout << "encoded " << f.rows() << " records x " << f.cols()
            << " features to " << out_features << '\n';
}

void cmd_pca(const std::string& features, double target, pqc::Index fixed_m,
             const std::string& out_model, const std::string& out_features) {
  auto [ids, x] = pqc::read_features_csv(features);
  const pqc::Pca<double> model =
      fixed_m > 0 ? pqc::pca_fit_fixed(x, fixed_m) : pqc::pca_fit(x, target);
  if (!out_model.empty()) pqc::save_pca(out_model, model);
  if (!out_features.empty())
    pqc::write_features_csv(out_features, ids, pqc::pca_transform(model, x));
  double kept = 0;
  for (pqc::Index i = 0; i < model.n_components(); ++i)
    kept += model.explained_variance_ratio[i];
  std::cout << "kept " << model.n_components() << " components ("
            << kept * 100.0 << "% variance)\n";
}

void cmd_cluster(const std::string& features, pqc::Index k, std::uint64_t seed,
                 int n_init, const std::string& out_assignments,
                 const std::string& out_centers) {
  auto [ids, x] = pqc::read_features_csv(features);
  pqc::KMeansConfig cfg;
  cfg.k = k;
  cfg.seed = seed;
  cfg.n_init = n_init;
  const auto model = pqc::kmeans_fit(x, cfg);
  pqc::write_assignments_csv(out_assignments, ids, model.assignments);
  if (!out_centers.empty()) {
    std::vector<std::string> center_ids;
    for (pqc::Index i = 0; i < model.centers.rows(); ++i)
      center_ids.push_back(std::to_string(i));
    pqc::write_features_csv(out_centers, center_ids, model.centers);
  }
  std::cout << "k=" << k << " J=" << model.objective << " iters="
            << model.n_iter << '\n';
}

void cmd_elbow(const std::string& features, pqc::Index kmin, pqc::Index kmax,
               std::uint64_t seed, int n_init, const std::string& out_curve) {
  auto [ids, x] = pqc::read_features_csv(features);
  (void)ids;
  pqc::KMeansConfig base;
  base.seed = seed;
  base.n_init = n_init;
  const pqc::ElbowScan scan = pqc::elbow_scan(x, kmin, kmax, base);
  std::ofstream out(out_curve, std::ios::binary);
  if (!out) throw pqc::config_error("cannot write " + out_curve);
  out << "k,wss\r\n";
  for (std::size_t i = 0; i < scan.ks.size(); ++i)
    out << scan.ks[i] << ',' << pqc::format_double(scan.wss[i]) << "\r\n";
  if (scan.knee) {
    std::cout << "knee at k=" << *scan.knee << " (strength "
              << scan.knee_strength << (scan.weak ? ", weak" : "") << ")\n";
  } else {
    std::cout << "range too short for a knee; curve written\n";
  }
}

void cmd_silhouette(const std::string& features, const std::string& assignments,
                    const std::string& out_report) {
  auto [ids, x] = pqc::read_features_csv(features);
  auto [aids, assign] = pqc::read_assignments_csv(assignments);
  if (ids != aids)
    throw pqc::config_error("features and assignments list different ids");
  const auto [s, mean] = pqc::silhouette(x, assign);
  int k = 0;
  for (int a : assign) k = std::max(k, a + 1);
  std::vector<double> sums(static_cast<std::size_t>(k), 0.0);
  std::vector<int> sizes(static_cast<std::size_t>(k), 0);
  for (pqc::Index i = 0; i < s.size(); ++i) {
    sums[static_cast<std::size_t>(assign[static_cast<std::size_t>(i)])] += s[i];
    ++sizes[static_cast<std::size_t>(assign[static_cast<std::size_t>(i)])];
  }
  json clusters = json::array();
  for (int c = 0; c < k; ++c)
    clusters.push_back({{"cluster", c},
                        {"size", sizes[static_cast<std::size_t>(c)]},
                        {"mean_silhouette",
                         sizes[static_cast<std::size_t>(c)] > 0
                             ? sums[static_cast<std::size_t>(c)] /
                                   sizes[static_cast<std::size_t>(c)]
                             : 0.0}});
  write_json(out_report, {{"overall_mean", mean}, {"clusters", clusters}});
  std::cout << "mean silhouette " << mean << " over " << k << " clusters\n";
}

void cmd_label(const std::string& model_path, const std::string& pca_path,
               const std::string& centers_path, const std::string& exemplars,
               const std::string& strategy, double threshold,
               const std::string& out) {
  auto model = pqc::load_autoencoder<float>(model_path);
  const pqc::Pca<double> pca = pqc::load_pca(pca_path);
  auto [cid, centers] = pqc::read_features_csv(centers_path);
  (void)cid;
  const pqc::Dataset raw = pqc::read_dataset_jsonl(exemplars);
  std::vector<std::string> warnings;
  const auto ex = pqc::encode_exemplars(raw, model.encoder, pca, 8, 16, &warnings);
  const pqc::SimilarityTable table =
      pqc::similarity_table(centers, ex, &warnings);
  const pqc::LabelAssignment assignment =
      pqc::assign_labels(table, strategy, threshold);
  print_warnings(warnings);
  write_json(out, {{"similarity", pqc::similarity_table_json(table)},
                   {"assignment", pqc::label_assignment_json(assignment)}});
  for (const auto& [cluster, name] : assignment.labels)
    std::cout << "cluster " << cluster << " -> " << name << '\n';
}

void cmd_tsne(const std::string& features, double perplexity, int iters,
              std::uint64_t seed, const std::string& assignments_path,
              const std::string& labels_path, const std::string& out) {
  auto [ids, x] = pqc::read_features_csv(features);
  pqc::TsneConfig cfg;
  cfg.perplexity = perplexity;
  cfg.iterations = iters;
  cfg.seed = seed;
  std::vector<std::string> warnings;
  const pqc::Embedding emb = pqc::tsne_fit(x, cfg, &warnings);
  print_warnings(warnings);

  std::vector<int> assign(ids.size(), -1);
  if (!assignments_path.empty()) {
    auto [aids, a] = pqc::read_assignments_csv(assignments_path);
    if (ids != aids)
      throw pqc::config_error("features and assignments list different ids");
    assign = a;
  }
  const std::vector<std::string> names = label_names(
      assign, labels_path.empty() ? json::object() : read_json(labels_path));

  std::ofstream f(out, std::ios::binary);
  if (!f) throw pqc::config_error("cannot write " + out);
  f << "id,x,y,cluster,label\r\n";
  for (pqc::Index i = 0; i < emb.points.rows(); ++i)
    f << ids[static_cast<std::size_t>(i)] << ','
      << pqc::format_double(emb.points(i, 0)) << ','
      << pqc::format_double(emb.points(i, 1)) << ','
      << assign[static_cast<std::size_t>(i)] << ','
      << names[static_cast<std::size_t>(i)] << "\r\n";
  std::cout << "embedded " << emb.points.rows() << " points; final KL "
            << emb.kl_history.back() << '\n';
}

void cmd_report(const std::string& dir) {
  const json report = read_json(
      (std::filesystem::path(dir) / "report.json").string());
  std::cout << "pipeline report: " << dir << "\n";
  if (report.contains("stage_seconds"))
    for (const auto& [stage, secs] : report["stage_seconds"].items())
      std::cout << "  " << stage << ": " << secs.get<double>() << " s\n";
  if (report.contains("cluster"))
    std::cout << "  k = " << report["cluster"]["k"]
              << ", J = " << report["cluster"]["objective"] << '\n';
  if (report.contains("silhouette") && !report["silhouette"].is_null())
    std::cout << "  mean silhouette = "
              << report["silhouette"]["overall_mean"] << '\n';
  if (report.contains("labels") && !report["labels"].is_null())
    for (const auto& [cluster, name] : report["labels"]["labels"].items())
      std::cout << "  cluster " << cluster << " -> "
                << name.get<std::string>() << '\n';
  if (report.contains("warnings"))
    for (const auto& w : report["warnings"])
      std::cout << "  warning: " << w.get<std::string>() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pqcluster: unsupervised clustering of power-quality event waveforms"};
  app.require_subcommand(1);
  app.fallthrough();
  int threads = 1;
  app.add_option("--threads", threads, "cap intra-stage parallelism")
      ->capture_default_str();

  // gen
  auto* gen = app.add_subcommand("gen", "generate a synthetic IEEE-1159-style dataset");
  std::uint64_t gen_seed = 0;
  int gen_count = 100, gen_spc = 256, gen_cycles = 16;
  double gen_noise = 0.01, gen_short = 0.25;
  std::string gen_out = "dataset.jsonl";
  gen->add_option("--seed", gen_seed, "RNG seed")->capture_default_str();
  gen->add_option("--count-per-class", gen_count, "records per event class")
      ->capture_default_str()->check(CLI::PositiveNumber);
  gen->add_option("--noise", gen_noise, "Gaussian noise std (p.u.)")
      ->capture_default_str()->check(CLI::NonNegativeNumber);
  gen->add_option("--short-fraction", gen_short,
                  "fraction of 8-cycle records per class")
      ->capture_default_str()->check(CLI::Range(0.0, 1.0));
  gen->add_option("--samples-per-cycle", gen_spc, "samples per cycle")
      ->capture_default_str()->check(CLI::PositiveNumber);
  gen->add_option("--cycles", gen_cycles, "cycles per long record")
      ->capture_default_str()->check(CLI::PositiveNumber);
  gen->add_option("--out", gen_out, "output JSONL path")->capture_default_str();
  gen->callback([&] {
    cmd_gen(gen_seed, gen_count, gen_noise, gen_short, gen_spc, gen_cycles,
            gen_out);
  });

  // preprocess
  auto* prep = app.add_subcommand("preprocess",
                                  "filter, per-unit scale, pad, and split");
  std::string prep_in, prep_out = "dataset_preprocessed.jsonl";
  int prep_min = 8, prep_target = 16;
  std::uint64_t prep_seed = 0;
  prep->add_option("--in", prep_in, "input JSONL")->required()
      ->check(CLI::ExistingFile);
  prep->add_option("--out", prep_out, "output JSONL")->capture_default_str();
  prep->add_option("--min-cycles", prep_min, "drop shorter records")
      ->capture_default_str()->check(CLI::PositiveNumber);
  prep->add_option("--target-cycles", prep_target, "zero-pad to this length")
      ->capture_default_str()->check(CLI::PositiveNumber);
  prep->add_option("--seed", prep_seed, "split shuffle seed")
      ->capture_default_str();
  prep->callback(
      [&] { cmd_preprocess(prep_in, prep_out, prep_min, prep_target, prep_seed); });

  // train
  auto* train = app.add_subcommand("train", "train the convolutional autoencoder");
  std::string train_data, train_out = "model.bin";
  int train_epochs = 30, train_batch = 32;
  double train_lr = 1e-3;
  std::uint64_t train_seed = 0;
  pqc::Index train_latent = 60;
  train->add_option("--data", train_data, "preprocessed JSONL with split")
      ->required()->check(CLI::ExistingFile);
  train->add_option("--epochs", train_epochs)->capture_default_str()
      ->check(CLI::PositiveNumber);
  train->add_option("--batch", train_batch)->capture_default_str()
      ->check(CLI::PositiveNumber);
  train->add_option("--lr", train_lr)->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  train->add_option("--seed", train_seed)->capture_default_str();
  train->add_option("--latent", train_latent, "bottleneck width")
      ->capture_default_str()->check(CLI::PositiveNumber);
  train->add_option("--out-model", train_out)->capture_default_str();
  train->callback([&] {
    cmd_train(train_data, train_epochs, train_batch, train_lr, train_seed,
              train_latent, train_out);
  });

  // encode
  auto* encode = app.add_subcommand("encode", "encode records to feature vectors");
  std::string enc_model, enc_data, enc_out = "features.csv";
  encode->add_option("--model", enc_model)->required()->check(CLI::ExistingFile);
  encode->add_option("--data", enc_data)->required()->check(CLI::ExistingFile);
  encode->add_option("--out-features", enc_out)->capture_default_str();
  encode->callback([&] { cmd_encode(enc_model, enc_data, enc_out); });

  // pca
  auto* pca = app.add_subcommand("pca", "fit PCA and project features");
  std::string pca_features, pca_out_model = "pca.bin",
              pca_out_features = "features_pca.csv";
  double pca_target = 0.95;
  pqc::Index pca_fixed = 0;
  pca->add_option("--features", pca_features)->required()
      ->check(CLI::ExistingFile);
  pca->add_option("--target", pca_target, "explained-variance target")
      ->capture_default_str()->check(CLI::PositiveNumber & CLI::Range(0.0, 1.0));
  pca->add_option("--fixed-m", pca_fixed, "fixed component count (overrides target)")
      ->capture_default_str()->check(CLI::NonNegativeNumber);
  pca->add_option("--out-model", pca_out_model)->capture_default_str();
  pca->add_option("--out-features", pca_out_features)->capture_default_str();
  pca->callback([&] {
    cmd_pca(pca_features, pca_target, pca_fixed, pca_out_model, pca_out_features);
  });

  // cluster
  auto* cluster = app.add_subcommand("cluster", "k-means on the feature space");
  std::string cl_features, cl_out = "assignments.csv", cl_centers;
  pqc::Index cl_k = 8;
  std::uint64_t cl_seed = 0;
  int cl_ninit = 10;
  cluster->add_option("--features", cl_features)->required()
      ->check(CLI::ExistingFile);
  cluster->add_option("--k", cl_k)->required()->check(CLI::PositiveNumber);
  cluster->add_option("--seed", cl_seed)->capture_default_str();
  cluster->add_option("--n-init", cl_ninit)->capture_default_str()
      ->check(CLI::PositiveNumber);
  cluster->add_option("--out-assignments", cl_out)->capture_default_str();
  cluster->add_option("--out-centers", cl_centers, "optional centers CSV");
  cluster->callback(
      [&] { cmd_cluster(cl_features, cl_k, cl_seed, cl_ninit, cl_out, cl_centers); });

  // elbow
  auto* elbow = app.add_subcommand("elbow", "WSS scan over a k range");
  std::string el_features, el_out = "elbow.csv";
  pqc::Index el_kmin = 2, el_kmax = 15;
  std::uint64_t el_seed = 0;
  int el_ninit = 10;
  elbow->add_option("--features", el_features)->required()
      ->check(CLI::ExistingFile);
  elbow->add_option("--kmin", el_kmin)->capture_default_str()
      ->check(CLI::PositiveNumber);
  elbow->add_option("--kmax", el_kmax)->capture_default_str()
      ->check(CLI::PositiveNumber);
  elbow->add_option("--seed", el_seed)->capture_default_str();
  elbow->add_option("--n-init", el_ninit)->capture_default_str()
      ->check(CLI::PositiveNumber);
  elbow->add_option("--out-curve", el_out)->capture_default_str();
  elbow->callback(
      [&] { cmd_elbow(el_features, el_kmin, el_kmax, el_seed, el_ninit, el_out); });

  // silhouette
  auto* sil = app.add_subcommand("silhouette", "silhouette report for an assignment");
  std::string sil_features, sil_assign, sil_out = "silhouette.json";
  sil->add_option("--features", sil_features)->required()
      ->check(CLI::ExistingFile);
  sil->add_option("--assignments", sil_assign)->required()
      ->check(CLI::ExistingFile);
  sil->add_option("--out-report", sil_out)->capture_default_str();
  sil->callback([&] { cmd_silhouette(sil_features, sil_assign, sil_out); });

  // label
  auto* label = app.add_subcommand("label", "assign event labels to clusters");
  std::string lb_model, lb_pca, lb_centers, lb_exemplars, lb_out = "labels.json";
  std::string lb_strategy = "greedy-matching";
  double lb_threshold = 0.0;
  label->add_option("--model", lb_model)->required()->check(CLI::ExistingFile);
  label->add_option("--pca", lb_pca)->required()->check(CLI::ExistingFile);
  label->add_option("--centers", lb_centers)->required()
      ->check(CLI::ExistingFile);
  label->add_option("--exemplars", lb_exemplars)->required()
      ->check(CLI::ExistingFile);
  label->add_option("--strategy", lb_strategy, "row-argmax | greedy-matching")
      ->capture_default_str();
  label->add_option("--threshold", lb_threshold)->capture_default_str();
  label->add_option("--out", lb_out)->capture_default_str();
  label->callback([&] {
    cmd_label(lb_model, lb_pca, lb_centers, lb_exemplars, lb_strategy,
              lb_threshold, lb_out);
  });

  // tsne
  auto* tsne = app.add_subcommand("tsne", "2-D t-SNE embedding export");
  std::string ts_features, ts_assign, ts_labels, ts_out = "tsne.csv";
  double ts_perplexity = 30.0;
  int ts_iters = 1000;
  std::uint64_t ts_seed = 0;
  tsne->add_option("--features", ts_features)->required()
      ->check(CLI::ExistingFile);
  tsne->add_option("--perplexity", ts_perplexity)->capture_default_str();
  tsne->add_option("--iters", ts_iters)->capture_default_str();
  tsne->add_option("--seed", ts_seed)->capture_default_str();
  tsne->add_option("--assignments", ts_assign, "optional assignments CSV")
      ->check(CLI::ExistingFile);
  tsne->add_option("--labels", ts_labels, "optional labels.json")
      ->check(CLI::ExistingFile);
  tsne->add_option("--out", ts_out)->capture_default_str();
  tsne->callback([&] {
    cmd_tsne(ts_features, ts_perplexity, ts_iters, ts_seed, ts_assign,
             ts_labels, ts_out);
  });

  // report
  auto* rep = app.add_subcommand("report", "summarize a finished run directory");
  std::string rep_dir;
  rep->add_option("--dir", rep_dir)->required()->check(CLI::ExistingDirectory);
  rep->callback([&] { cmd_report(rep_dir); });

  // run-all
  auto* runall = app.add_subcommand("run-all", "execute the full pipeline");
  std::string ra_config, ra_data, ra_exemplars, ra_out;
  std::uint64_t ra_seed = 0;
  bool ra_seed_set = false;
  pqc::Index ra_k = -1;
  int ra_epochs = -1;
  runall->add_option("--config", ra_config, "JSON config file")
      ->check(CLI::ExistingFile);
  runall->add_option("--data", ra_data, "override data path");
  runall->add_option("--exemplars", ra_exemplars, "override exemplar path");
  runall->add_option("--out", ra_out, "override output dir");
  runall->add_option("--seed", ra_seed, "override global seed")
      ->each([&](const std::string&) { ra_seed_set = true; });
  runall->add_option("--k", ra_k, "override cluster count (0 = elbow)");
  runall->add_option("--epochs", ra_epochs, "override training epochs");
  runall->callback([&] {
    pqc::PipelineConfig cfg = ra_config.empty()
                                  ? pqc::PipelineConfig{}
                                  : pqc::PipelineConfig::load(ra_config);
    if (!ra_data.empty()) cfg.data_path = ra_data;
    if (!ra_exemplars.empty()) cfg.exemplars_path = ra_exemplars;
    if (!ra_out.empty()) cfg.out_dir = ra_out;
    if (ra_seed_set) cfg.seed = ra_seed;
    if (ra_k >= 0) cfg.k = ra_k;
    if (ra_epochs > 0) cfg.train.epochs = ra_epochs;
    cfg.threads = threads;
    const json report = pqc::run_all(cfg);
    for (const auto& w : report["warnings"])
      std::cerr << "warning: " << w.get<std::string>() << '\n';
    std::cout << "run complete; report at "
              << (std::filesystem::path(cfg.out_dir) / "report.json").string()
              << '\n';
  });

  // sweep
  auto* sweep = app.add_subcommand("sweep", "bottleneck-width grid search");
  std::string sw_config, sw_out = "sweep.json";
  std::vector<pqc::Index> sw_dims;
  sweep->add_option("--config", sw_config, "JSON config file")->required()
      ->check(CLI::ExistingFile);
  sweep->add_option("--dims", sw_dims, "bottleneck widths to try")
      ->required()->delimiter(',');
  sweep->add_option("--out", sw_out)->capture_default_str();
  sweep->callback([&] {
    const pqc::PipelineConfig cfg = pqc::PipelineConfig::load(sw_config);
    const json table = pqc::sweep_bottleneck(cfg, sw_dims);
    write_json(sw_out, table);
    std::cout << "recommended bottleneck: " << table["recommended_dim"] << '\n';
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const pqc::config_error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const pqc::numerical_error& e) {
    std::cerr << "numerical abort: " << e.what() << '\n';
    return 4;
  } catch (const pqc::stage_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
