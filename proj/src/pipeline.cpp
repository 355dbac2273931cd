#include "pqc/pipeline.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <type_traits>

#include "pqc/errors.hpp"
#include "pqc/io.hpp"
#include "pqc/model_io.hpp"

namespace pqc {

namespace fs = std::filesystem;
using nlohmann::json;

PipelineConfig PipelineConfig::from_json(const json& j) {
  PipelineConfig cfg;
  cfg.data_path = j.value("data", cfg.data_path);
  cfg.exemplars_path = j.value("exemplars", cfg.exemplars_path);
  cfg.out_dir = j.value("out_dir", cfg.out_dir);
  cfg.seed = j.value("seed", cfg.seed);
  cfg.threads = j.value("threads", cfg.threads);
  if (j.contains("preprocess")) {
    const json& p = j["preprocess"];
    cfg.min_cycles = p.value("min_cycles", cfg.min_cycles);
    cfg.target_cycles = p.value("target_cycles", cfg.target_cycles);
  }
  if (j.contains("train")) {
    const json& t = j["train"];
    cfg.train.epochs = t.value("epochs", cfg.train.epochs);
    cfg.train.batch_size = t.value("batch_size", cfg.train.batch_size);
    cfg.train.learning_rate = t.value("learning_rate", cfg.train.learning_rate);
    cfg.train.arch.latent_dim = t.value("latent_dim", cfg.train.arch.latent_dim);
  }
  if (j.contains("pca")) {
    const json& p = j["pca"];
    cfg.variance_target = p.value("variance_target", cfg.variance_target);
    cfg.pca_fixed_m = p.value("fixed_m", cfg.pca_fixed_m);
  }
  if (j.contains("cluster")) {
    const json& c = j["cluster"];
    cfg.k = c.value("k", cfg.k);
    cfg.k_min = c.value("k_min", cfg.k_min);
    cfg.k_max = c.value("k_max", cfg.k_max);
    cfg.n_init = c.value("n_init", cfg.n_init);
    cfg.max_iter = c.value("max_iter", cfg.max_iter);
    cfg.tol = c.value("tol", cfg.tol);
  }
  if (j.contains("labeling")) {
    const json& l = j["labeling"];
    cfg.strategy = l.value("strategy", cfg.strategy);
    cfg.threshold = l.value("threshold", cfg.threshold);
  }
  if (j.contains("tsne")) {
    const json& t = j["tsne"];
    cfg.run_tsne = t.value("enabled", cfg.run_tsne);
    cfg.tsne.perplexity = t.value("perplexity", cfg.tsne.perplexity);
    cfg.tsne.iterations = t.value("iterations", cfg.tsne.iterations);
    cfg.tsne.learning_rate = t.value("learning_rate", cfg.tsne.learning_rate);
  }
  return cfg;
}

PipelineConfig PipelineConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw config_error("config parse error in " + path + ": " + e.what());
  }
  return from_json(j);
}

json PipelineConfig::to_json() const {
  return json{
      {"data", data_path},
      {"exemplars", exemplars_path},
      {"out_dir", out_dir},
      {"seed", seed},
      {"threads", threads},
      {"preprocess",
       {{"min_cycles", min_cycles}, {"target_cycles", target_cycles}}},
      {"train",
       {{"epochs", train.epochs},
        {"batch_size", train.batch_size},
        {"learning_rate", train.learning_rate},
        {"latent_dim", train.arch.latent_dim}}},
      {"pca", {{"variance_target", variance_target}, {"fixed_m", pca_fixed_m}}},
      {"cluster",
       {{"k", k},
        {"k_min", k_min},
        {"k_max", k_max},
        {"n_init", n_init},
        {"max_iter", max_iter},
        {"tol", tol}}},
      {"labeling", {{"strategy", strategy}, {"threshold", threshold}}},
      {"tsne",
       {{"enabled", run_tsne},
        {"perplexity", tsne.perplexity},
        {"iterations", tsne.iterations},
        {"learning_rate", tsne.learning_rate}}}};
}

void PipelineConfig::validate() const {
  if (data_path.empty()) throw config_error("config: 'data' path is required");
  if (!fs::exists(data_path))
    throw config_error("config: data file not found: " + data_path);
  if (out_dir.empty()) throw config_error("config: 'out_dir' is required");
  if (threads < 1) throw config_error("config: threads must be >= 1");
  if (min_cycles < 1 || target_cycles < min_cycles)
    throw config_error("config: bad preprocess cycle bounds");
  if (train.epochs < 1 || train.batch_size < 1 || train.learning_rate < 0)
    throw config_error("config: bad train parameters");
  if (pca_fixed_m == 0 && !(variance_target > 0 && variance_target <= 1))
    throw config_error("config: variance_target must be in (0, 1]");
  if (k == 0 && (k_min < 1 || k_max < k_min + 2))
    throw config_error("config: elbow range needs at least 3 k values");
  if (n_init < 1) throw config_error("config: n_init must be >= 1");
  if (strategy != "row-argmax" && strategy != "greedy-matching")
    throw config_error("config: unknown labeling strategy '" + strategy + "'");
}

namespace {

struct StageClock {
  std::vector<std::pair<std::string, double>> seconds;

  template <typename F>
  auto run(const std::string& name, F&& f) {
    const auto t0 = std::chrono::steady_clock::now();
    try {
      if constexpr (std::is_void_v<decltype(f())>) {
        f();
        record(name, t0);
      } else {
        auto out = f();
        record(name, t0);
        return out;
      }
    } catch (const config_error&) {
      throw;
    } catch (const numerical_error&) {
      throw;  // keeps the numerical-abort exit code
    } catch (const stage_error&) {
      throw;
    } catch (const std::exception& e) {
      throw stage_error(name, e.what());
    }
  }

  void record(const std::string& name,
              std::chrono::steady_clock::time_point t0) {
    seconds.emplace_back(
        name, std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                            t0)
                  .count());
  }

  json to_json() const {
    json j = json::object();
    for (const auto& [name, s] : seconds) j[name] = s;
    return j;
  }
};

std::vector<std::string> dataset_ids(const Dataset& d) {
  std::vector<std::string> ids;
  ids.reserve(d.records.size());
  for (const auto& r : d.records) ids.push_back(r.id);
  return ids;
}

void write_xy_csv(const std::string& path, const std::vector<std::string>& ids,
                  const MatrixXd& points, const std::vector<int>& assignments,
                  const std::vector<std::string>& names) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "id";
  for (Index c = 0; c < points.cols(); ++c)
    out << (points.cols() == 2 ? (c == 0 ? ",x" : ",y")
                               : ",pc" + std::to_string(c + 1));
  out << ",cluster,label\r\n";
  for (Index i = 0; i < points.rows(); ++i) {
    out << ids[static_cast<std::size_t>(i)];
    for (Index c = 0; c < points.cols(); ++c)
      out << ',' << format_double(points(i, c));
    out << ',' << assignments[static_cast<std::size_t>(i)] << ','
        << names[static_cast<std::size_t>(i)] << "\r\n";
  }
}

json silhouette_report(const Vector<double>& s,
                       const std::vector<int>& assignments, double mean) {
  int k = 0;
  for (int a : assignments) k = std::max(k, a + 1);
  std::vector<double> sums(static_cast<std::size_t>(k), 0.0);
  std::vector<int> sizes(static_cast<std::size_t>(k), 0);
  for (Index i = 0; i < s.size(); ++i) {
    sums[static_cast<std::size_t>(assignments[static_cast<std::size_t>(i)])] +=
        s[i];
    ++sizes[static_cast<std::size_t>(assignments[static_cast<std::size_t>(i)])];
  }
  json clusters = json::array();
  for (int c = 0; c < k; ++c) {
    clusters.push_back(
        {{"cluster", c},
         {"size", sizes[static_cast<std::size_t>(c)]},
         {"mean_silhouette",
          sizes[static_cast<std::size_t>(c)] > 0
              ? sums[static_cast<std::size_t>(c)] /
                    sizes[static_cast<std::size_t>(c)]
              : 0.0}});
  }
  return json{{"overall_mean", mean}, {"clusters", clusters}};
}

}  // namespace

json similarity_table_json(const SimilarityTable& table) {
  json events = json::array();
  for (EventLabel e : table.events) events.push_back(to_string(e));
  json rows = json::array();
  for (Index k = 0; k < table.s.rows(); ++k) {
    json row = json::array();
    for (Index e = 0; e < table.s.cols(); ++e) row.push_back(table.s(k, e));
    rows.push_back(row);
  }
  return json{{"clusters", table.cluster_ids}, {"events", events}, {"s", rows}};
}

json label_assignment_json(const LabelAssignment& a) {
  json labels = json::object();
  for (const auto& [cluster, name] : a.labels)
    labels[std::to_string(cluster)] = name;
  return json{{"labels", labels},
              {"strategy", a.strategy},
              {"threshold", a.threshold}};
}

std::vector<LabeledExemplar> encode_exemplars(const Dataset& raw,
                                              EncoderNet<float>& encoder,
                                              const Pca<double>& pca,
                                              int min_cycles, int target_cycles,
                                              std::vector<std::string>* warnings) {
  Dataset labeled;
  for (const auto& r : raw.records) {
    if (r.label)
      labeled.records.push_back(r);
    else if (warnings)
      warnings->push_back("exemplar '" + r.id + "' has no label; dropped");
  }
  if (labeled.records.empty())
    throw std::invalid_argument("no labeled exemplars");
  const Dataset prepped = preprocess(labeled, min_cycles, target_cycles);
  std::vector<LabeledExemplar> out;
  out.reserve(prepped.records.size());
  for (const auto& r : prepped.records) {
    const VectorXd h =
        encoder.encode(record_tensor<float>(r)).cast<double>();
    const MatrixXd z = pca_transform(pca, MatrixXd(h.transpose()));
    out.push_back({z.row(0).transpose(), *r.label});
  }
  return out;
}

MatrixXd report_pca3(const MatrixXd& features) {
  const Index m = std::min<Index>(3, features.cols());
  return pca_transform(pca_fit_fixed(features, m), features);
}

json run_all(const PipelineConfig& cfg) {
  cfg.validate();
  fs::create_directories(cfg.out_dir);
  const auto artifact = [&](const std::string& name) {
    return (fs::path(cfg.out_dir) / name).string();
  };

  StageClock clock;
  std::vector<std::string> warnings;
  json report;
  report["config"] = cfg.to_json();

  // -- preprocess ----------------------------------------------------------
  Dataset data = clock.run("preprocess", [&] {
    Dataset d = read_dataset_jsonl(cfg.data_path);
    const Index before = d.size();
    d = preprocess(d, cfg.min_cycles, cfg.target_cycles);
    if (d.size() < before)
      warnings.push_back(std::to_string(before - d.size()) +
                         " records dropped as shorter than " +
                         std::to_string(cfg.min_cycles) + " cycles");
    if (!d.split) d = split_dataset(std::move(d), {0.70, 0.15, 0.15},
                                    substream_seed(cfg.seed, seeds::kSplit));
    write_dataset_jsonl(d, artifact("dataset_preprocessed.jsonl"));
    return d;
  });
  const std::vector<std::string> ids = dataset_ids(data);

  // -- train ----------------------------------------------------------------
  TrainConfig train_cfg = cfg.train;
  train_cfg.seed = substream_seed(cfg.seed, seeds::kTrain);
  train_cfg.arch.in_length =
      static_cast<Index>(data.records.front().samples_per_cycle) *
      cfg.target_cycles;
  TrainedAutoencoder<float> model = clock.run("train", [&] {
    auto m = train_autoencoder<float>(data, train_cfg);
    save_autoencoder(artifact("model.bin"), m);
    return m;
  });
  report["loss"] = {{"train", model.history.train}, {"val", model.history.val}};

  // -- encode ----------------------------------------------------------------
  const MatrixXd features = clock.run("encode", [&] {
    MatrixXd f = encode_dataset(data, model.encoder);
    write_features_csv(artifact("features.csv"), ids, f);
    return f;
  });

  // -- pca --------------------------------------------------------------------
  Pca<double> pca = clock.run("pca", [&] {
    Pca<double> p = cfg.pca_fixed_m > 0
                        ? pca_fit_fixed(features, cfg.pca_fixed_m)
                        : pca_fit(features, cfg.variance_target);
    save_pca(artifact("pca.bin"), p);
    return p;
  });
  const MatrixXd reduced = pca_transform(pca, features);
  write_features_csv(artifact("features_pca.csv"), ids, reduced);
  report["pca"] = {
      {"n_components", pca.n_components()},
      {"explained_variance_ratio",
       std::vector<double>(pca.explained_variance_ratio.data(),
                           pca.explained_variance_ratio.data() +
                               pca.explained_variance_ratio.size())}};

  // -- cluster -----------------------------------------------------------------
  KMeansConfig km;
  km.n_init = cfg.n_init;
  km.max_iter = cfg.max_iter;
  km.tol = cfg.tol;
  km.seed = substream_seed(cfg.seed, seeds::kKMeans);
  ClusterModel<double> clusters = clock.run("cluster", [&] {
    Index k = cfg.k;
    if (k == 0) {
      const ElbowScan scan = elbow_scan(reduced, cfg.k_min, cfg.k_max, km);
      std::ofstream curve(artifact("elbow.csv"), std::ios::binary);
      curve << "k,wss\r\n";
      for (std::size_t i = 0; i < scan.ks.size(); ++i)
        curve << scan.ks[i] << ',' << format_double(scan.wss[i]) << "\r\n";
      if (scan.weak)
        warnings.push_back("weak elbow (strength " +
                           std::to_string(scan.knee_strength) +
                           " below 0.05); using knee anyway");
      report["elbow"] = {{"k", scan.ks},
                         {"wss", scan.wss},
                         {"knee", scan.knee ? json(*scan.knee) : json()},
                         {"strength", scan.knee_strength},
                         {"weak", scan.weak}};
      k = *scan.knee;
    }
    KMeansConfig kcfg = km;
    kcfg.k = k;
    ClusterModel<double> c = kmeans_fit(reduced, kcfg);
    write_assignments_csv(artifact("assignments.csv"), ids, c.assignments);
    std::vector<std::string> center_ids;
    for (Index i = 0; i < c.centers.rows(); ++i)
      center_ids.push_back(std::to_string(i));
    write_features_csv(artifact("centers.csv"), center_ids, c.centers);
    return c;
  });
  report["cluster"] = {{"k", clusters.c},
                       {"objective", clusters.objective},
                       {"n_iter", clusters.n_iter},
                       {"wss_history", clusters.wss_history}};

  // -- silhouette ---------------------------------------------------------------
  clock.run("silhouette", [&] {
    const auto [s, mean] = silhouette(reduced, clusters.assignments);
    report["silhouette"] = silhouette_report(s, clusters.assignments, mean);
    std::ofstream out(artifact("silhouette.json"), std::ios::binary);
    out << report["silhouette"].dump(2) << '\n';
  });

  // -- label ---------------------------------------------------------------------
  std::map<int, std::string> cluster_names;
  for (Index c = 0; c < clusters.c; ++c)
    cluster_names[static_cast<int>(c)] = "cluster_" + std::to_string(c);
  if (cfg.exemplars_path.empty() || !fs::exists(cfg.exemplars_path)) {
    warnings.push_back(cfg.exemplars_path.empty()
                           ? "no exemplar file configured; clusters keep "
                             "numeric labels"
                           : "exemplar file missing (" + cfg.exemplars_path +
                                 "); labeling skipped, clusters keep numeric "
                                 "labels");
    report["similarity"] = json();
    report["labels"] = json();
  } else {
    clock.run("label", [&] {
      const Dataset raw = read_dataset_jsonl(cfg.exemplars_path);
      const std::vector<LabeledExemplar> exemplars =
          encode_exemplars(raw, model.encoder, pca, cfg.min_cycles,
                           cfg.target_cycles, &warnings);
      const SimilarityTable table =
          similarity_table(clusters.centers, exemplars, &warnings);
      const LabelAssignment assignment =
          assign_labels(table, cfg.strategy, cfg.threshold);
      cluster_names = assignment.labels;
      report["similarity"] = similarity_table_json(table);
      report["labels"] = label_assignment_json(assignment);
      json doc = {{"similarity", report["similarity"]},
                  {"assignment", report["labels"]}};
      std::ofstream out(artifact("labels.json"), std::ios::binary);
      out << doc.dump(2) << '\n';
    });
  }
  std::vector<std::string> row_names;
  row_names.reserve(ids.size());
  for (int a : clusters.assignments) row_names.push_back(cluster_names.at(a));

  // -- tsne --------------------------------------------------------------------
  if (cfg.run_tsne) {
    clock.run("tsne", [&] {
      TsneConfig tcfg = cfg.tsne;
      tcfg.seed = substream_seed(cfg.seed, seeds::kTsne);
      const Embedding emb = tsne_fit(reduced, tcfg, &warnings);
      write_xy_csv(artifact("tsne.csv"), ids, emb.points, clusters.assignments,
                   row_names);
      report["tsne"] = {{"iterations", tcfg.iterations},
                        {"perplexity", tcfg.perplexity},
                        {"final_kl", emb.kl_history.back()}};
    });
  }

  // -- pca3 (Fig 5 analog) -------------------------------------------------------
  clock.run("pca3", [&] {
    write_xy_csv(artifact("pca3.csv"), ids, report_pca3(features),
                 clusters.assignments, row_names);
  });

  // -- report ----------------------------------------------------------------------
  report["warnings"] = warnings;
  report["stage_seconds"] = clock.to_json();
  json hashes = json::object();
  for (const auto& entry : fs::directory_iterator(cfg.out_dir)) {
    const std::string name = entry.path().filename().string();
    if (name == "report.json" || !entry.is_regular_file()) continue;
    hashes[name] = fnv1a64_file(entry.path().string());
  }
  report["artifact_hashes"] = hashes;
  {
    std::ofstream out(artifact("report.json"), std::ios::binary);
    if (!out) throw stage_error("report", "cannot write report.json");
    out << report.dump(2) << '\n';
  }
  return report;
}

json sweep_bottleneck(const PipelineConfig& cfg, const std::vector<Index>& dims) {
  if (dims.empty()) throw config_error("sweep: need at least one dim");
  json rows = json::array();
  double best_sil = -2.0;
  Index best_dim = dims.front();
  for (Index dim : dims) {
    PipelineConfig c = cfg;
    c.train.arch.latent_dim = dim;
    c.run_tsne = false;
    c.out_dir = (fs::path(cfg.out_dir) / ("dim_" + std::to_string(dim))).string();
    const json report = run_all(c);
    const double val_mse = report["loss"]["val"].back().get<double>();
    const double sil = report["silhouette"]["overall_mean"].get<double>();
    rows.push_back({{"dim", dim}, {"val_mse", val_mse}, {"mean_silhouette", sil}});
    if (sil > best_sil) {
      best_sil = sil;
      best_dim = dim;
    }
  }
  return json{{"rows", rows}, {"recommended_dim", best_dim}};
}

}  // namespace pqc
