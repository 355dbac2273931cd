#pragma once

#include <map>
#include <string>
#include <vector>

#include "pqc/types.hpp"
#include "pqc/waveform.hpp"

namespace pqc {

/// Encoded + PCA-transformed reference waveform with a known event label.
struct LabeledExemplar {
  VectorXd feature;
  EventLabel label;
};

/// S(k, e) = mean cosine similarity between cluster center k and the
/// exemplars of event e.
struct SimilarityTable {
  MatrixXd s;
  std::vector<int> cluster_ids;
  std::vector<EventLabel> events;  // column order
};

struct LabelAssignment {
  std::map<int, std::string> labels;  // event name, or "cluster_<k>" fallback
  std::string strategy;
  double threshold = 0.0;
};

/// Eq-8 cosine similarity; throws numerical_error on a zero vector.
double cosine_similarity(const VectorXd& u, const VectorXd& v);

/// Events with no exemplars are omitted from the table with a warning.
SimilarityTable similarity_table(const MatrixXd& centers,
                                 const std::vector<LabeledExemplar>& exemplars,
                                 std::vector<std::string>* warnings = nullptr);

/// strategy "row-argmax": every cluster takes its best event (duplicates
/// allowed). strategy "greedy-matching": repeatedly bind the global best
/// (cluster, event) cell one-to-one; leftover clusters then inherit their
/// row max when it clears `threshold`, otherwise keep a numeric label.
LabelAssignment assign_labels(const SimilarityTable& table,
                              const std::string& strategy = "greedy-matching",
                              double threshold = 0.0);

}  // namespace pqc
