#include "pqc/labeling.hpp"

#include <algorithm>
#include <cmath>

#include "pqc/errors.hpp"

namespace pqc {

double cosine_similarity(const VectorXd& u, const VectorXd& v) {
  if (u.size() != v.size())
    throw std::invalid_argument("cosine_similarity: dimension mismatch");
  const double nu = u.norm(), nv = v.norm();
  if (nu == 0.0 || nv == 0.0)
    throw numerical_error("cosine_similarity: undefined similarity for zero vector");
  return u.dot(v) / (nu * nv);
}

SimilarityTable similarity_table(const MatrixXd& centers,
                                 const std::vector<LabeledExemplar>& exemplars,
                                 std::vector<std::string>* warnings) {
  if (exemplars.empty())
    throw std::invalid_argument("similarity_table: no exemplars");
  for (const auto& e : exemplars)
    if (e.feature.size() != centers.cols())
      throw std::invalid_argument("similarity_table: exemplar dimension mismatch");

  SimilarityTable table;
  for (Index k = 0; k < centers.rows(); ++k)
    table.cluster_ids.push_back(static_cast<int>(k));
  for (EventLabel ev : kAllLabels) {
    const bool present = std::any_of(
        exemplars.begin(), exemplars.end(),
        [&](const LabeledExemplar& e) { return e.label == ev; });
    if (present)
      table.events.push_back(ev);
    else if (warnings)
      warnings->push_back("no exemplars for event '" + to_string(ev) +
                          "'; column omitted");
  }

  table.s.setZero(centers.rows(), static_cast<Index>(table.events.size()));
  for (Index col = 0; col < table.s.cols(); ++col) {
    const EventLabel ev = table.events[static_cast<std::size_t>(col)];
    Index count = 0;
    for (const auto& e : exemplars) {
      if (e.label != ev) continue;
      ++count;
      for (Index k = 0; k < centers.rows(); ++k)
        table.s(k, col) +=
            cosine_similarity(centers.row(k).transpose(), e.feature);
    }
    table.s.col(col) /= static_cast<double>(count);
  }
  return table;
}

namespace {

std::string numeric_label(int cluster) {
  return "cluster_" + std::to_string(cluster);
}

}  // namespace

LabelAssignment assign_labels(const SimilarityTable& table,
                              const std::string& strategy, double threshold) {
  if (table.s.rows() != static_cast<Index>(table.cluster_ids.size()) ||
      table.s.cols() != static_cast<Index>(table.events.size()))
    throw std::invalid_argument("assign_labels: malformed table");
  if (strategy != "row-argmax" && strategy != "greedy-matching")
    throw config_error("assign_labels: unknown strategy '" + strategy + "'");

  LabelAssignment out;
  out.strategy = strategy;
  out.threshold = threshold;

  const Index c = table.s.rows(), e = table.s.cols();
  if (e == 0) {
    for (int id : table.cluster_ids) out.labels[id] = numeric_label(id);
    return out;
  }
  const auto row_max = [&](Index k, Index& col) {
    col = 0;
    for (Index j = 1; j < e; ++j)
      if (table.s(k, j) > table.s(k, col)) col = j;
    return table.s(k, col);
  };

  if (strategy == "row-argmax") {
    for (Index k = 0; k < c; ++k) {
      Index col;
      const double best = row_max(k, col);
      const int id = table.cluster_ids[static_cast<std::size_t>(k)];
      out.labels[id] = best >= threshold
                           ? to_string(table.events[static_cast<std::size_t>(col)])
                           : numeric_label(id);
    }
    return out;
  }

  // Greedy one-to-one matching on the global maximum cell; ties resolve to
  // the smaller cluster row, then the smaller event column.
  std::vector<bool> row_used(static_cast<std::size_t>(c), false);
  std::vector<bool> col_used(static_cast<std::size_t>(e), false);
  const Index rounds = std::min(c, e);
  for (Index round = 0; round < rounds; ++round) {
    Index bk = -1, bj = -1;
    double best = 0.0;
    for (Index k = 0; k < c; ++k) {
      if (row_used[static_cast<std::size_t>(k)]) continue;
      for (Index j = 0; j < e; ++j) {
        if (col_used[static_cast<std::size_t>(j)]) continue;
        if (bk < 0 || table.s(k, j) > best) {
          best = table.s(k, j);
          bk = k;
          bj = j;
        }
      }
    }
    row_used[static_cast<std::size_t>(bk)] = true;
    col_used[static_cast<std::size_t>(bj)] = true;
    out.labels[table.cluster_ids[static_cast<std::size_t>(bk)]] =
        to_string(table.events[static_cast<std::size_t>(bj)]);
  }
  for (Index k = 0; k < c; ++k) {
    if (row_used[static_cast<std::size_t>(k)]) continue;
    Index col;
    const double best = row_max(k, col);
    const int id = table.cluster_ids[static_cast<std::size_t>(k)];
    out.labels[id] = best >= threshold
                         ? to_string(table.events[static_cast<std::size_t>(col)])
                         : numeric_label(id);
  }
  return out;
}

}  // namespace pqc
