#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace promptsent {

/// One-vs-rest counts for a single class.
struct ClassCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t tn = 0;
};

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

/// Accuracy plus per-class and macro-averaged precision/recall/F1 for one
/// classification task.
struct TaskMetrics {
  std::size_t total = 0;
  std::size_t correct = 0;
  double accuracy = 0.0;
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f1 = 0.0;
  std::vector<ClassCounts> counts;
  std::vector<ClassMetrics> per_class;
  std::vector<std::string> class_names;  // optional, same length as counts
};

/// Per-class metrics from counts. A zero denominator yields 0.
ClassMetrics class_metrics(const ClassCounts& c);

/// `pairs` holds (gold, predicted) class indices in [0, num_classes).
/// Throws std::invalid_argument on empty input or out-of-range classes.
TaskMetrics compute_metrics(std::span<const std::pair<int, int>> pairs,
                            std::size_t num_classes);

struct EvalReport {
  std::optional<TaskMetrics> ate;  // token-level BIO tags
  std::optional<TaskMetrics> asc;
  std::optional<double> ceg_perplexity;
  std::size_t ceg_examples = 0;
  std::vector<std::string> notices;

  nlohmann::json to_json() const;
  /// Aligned table with columns Accuracy, Precision, Recall, F1.
  std::string table() const;
};

nlohmann::json to_json(const TaskMetrics& m);

}  // namespace promptsent
