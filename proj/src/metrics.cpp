#include "promptsent/metrics.hpp"

#include <cstdio>
#include <stdexcept>

namespace promptsent {

namespace {
double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}
}  // namespace

ClassMetrics class_metrics(const ClassCounts& c) {
  ClassMetrics m;
  m.precision = ratio(c.tp, c.tp + c.fp);
  m.recall = ratio(c.tp, c.tp + c.fn);
  const double s = m.precision + m.recall;
  m.f1 = s == 0.0 ? 0.0 : 2.0 * m.precision * m.recall / s;
  return m;
}

TaskMetrics compute_metrics(std::span<const std::pair<int, int>> pairs,
                            std::size_t num_classes) {
  if (pairs.empty()) throw std::invalid_argument("compute_metrics: no pairs");
  if (num_classes == 0) throw std::invalid_argument("compute_metrics: no classes");
  TaskMetrics out;
  out.total = pairs.size();
  out.counts.assign(num_classes, {});
  const int n = static_cast<int>(num_classes);
  for (auto [gold, pred] : pairs) {
    if (gold < 0 || gold >= n || pred < 0 || pred >= n) {
      throw std::invalid_argument("compute_metrics: class (" + std::to_string(gold) +
                                  ", " + std::to_string(pred) + ") outside [0, " +
                                  std::to_string(n) + ")");
    }
    if (gold == pred) {
      ++out.correct;
      ++out.counts[gold].tp;
    } else {
      ++out.counts[pred].fp;
      ++out.counts[gold].fn;
    }
  }
  for (auto& c : out.counts) c.tn = out.total - c.tp - c.fp - c.fn;
  out.accuracy = ratio(out.correct, out.total);
  for (const auto& c : out.counts) {
    auto m = class_metrics(c);
    out.macro_precision += m.precision;
    out.macro_recall += m.recall;
    out.macro_f1 += m.f1;
    out.per_class.push_back(m);
  }
  out.macro_precision /= static_cast<double>(num_classes);
  out.macro_recall /= static_cast<double>(num_classes);
  out.macro_f1 /= static_cast<double>(num_classes);
  return out;
}

nlohmann::json to_json(const TaskMetrics& m) {
  nlohmann::json j;
  j["total"] = m.total;
  j["accuracy"] = m.accuracy;
  j["macro_precision"] = m.macro_precision;
  j["macro_recall"] = m.macro_recall;
  j["macro_f1"] = m.macro_f1;
  auto classes = nlohmann::json::array();
  for (std::size_t i = 0; i < m.counts.size(); ++i) {
    const auto& c = m.counts[i];
    const auto& pm = m.per_class[i];
    nlohmann::json entry{{"tp", c.tp},        {"fp", c.fp},          {"fn", c.fn},
                         {"tn", c.tn},        {"precision", pm.precision},
                         {"recall", pm.recall}, {"f1", pm.f1}};
    entry["class"] = i < m.class_names.size() ? nlohmann::json(m.class_names[i])
                                              : nlohmann::json(i);
    classes.push_back(std::move(entry));
  }
  j["classes"] = std::move(classes);
  return j;
}

nlohmann::json EvalReport::to_json() const {
  nlohmann::json j = nlohmann::json::object();
  if (ate) j["ate"] = promptsent::to_json(*ate);
  if (asc) j["asc"] = promptsent::to_json(*asc);
  if (ceg_perplexity) {
    j["ceg"] = {{"perplexity", *ceg_perplexity}, {"examples", ceg_examples}};
  }
  if (!notices.empty()) j["notices"] = notices;
  return j;
}

std::string EvalReport::table() const {
  std::string out;
  char line[128];
  std::snprintf(line, sizeof line, "%-6s %9s %9s %9s %9s\n", "Task", "Accuracy",
                "Precision", "Recall", "F1");
  out += line;
  auto row = [&](const char* name, const TaskMetrics& m) {
    std::snprintf(line, sizeof line, "%-6s %9.4f %9.4f %9.4f %9.4f\n", name, m.accuracy,
                  m.macro_precision, m.macro_recall, m.macro_f1);
    out += line;
  };
  if (asc) row("ASC", *asc);
  if (ate) row("ATE", *ate);
  if (ceg_perplexity) {
    std::snprintf(line, sizeof line, "CEG perplexity %.4f over %zu explanations\n",
                  *ceg_perplexity, ceg_examples);
    out += line;
  }
  for (const auto& n : notices) out += "note: " + n + "\n";
  return out;
}

}  // namespace promptsent
