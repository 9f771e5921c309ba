#include "rbkit/model.hpp"

#include <stdexcept>

#include <nlohmann/json.hpp>

namespace rbkit {

const char* to_string(Task task) {
  switch (task) {
    case Task::Regression:
      return "regression";
    case Task::Binary:
      return "binary";
    case Task::Multiclass:
      return "multiclass";
  }
  return "unknown";
}

Task task_from_string(const std::string& name) {
  if (name == "regression") return Task::Regression;
  if (name == "binary") return Task::Binary;
  if (name == "multiclass") return Task::Multiclass;
  throw std::invalid_argument("unknown task: " + name);
}

const char* to_string(Regularizer reg) { return reg == Regularizer::L1 ? "l1" : "l2"; }

Regularizer regularizer_from_string(const std::string& name) {
  if (name == "l1") return Regularizer::L1;
  if (name == "l2") return Regularizer::L2;
  throw std::invalid_argument("unknown regularizer: " + name);
}

std::vector<double> decision_scores(const Model& model, const SparseMatrix& z) {
  if (model.w.size() != z.cols()) {
    throw std::invalid_argument("decision_scores: model has " + std::to_string(model.w.size()) +
                                " weights, features have " + std::to_string(z.cols()) +
                                " columns");
  }
  return z.matvec(model.w);
}

std::vector<double> predict(const Model& model, const FeatureMap& map, const RowMatrix& x) {
  if (model.w.size() != map.num_features()) {
    throw std::invalid_argument("predict: model dimension does not match feature map");
  }
  return decision_scores(model, map.features(x));
}

std::vector<double> decide(Task task, std::span<const std::vector<double>> head_scores) {
  if (head_scores.empty()) throw std::invalid_argument("decide: no heads");
  const std::size_t n = head_scores.front().size();
  for (const auto& s : head_scores) {
    if (s.size() != n) throw std::invalid_argument("decide: heads disagree on sample count");
  }
  std::vector<double> out(n);
  switch (task) {
    case Task::Regression:
      out = head_scores.front();
      break;
    case Task::Binary:
      for (std::size_t i = 0; i < n; ++i) out[i] = head_scores.front()[i] > 0.0 ? 1.0 : -1.0;
      break;
    case Task::Multiclass:
      for (std::size_t i = 0; i < n; ++i) {
        std::size_t best = 0;
        for (std::size_t c = 1; c < head_scores.size(); ++c) {
          if (head_scores[c][i] > head_scores[best][i]) best = c;
        }
        out[i] = static_cast<double>(best);
      }
      break;
  }
  return out;
}

std::vector<double> Predictor::predict(const RowMatrix& x) const {
  const SparseMatrix z = features.features(x);
  std::vector<std::vector<double>> scores;
  scores.reserve(heads.size());
  for (const auto& head : heads) scores.push_back(decision_scores(head, z));
  return decide(task, scores);
}

std::vector<double> Predictor::predict_original_labels(const RowMatrix& x) const {
  std::vector<double> out = predict(x);
  if (task == Task::Regression || class_labels.empty()) return out;
  for (auto& v : out) {
    const std::size_t cls = task == Task::Binary ? (v > 0.0 ? 1 : 0) : static_cast<std::size_t>(v);
    v = class_labels.at(cls);
  }
  return out;
}

nlohmann::json Predictor::to_json() const {
  nlohmann::json hs = nlohmann::json::array();
  for (const auto& h : heads) {
    hs.push_back({{"lambda", h.lambda},
                  {"loss", to_string(h.loss.kind)},
                  {"regularizer", to_string(h.regularizer)},
                  {"weights", h.w}});
  }
  return {{"format", "rbkit-model"},
          {"version", 1},
          {"task", to_string(task)},
          {"class_labels", class_labels},
          {"features", features.to_json()},
          {"heads", std::move(hs)}};
}

Predictor Predictor::from_json(const nlohmann::json& j) {
  if (j.at("format").get<std::string>() != "rbkit-model") {
    throw std::invalid_argument("Predictor::from_json: not an rbkit model file");
  }
  Predictor p{task_from_string(j.at("task").get<std::string>()),
              FeatureMap::from_json(j.at("features")),
              {},
              j.at("class_labels").get<std::vector<double>>()};
  for (const auto& h : j.at("heads")) {
    Model m;
    m.lambda = h.at("lambda").get<double>();
    m.loss.kind = loss_kind_from_string(h.at("loss").get<std::string>());
    m.regularizer = regularizer_from_string(h.at("regularizer").get<std::string>());
    m.w = h.at("weights").get<std::vector<double>>();
    if (m.w.size() != p.features.num_features()) {
      throw std::invalid_argument("Predictor::from_json: head dimension mismatch");
    }
    p.heads.push_back(std::move(m));
  }
  if (p.heads.empty()) throw std::invalid_argument("Predictor::from_json: no heads");
  return p;
}

void save_predictor(const Predictor& predictor, const std::filesystem::path& path) {
  save_json(predictor.to_json(), path);
}

Predictor load_predictor(const std::filesystem::path& path) {
  return Predictor::from_json(load_json(path));
}

}  // namespace rbkit
