#include "gnnsteal/checkpoint.hpp"

#include <fstream>

#include "gnnsteal/errors.hpp"

namespace gnnsteal {

namespace {

constexpr const char* kFormat = "gnnsteal-checkpoint";
constexpr int kVersion = 1;

nlohmann::json tensor_to_json(const Matrix& m) {
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::vector<double>(m.data(), m.data() + m.size())}};
}

Matrix tensor_from_json(const nlohmann::json& j) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const auto data = j.at("data").get<std::vector<double>>();
  if (static_cast<Eigen::Index>(data.size()) != rows * cols) throw Error("checkpoint: tensor data has wrong length");
  Matrix m(rows, cols);
  std::copy(data.begin(), data.end(), m.data());
  return m;
}

}  // namespace

nlohmann::json config_to_json(const ModelConfig& c) {
  return {{"kind", to_string(c.kind)}, {"widths", c.widths},   {"fanouts", c.fanouts},
          {"dense_layers", c.dense_layers}, {"dropout", c.dropout}, {"heads", c.heads}};
}

ModelConfig config_from_json(const nlohmann::json& j) {
  ModelConfig c;
  c.kind = parse_layer_kind(j.at("kind").get<std::string>());
  c.widths = j.at("widths").get<std::vector<std::size_t>>();
  c.fanouts = j.at("fanouts").get<std::vector<std::size_t>>();
  c.dense_layers = j.at("dense_layers").get<std::size_t>();
  c.dropout = j.at("dropout").get<double>();
  c.heads = j.at("heads").get<std::size_t>();
  c.validate();
  return c;
}

nlohmann::json model_to_json(const TrainedModel& model) {
  nlohmann::json layers = nlohmann::json::array();
  for (const LayerParams& p : model.layers) {
    nlohmann::json tensors = nlohmann::json::object();
    const auto names = p.tensor_names();
    const auto values = p.tensors();
    for (std::size_t i = 0; i < names.size(); ++i) tensors[names[i]] = tensor_to_json(*values[i]);
    layers.push_back({{"kind", to_string(p.kind)},
                      {"in_width", p.in_width},
                      {"out_width", p.out_width},
                      {"heads", p.heads},
                      {"concat_heads", p.concat_heads},
                      {"tensors", tensors}});
  }
  nlohmann::json trace = nlohmann::json::array();
  for (const EpochRecord& r : model.meta.trace) {
    trace.push_back({r.epoch, r.train_loss, r.val_accuracy, r.best_val_accuracy});
  }
  return {{"config", config_to_json(model.config)},
          {"layers", layers},
          {"meta",
           {{"epochs_run", model.meta.epochs_run},
            {"best_epoch", model.meta.best_epoch},
            {"best_val_accuracy", model.meta.best_val_accuracy},
            {"seed", model.meta.seed},
            {"trace", trace}}}};
}

TrainedModel model_from_json(const nlohmann::json& j) {
  TrainedModel model;
  model.config = config_from_json(j.at("config"));
  for (const auto& lj : j.at("layers")) {
    LayerParams p;
    p.kind = parse_layer_kind(lj.at("kind").get<std::string>());
    p.in_width = lj.at("in_width").get<std::size_t>();
    p.out_width = lj.at("out_width").get<std::size_t>();
    p.heads = lj.at("heads").get<std::size_t>();
    p.concat_heads = lj.at("concat_heads").get<bool>();
    const auto& tensors = lj.at("tensors");
    for (auto [name, target] : {std::pair{"weight", &p.weight}, std::pair{"bias", &p.bias},
                                std::pair{"attn_src", &p.attn_src}, std::pair{"attn_dst", &p.attn_dst},
                                std::pair{"epsilon", &p.epsilon}}) {
      if (tensors.contains(name)) *target = tensor_from_json(tensors.at(name));
    }
    model.layers.push_back(std::move(p));
  }
  if (model.layers.size() != model.config.num_layers()) throw Error("checkpoint: layer count does not match config");
  const auto& meta = j.at("meta");
  model.meta.epochs_run = meta.at("epochs_run").get<std::size_t>();
  model.meta.best_epoch = meta.at("best_epoch").get<std::size_t>();
  model.meta.best_val_accuracy = meta.at("best_val_accuracy").get<double>();
  model.meta.seed = meta.at("seed").get<std::uint64_t>();
  for (const auto& r : meta.at("trace")) {
    model.meta.trace.push_back({r.at(0).get<std::size_t>(), r.at(1).get<double>(), r.at(2).get<double>(),
                                r.at(3).get<double>()});
  }
  return model;
}

nlohmann::json checkpoint_to_json(const Checkpoint& checkpoint) {
  nlohmann::json j = {{"format", kFormat}, {"version", kVersion}, {"model", model_to_json(checkpoint.model)}};
  if (checkpoint.classifier) j["classifier"] = model_to_json(*checkpoint.classifier);
  if (!checkpoint.provenance.is_null()) j["provenance"] = checkpoint.provenance;
  return j;
}

Checkpoint checkpoint_from_json(const nlohmann::json& j) {
  try {
    if (j.at("format").get<std::string>() != kFormat) throw Error("not a gnnsteal checkpoint");
    if (j.at("version").get<int>() != kVersion) throw Error("unsupported checkpoint version");
    Checkpoint c;
    c.model = model_from_json(j.at("model"));
    if (j.contains("classifier")) c.classifier = model_from_json(j.at("classifier"));
    if (j.contains("provenance")) c.provenance = j.at("provenance");
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed checkpoint: ") + e.what());
  }
}

void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& file) {
  if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
  std::ofstream out(file);
  if (!out) throw Error("cannot write checkpoint " + file.string());
  out << checkpoint_to_json(checkpoint).dump() << '\n';
}

Checkpoint load_checkpoint(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw Error("cannot open checkpoint " + file.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error("malformed checkpoint " + file.string() + ": " + e.what());
  }
  return checkpoint_from_json(j);
}

}  // namespace gnnsteal
