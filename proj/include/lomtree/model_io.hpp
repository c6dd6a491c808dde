#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <variant>
#include <vector>

#include "lomtree/baselines.hpp"
#include "lomtree/error.hpp"
#include "lomtree/tree.hpp"

namespace lomtree {

enum class ModelKind : uint8_t { lomtree = 0, rtree = 1, oaa = 2 };

inline const char* model_kind_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::lomtree: return "lomtree";
    case ModelKind::rtree: return "rtree";
    case ModelKind::oaa: return "oaa";
  }
  return "unknown";
}

namespace detail {

// Little-endian container; doubles stored bit-exactly so that a reloaded
// model predicts identically.
inline constexpr char kModelMagic[4] = {'L', 'O', 'M', 'T'};
inline constexpr uint8_t kModelVersion = 1;
inline constexpr uint32_t kNoNode = 0xFFFFFFFFu;

inline void put_u8(std::string& out, uint8_t v) { out.push_back(static_cast<char>(v)); }

inline void put_u32(std::string& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

inline void put_u64(std::string& out, uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

inline void put_i64(std::string& out, int64_t v) { put_u64(out, static_cast<uint64_t>(v)); }

inline void put_f64(std::string& out, double v) {
  uint64_t bits = 0;
  std::memcpy(&bits, &v, sizeof(bits));
  put_u64(out, bits);
}

class ByteReader {
public:
  explicit ByteReader(std::string data) : data_(std::move(data)) {}

  uint8_t u8() { return take(1)[0]; }

  uint32_t u32() {
    const unsigned char* p = take(4);
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(p[i]) << (8 * i);
    return v;
  }

  uint64_t u64() {
    const unsigned char* p = take(8);
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(p[i]) << (8 * i);
    return v;
  }

  int64_t i64() { return static_cast<int64_t>(u64()); }

  double f64() {
    const uint64_t bits = u64();
    double v = 0.0;
    std::memcpy(&v, &bits, sizeof(v));
    return v;
  }

  bool exhausted() const { return pos_ == data_.size(); }

private:
  const unsigned char* take(size_t n) {
    if (pos_ + n > data_.size()) throw ModelFormatError("model file truncated");
    const unsigned char* p = reinterpret_cast<const unsigned char*>(data_.data()) + pos_;
    pos_ += n;
    return p;
  }

  std::string data_;
  size_t pos_ = 0;
};

inline void put_regressor(std::string& out, const LinearRegressor& r) {
  put_f64(out, r.bias());
  put_u64(out, r.updates_seen());
  const auto weights = r.sorted_weights();
  put_u64(out, weights.size());
  for (const auto& [index, w] : weights) {
    put_u32(out, index);
    put_f64(out, w);
  }
}

inline LinearRegressor read_regressor(ByteReader& in) {
  const double bias = in.f64();
  const uint64_t updates = in.u64();
  const uint64_t count = in.u64();
  std::vector<std::pair<uint32_t, double>> weights;
  weights.reserve(count);
  for (uint64_t i = 0; i < count; ++i) {
    const uint32_t index = in.u32();
    const double w = in.f64();
    weights.emplace_back(index, w);
  }
  return LinearRegressor::from_parts(weights, bias, updates);
}

inline void put_config(std::string& out, const TrainConfig& cfg) {
  put_u32(out, cfg.max_internal_nodes);
  put_f64(out, cfg.swap_resistance);
  put_f64(out, cfg.step);
  put_u32(out, cfg.passes);
  put_i64(out, cfg.shuffle_seed);
}

inline TrainConfig read_config(ByteReader& in) {
  TrainConfig cfg;
  cfg.max_internal_nodes = in.u32();
  cfg.swap_resistance = in.f64();
  cfg.step = in.f64();
  cfg.passes = in.u32();
  cfg.shuffle_seed = in.i64();
  return cfg;
}

inline void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("short write to " + path);
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return bytes;
}

inline std::string header(ModelKind kind, const TrainConfig& cfg) {
  std::string out;
  out.append(kModelMagic, sizeof(kModelMagic));
  put_u8(out, kModelVersion);
  put_u8(out, static_cast<uint8_t>(kind));
  put_config(out, cfg);
  return out;
}

}  // namespace detail

/// A deserialized model of any kind plus the training configuration echoed
/// into the file at save time.
struct LoadedModel {
  ModelKind kind = ModelKind::lomtree;
  TrainConfig config;
  std::variant<LomTree, RandomLabelTree, OaaModel> model;

  uint32_t predict(const SparseVector& x) const {
    return std::visit([&](const auto& m) { return m.predict(x); }, model);
  }

  Prediction predict_traced(const SparseVector& x) const {
    return std::visit([&](const auto& m) { return m.predict_traced(x); }, model);
  }
};

inline void save_model(const std::string& path, const LomTree& tree) {
  std::string out = detail::header(ModelKind::lomtree, tree.config());
  detail::put_u32(out, static_cast<uint32_t>(tree.node_count()));
  detail::put_u32(out, tree.root());
  for (NodeId id = 0; id < tree.node_count(); ++id) {
    const TreeNode& nd = tree.node(id);
    detail::put_u32(out, nd.parent ? *nd.parent : detail::kNoNode);
    detail::put_u32(out, nd.left ? *nd.left : detail::kNoNode);
    detail::put_u32(out, nd.right ? *nd.right : detail::kNoNode);
    detail::put_u64(out, nd.stats.min_leaf_count);
    detail::put_u64(out, nd.stats.arrivals_total);
    detail::put_u32(out, nd.stats.majority_label);
    detail::put_u64(out, nd.stats.majority_count);
    detail::put_f64(out, nd.stats.score_sum_total);
    detail::put_u64(out, nd.stats.trained_total);
    detail::put_f64(out, nd.stats.mean_score_total);
    detail::put_regressor(out, nd.regressor);
  }
  detail::write_file(path, out);
}

inline void save_model(const std::string& path, const RandomLabelTree& rt,
                       const TrainConfig& cfg) {
  std::string out = detail::header(ModelKind::rtree, cfg);
  detail::put_u32(out, static_cast<uint32_t>(rt.nodes().size()));
  for (const RandomLabelTree::Node& nd : rt.nodes()) {
    detail::put_u32(out, nd.left ? *nd.left : detail::kNoNode);
    detail::put_u32(out, nd.right ? *nd.right : detail::kNoNode);
    detail::put_u32(out, nd.leaf_label);
    detail::put_regressor(out, nd.regressor);
  }
  detail::put_u32(out, static_cast<uint32_t>(rt.paths().size()));
  for (const auto& [label, path] : rt.paths()) {
    detail::put_u32(out, label);
    detail::put_u32(out, static_cast<uint32_t>(path.bits.size()));
    for (const bool bit : path.bits) detail::put_u8(out, bit ? 1 : 0);
  }
  detail::write_file(path, out);
}

inline void save_model(const std::string& path, const OaaModel& m, const TrainConfig& cfg) {
  std::string out = detail::header(ModelKind::oaa, cfg);
  detail::put_u32(out, static_cast<uint32_t>(m.regressors().size()));
  for (const auto& [label, reg] : m.regressors()) {
    detail::put_u32(out, label);
    detail::put_regressor(out, reg);
  }
  detail::write_file(path, out);
}

inline LoadedModel load_model(const std::string& path) {
  detail::ByteReader in(detail::read_file(path));
  char magic[4];
  for (char& c : magic) c = static_cast<char>(in.u8());
  if (std::memcmp(magic, detail::kModelMagic, 4) != 0) {
    throw ModelFormatError("bad magic in " + path);
  }
  const uint8_t version = in.u8();
  if (version != detail::kModelVersion) {
    throw ModelFormatError("unsupported model version " + std::to_string(version));
  }
  const uint8_t kind_byte = in.u8();
  if (kind_byte > 2) throw ModelFormatError("unknown model kind " + std::to_string(kind_byte));
  const ModelKind kind = static_cast<ModelKind>(kind_byte);
  const TrainConfig cfg = detail::read_config(in);

  const auto opt_node = [](uint32_t v) {
    return v == detail::kNoNode ? std::optional<NodeId>{} : std::optional<NodeId>{v};
  };

  if (kind == ModelKind::lomtree) {
    const uint32_t count = in.u32();
    const uint32_t root = in.u32();
    std::vector<TreeNode> nodes;
    nodes.reserve(count);
    for (uint32_t id = 0; id < count; ++id) {
      TreeNode nd;
      nd.id = id;
      nd.parent = opt_node(in.u32());
      nd.left = opt_node(in.u32());
      nd.right = opt_node(in.u32());
      nd.stats.min_leaf_count = in.u64();
      nd.stats.arrivals_total = in.u64();
      nd.stats.majority_label = in.u32();
      nd.stats.majority_count = in.u64();
      nd.stats.score_sum_total = in.f64();
      nd.stats.trained_total = in.u64();
      nd.stats.mean_score_total = in.f64();
      nd.regressor = detail::read_regressor(in);
      nodes.push_back(std::move(nd));
    }
    if (!in.exhausted()) throw ModelFormatError("trailing bytes in " + path);
    LomTree tree = [&] {
      try {
        return LomTree::from_parts(cfg, std::move(nodes), root);
      } catch (const std::logic_error& e) {
        throw ModelFormatError(std::string("inconsistent tree in model file: ") + e.what());
      } catch (const InvalidConfig& e) {
        throw ModelFormatError(std::string("inconsistent tree in model file: ") + e.what());
      }
    }();
    return LoadedModel{kind, cfg, std::move(tree)};
  }

  if (kind == ModelKind::rtree) {
    const uint32_t count = in.u32();
    std::vector<RandomLabelTree::Node> nodes;
    nodes.reserve(count);
    for (uint32_t id = 0; id < count; ++id) {
      RandomLabelTree::Node nd;
      const uint32_t left = in.u32();
      const uint32_t right = in.u32();
      nd.left = left == detail::kNoNode ? std::optional<uint32_t>{} : std::optional<uint32_t>{left};
      nd.right =
          right == detail::kNoNode ? std::optional<uint32_t>{} : std::optional<uint32_t>{right};
      nd.leaf_label = in.u32();
      nd.regressor = detail::read_regressor(in);
      nodes.push_back(std::move(nd));
    }
    const uint32_t label_count = in.u32();
    std::map<uint32_t, RandomLabelTree::LeafPath> paths;
    for (uint32_t i = 0; i < label_count; ++i) {
      const uint32_t label = in.u32();
      const uint32_t len = in.u32();
      RandomLabelTree::LeafPath leaf_path;
      leaf_path.bits.reserve(len);
      for (uint32_t b = 0; b < len; ++b) leaf_path.bits.push_back(in.u8() != 0);
      paths.emplace(label, std::move(leaf_path));
    }
    if (!in.exhausted()) throw ModelFormatError("trailing bytes in " + path);
    return LoadedModel{kind, cfg,
                       RandomLabelTree::from_parts(std::move(nodes), std::move(paths))};
  }

  const uint32_t count = in.u32();
  std::map<uint32_t, LinearRegressor> regs;
  for (uint32_t i = 0; i < count; ++i) {
    const uint32_t label = in.u32();
    regs.emplace(label, detail::read_regressor(in));
  }
  if (!in.exhausted()) throw ModelFormatError("trailing bytes in " + path);
  return LoadedModel{kind, cfg, OaaModel::from_parts(std::move(regs))};
}

}  // namespace lomtree
