#include "promptsent/checkpoint.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <map>
#include <type_traits>

namespace promptsent {

namespace {

constexpr char kMagic[4] = {'P', 'S', 'C', 'K'};

std::uint64_t fnv1a(const std::uint8_t* data, std::size_t n) {
  std::uint64_t h = 14695981039346656037ull;
  for (std::size_t i = 0; i < n; ++i) {
    h ^= data[i];
    h *= 1099511628211ull;
  }
  return h;
}

class Writer {
 public:
  void bytes(const void* p, std::size_t n) {
    auto b = static_cast<const std::uint8_t*>(p);
    buf_.insert(buf_.end(), b, b + n);
  }
  template <typename U>
  void le(U value) {
    for (std::size_t i = 0; i < sizeof(U); ++i) {
      buf_.push_back(static_cast<std::uint8_t>(value >> (8 * i)));
    }
  }
  void u32(std::size_t value) { le(static_cast<std::uint32_t>(value)); }
  void str(const std::string& s) {
    u32(s.size());
    bytes(s.data(), s.size());
  }
  std::vector<std::uint8_t>& buffer() { return buf_; }

 private:
  std::vector<std::uint8_t> buf_;
};

class Reader {
 public:
  Reader(const std::uint8_t* data, std::size_t n) : data_(data), n_(n) {}
  void need(std::size_t k) {
    if (n_ - pos_ < k) {
      throw CheckpointError(CheckpointErrorKind::kCorrupt, "unexpected end of data");
    }
  }
  template <typename U>
  U le() {
    need(sizeof(U));
    U value = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) {
      value |= static_cast<U>(data_[pos_ + i]) << (8 * i);
    }
    pos_ += sizeof(U);
    return value;
  }
  std::uint32_t u32() { return le<std::uint32_t>(); }
  std::string str() {
    const std::uint32_t len = u32();
    need(len);
    std::string s(reinterpret_cast<const char*>(data_ + pos_), len);
    pos_ += len;
    return s;
  }
  bool done() const { return pos_ == n_; }

 private:
  const std::uint8_t* data_;
  std::size_t n_;
  std::size_t pos_ = 0;
};

template <typename T>
void write_array(Writer& w, const std::string& name, const Shape& shape,
                 std::span<const T> values) {
  w.str(name);
  w.u32(shape.size());
  for (std::size_t d : shape) w.u32(d);
  for (T v : values) {
    if constexpr (std::is_same_v<T, float>) {
      w.le(std::bit_cast<std::uint32_t>(v));
    } else {
      w.le(std::bit_cast<std::uint64_t>(v));
    }
  }
}

struct RawArray {
  Shape shape;
  std::vector<double> values;
};

nlohmann::json train_json(const TrainConfig& t) {
  RunConfig c = default_run_config();
  c.train = t;
  auto j = to_json(c);
  nlohmann::json out;
  for (const char* key : {"lambda_ate", "lambda_asc", "lambda_ceg", "lr_max", "lr_min",
                          "epochs", "batch_size", "seed", "precision"}) {
    out[key] = j[key];
  }
  return out;
}

nlohmann::json manifest_json(const CheckpointManifest& m, bool wide, bool has_adam) {
  return {{"model", m.model.to_json()},
          {"train", train_json(m.train)},
          {"vocab_fingerprint", m.vocab_fingerprint},
          {"epoch", m.epoch},
          {"metrics", m.metrics},
          {"adam_step", m.adam_step},
          {"adam_moments", has_adam},
          {"dtype", wide ? "float64" : "float32"}};
}

struct Parsed {
  CheckpointManifest manifest;
  bool wide = false;
  bool has_adam = false;
  std::map<std::string, RawArray> arrays;
};

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError(CheckpointErrorKind::kIo, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) throw CheckpointError(CheckpointErrorKind::kIo, "cannot read " + path.string());
  return bytes;
}

Parsed parse(const std::vector<std::uint8_t>& bytes, bool with_arrays) {
  if (bytes.size() < sizeof kMagic || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw CheckpointError(CheckpointErrorKind::kCorrupt, "not a checkpoint (bad magic)");
  }
  Reader header(bytes.data() + 4, bytes.size() - 4);
  const std::uint32_t version = header.u32();
  if (version != kCheckpointVersion) {
    throw CheckpointError(CheckpointErrorKind::kVersion,
                          "checkpoint format version " + std::to_string(version) +
                              ", expected " + std::to_string(kCheckpointVersion));
  }
  if (bytes.size() < 16) {
    throw CheckpointError(CheckpointErrorKind::kCorrupt, "truncated checkpoint");
  }
  const std::size_t body = bytes.size() - 8;
  Reader trailer(bytes.data() + body, 8);
  if (trailer.le<std::uint64_t>() != fnv1a(bytes.data(), body)) {
    throw CheckpointError(CheckpointErrorKind::kCorrupt,
                          "checksum mismatch (truncated or modified file)");
  }

  Reader r(bytes.data() + 8, body - 8);
  Parsed out;
  try {
    auto j = nlohmann::json::parse(r.str());
    auto& m = out.manifest;
    m.model = ModelConfig::from_json(j.at("model"));
    m.train = parse_run_config(j.at("train")).train;
    m.vocab_fingerprint = j.at("vocab_fingerprint").get<std::uint64_t>();
    m.epoch = j.at("epoch").get<std::size_t>();
    m.metrics = j.at("metrics");
    m.adam_step = j.at("adam_step").get<std::uint64_t>();
    out.has_adam = j.at("adam_moments").get<bool>();
    const auto dtype = j.at("dtype").get<std::string>();
    if (dtype != "float32" && dtype != "float64") throw std::invalid_argument("dtype");
    out.wide = dtype == "float64";
    m.model.validate();
  } catch (const CheckpointError&) {
    throw;
  } catch (const std::exception& e) {
    throw CheckpointError(CheckpointErrorKind::kCorrupt,
                          std::string("bad manifest: ") + e.what());
  }
  if (!with_arrays) return out;

  const std::uint32_t count = r.u32();
  for (std::uint32_t a = 0; a < count; ++a) {
    std::string name = r.str();
    RawArray arr;
    const std::uint32_t rank = r.u32();
    if (rank > 8) throw CheckpointError(CheckpointErrorKind::kCorrupt, "bad rank in " + name);
    for (std::uint32_t i = 0; i < rank; ++i) arr.shape.push_back(r.u32());
    const std::size_t n = numel(arr.shape);
    r.need(n * (out.wide ? 8 : 4));
    arr.values.resize(n);
    for (auto& v : arr.values) {
      v = out.wide ? std::bit_cast<double>(r.le<std::uint64_t>())
                   : std::bit_cast<float>(r.le<std::uint32_t>());
    }
    if (!out.arrays.emplace(std::move(name), std::move(arr)).second) {
      throw CheckpointError(CheckpointErrorKind::kCorrupt, "duplicate array");
    }
  }
  if (!r.done()) throw CheckpointError(CheckpointErrorKind::kCorrupt, "trailing bytes");
  return out;
}

}  // namespace

std::string_view checkpoint_error_name(CheckpointErrorKind kind) {
  switch (kind) {
    case CheckpointErrorKind::kIo: return "io";
    case CheckpointErrorKind::kVersion: return "version";
    case CheckpointErrorKind::kCorrupt: return "corrupt";
    case CheckpointErrorKind::kVocabMismatch: return "vocab-mismatch";
  }
  return "?";
}

CheckpointError::CheckpointError(CheckpointErrorKind kind, const std::string& message)
    : std::runtime_error("checkpoint " + std::string(checkpoint_error_name(kind)) +
                         " error: " + message),
      kind_(kind) {}

template <typename T>
void save_checkpoint(const std::filesystem::path& path, const ModelParams<T>& params,
                     const CheckpointManifest& manifest, const TrainState<T>* state) {
  const auto named = params.named();
  const bool has_adam = state && state->adam.m.size() == named.size();
  constexpr bool wide = std::is_same_v<T, double>;

  Writer w;
  w.bytes(kMagic, 4);
  w.u32(kCheckpointVersion);
  w.str(manifest_json(manifest, wide, has_adam).dump());
  w.u32(named.size() * (has_adam ? 3 : 1));
  for (const auto& [name, t] : named) write_array<T>(w, name, t.shape(), t.data());
  if (has_adam) {
    for (std::size_t i = 0; i < named.size(); ++i) {
      const auto& shape = named[i].second.shape();
      write_array<T>(w, "adam.m." + named[i].first, shape, state->adam.m[i]);
      write_array<T>(w, "adam.v." + named[i].first, shape, state->adam.v[i]);
    }
  }
  auto& buf = w.buffer();
  w.le(fnv1a(buf.data(), buf.size()));

  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw CheckpointError(CheckpointErrorKind::kIo, "cannot write " + tmp.string());
    out.write(reinterpret_cast<const char*>(buf.data()),
              static_cast<std::streamsize>(buf.size()));
    if (!out) throw CheckpointError(CheckpointErrorKind::kIo, "cannot write " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    throw CheckpointError(CheckpointErrorKind::kIo,
                          "cannot rename to " + path.string() + ": " + ec.message());
  }
}

template <typename T>
LoadedCheckpoint<T> load_checkpoint(const std::filesystem::path& path,
                                    std::optional<std::uint64_t> expected_vocab) {
  auto parsed = parse(read_file(path), true);
  auto& m = parsed.manifest;
  if (expected_vocab && *expected_vocab != m.vocab_fingerprint) {
    throw CheckpointError(CheckpointErrorKind::kVocabMismatch,
                          "vocabulary fingerprint differs from the one the model was "
                          "trained with");
  }
  LoadedCheckpoint<T> out{m, ModelParams<T>::init(m.model, 0), {}};
  auto take = [&](const std::string& name, const Shape& shape, std::span<T> dst) {
    auto it = parsed.arrays.find(name);
    if (it == parsed.arrays.end()) {
      throw CheckpointError(CheckpointErrorKind::kCorrupt, "missing array " + name);
    }
    if (it->second.shape != shape) {
      throw CheckpointError(CheckpointErrorKind::kCorrupt,
                            "array " + name + " has shape " + shape_str(it->second.shape) +
                                ", expected " + shape_str(shape));
    }
    std::transform(it->second.values.begin(), it->second.values.end(), dst.begin(),
                   [](double v) { return static_cast<T>(v); });
    parsed.arrays.erase(it);
  };
  const auto named = out.params.named();
  for (auto [name, t] : named) take(name, t.shape(), t.mutable_data());
  if (parsed.has_adam) {
    for (const auto& [name, t] : named) {
      auto& mb = out.state.adam.m.emplace_back(t.size());
      auto& vb = out.state.adam.v.emplace_back(t.size());
      take("adam.m." + name, t.shape(), mb);
      take("adam.v." + name, t.shape(), vb);
    }
  }
  if (!parsed.arrays.empty()) {
    throw CheckpointError(CheckpointErrorKind::kCorrupt,
                          "unexpected array " + parsed.arrays.begin()->first);
  }
  out.state.adam.step_count = m.adam_step;
  out.state.epochs_done = m.epoch;
  return out;
}

CheckpointManifest read_checkpoint_manifest(const std::filesystem::path& path) {
  return parse(read_file(path), false).manifest;
}

template void save_checkpoint(const std::filesystem::path&, const ModelParams<float>&,
                              const CheckpointManifest&, const TrainState<float>*);
template void save_checkpoint(const std::filesystem::path&, const ModelParams<double>&,
                              const CheckpointManifest&, const TrainState<double>*);
template LoadedCheckpoint<float> load_checkpoint(const std::filesystem::path&,
                                                 std::optional<std::uint64_t>);
template LoadedCheckpoint<double> load_checkpoint(const std::filesystem::path&,
                                                  std::optional<std::uint64_t>);

}  // namespace promptsent
