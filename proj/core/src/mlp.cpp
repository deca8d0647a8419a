#include "cim/mlp.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>

#include "cim/rng.hpp"

namespace cim {

void MlpSpec::validate() const {
  if (input_dim < 1) throw std::invalid_argument("MlpSpec: input_dim must be >= 1");
  for (std::size_t h : hidden_dims) {
    if (h < 1) throw std::invalid_argument("MlpSpec: hidden dims must be >= 1");
  }
  if (num_classes < 2) throw std::invalid_argument("MlpSpec: num_classes must be >= 2");
}

std::vector<std::size_t> MlpSpec::layer_dims() const {
  std::vector<std::size_t> dims;
  dims.reserve(hidden_dims.size() + 2);
  dims.push_back(input_dim);
  dims.insert(dims.end(), hidden_dims.begin(), hidden_dims.end());
  dims.push_back(num_classes);
  return dims;
}

std::size_t param_count(const MlpSpec& spec) {
  spec.validate();
  const auto dims = spec.layer_dims();
  std::size_t total = 0;
  for (std::size_t l = 1; l < dims.size(); ++l) {
    total += dims[l - 1] * dims[l] + dims[l];
  }
  return total;
}

namespace {

void check_finite(const ParamVector& params) {
  for (double v : params) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument("ParamVector: non-finite entry");
    }
  }
}

}  // namespace

MlpModel::MlpModel(MlpSpec spec, ParamVector params)
    : spec_(std::move(spec)), params_(std::move(params)) {
  spec_.validate();
  if (params_.size() != param_count(spec_)) {
    throw std::invalid_argument("MlpModel: parameter vector length " +
                                std::to_string(params_.size()) + " does not match spec (" +
                                std::to_string(param_count(spec_)) + ")");
  }
  check_finite(params_);
}

MlpModel MlpModel::zeros(const MlpSpec& spec) {
  return MlpModel(spec, ParamVector(param_count(spec), 0.0));
}

MlpModel MlpModel::seeded_init(const MlpSpec& spec, std::uint64_t seed) {
  spec.validate();
  ParamVector params(param_count(spec), 0.0);
  SplitMix64 rng(seed);
  const auto dims = spec.layer_dims();
  std::size_t off = 0;
  for (std::size_t l = 1; l < dims.size(); ++l) {
    const std::size_t fan_in = dims[l - 1];
    const std::size_t fan_out = dims[l];
    const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    for (std::size_t k = 0; k < fan_in * fan_out; ++k) {
      params[off + k] = rng.uniform(-bound, bound);
    }
    off += fan_in * fan_out + fan_out;  // biases stay zero
  }
  return MlpModel(spec, std::move(params));
}

void MlpModel::set_params(ParamVector params) {
  if (params.size() != params_.size()) {
    throw std::invalid_argument("set_params: length mismatch");
  }
  check_finite(params);
  params_ = std::move(params);
}

void MlpWorkspace::resize(const MlpSpec& spec) {
  dims = spec.layer_dims();
  const std::size_t layers = dims.size() - 1;
  pre.assign(layers, {});
  act.assign(layers, {});
  offsets.assign(layers, 0);
  std::size_t off = 0;
  std::size_t widest = 0;
  for (std::size_t l = 0; l < layers; ++l) {
    pre[l].assign(dims[l + 1], 0.0);
    act[l].assign(dims[l + 1], 0.0);
    offsets[l] = off;
    off += dims[l] * dims[l + 1] + dims[l + 1];
    widest = std::max(widest, dims[l + 1]);
  }
  delta.assign(widest, 0.0);
  delta_prev.assign(widest, 0.0);
}

namespace {

void ensure_sized(const MlpSpec& spec, MlpWorkspace& ws) {
  if (ws.dims.empty() || ws.dims != spec.layer_dims()) ws.resize(spec);
}

void check_input(const MlpSpec& spec, std::span<const double> x) {
  if (x.size() != spec.input_dim) {
    throw std::invalid_argument("forward: expected " + std::to_string(spec.input_dim) +
                                " features, got " + std::to_string(x.size()));
  }
  for (double v : x) {
    if (!std::isfinite(v)) throw std::invalid_argument("forward: non-finite feature");
  }
}

void check_sample(const MlpSpec& spec, const Sample& sample) {
  check_input(spec, sample.x);
  if (sample.label >= spec.num_classes) {
    throw std::invalid_argument("sample label " + std::to_string(sample.label) +
                                " out of range for " + std::to_string(spec.num_classes) +
                                " classes");
  }
}

// Runs the net, filling ws.pre/ws.act. The logits end up in ws.act.back().
void run_forward(const MlpSpec& spec, std::span<const double> params,
                 std::span<const double> x, MlpWorkspace& ws) {
  const auto& dims = ws.dims;
  const std::size_t layers = dims.size() - 1;
  std::span<const double> in = x;
  for (std::size_t l = 0; l < layers; ++l) {
    const std::size_t fan_in = dims[l];
    const std::size_t fan_out = dims[l + 1];
    const double* w = params.data() + ws.offsets[l];
    const double* b = w + fan_in * fan_out;
    auto& z = ws.pre[l];
    for (std::size_t o = 0; o < fan_out; ++o) {
      double acc = b[o];
      const double* row = w + o * fan_in;
      for (std::size_t i = 0; i < fan_in; ++i) acc += row[i] * in[i];
      z[o] = acc;
    }
    auto& a = ws.act[l];
    if (l + 1 < layers) {
      for (std::size_t o = 0; o < fan_out; ++o) a[o] = z[o] > 0.0 ? z[o] : 0.0;
    } else {
      a = z;  // logits
    }
    in = a;
  }
}

// softmax probabilities into ws.delta; returns the stabilized cross entropy.
double softmax_loss(const std::vector<double>& logits, std::size_t label,
                    std::vector<double>& probs) {
  const std::size_t n = logits.size();
  double m = logits[0];
  for (std::size_t i = 1; i < n; ++i) m = std::max(m, logits[i]);
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    probs[i] = std::exp(logits[i] - m);
    sum += probs[i];
  }
  for (std::size_t i = 0; i < n; ++i) probs[i] /= sum;
  return std::log(sum) + m - logits[label];
}

}  // namespace

void forward_logits(const MlpSpec& spec, std::span<const double> params,
                    std::span<const double> x, MlpWorkspace& ws) {
  check_input(spec, x);
  ensure_sized(spec, ws);
  run_forward(spec, params, x, ws);
}

double cross_entropy_loss(const MlpSpec& spec, std::span<const double> params,
                          const Sample& sample, MlpWorkspace& ws) {
  check_sample(spec, sample);
  ensure_sized(spec, ws);
  run_forward(spec, params, sample.x, ws);
  return softmax_loss(ws.act.back(), sample.label, ws.delta);
}

double loss_and_gradient(const MlpSpec& spec, std::span<const double> params,
                         const Sample& sample, MlpWorkspace& ws,
                         std::span<double> grad_out) {
  check_sample(spec, sample);
  ensure_sized(spec, ws);
  if (grad_out.size() != params.size()) {
    throw std::invalid_argument("loss_and_gradient: gradient buffer size mismatch");
  }
  run_forward(spec, params, sample.x, ws);

  const auto& dims = ws.dims;
  const std::size_t layers = dims.size() - 1;
  const double loss = softmax_loss(ws.act.back(), sample.label, ws.delta);
  ws.delta[sample.label] -= 1.0;  // dL/dz = softmax - onehot

  for (std::size_t l = layers; l-- > 0;) {
    const std::size_t fan_in = dims[l];
    const std::size_t fan_out = dims[l + 1];
    const double* w = params.data() + ws.offsets[l];
    double* gw = grad_out.data() + ws.offsets[l];
    double* gb = gw + fan_in * fan_out;
    std::span<const double> in =
        l == 0 ? std::span<const double>(sample.x) : std::span<const double>(ws.act[l - 1]);

    for (std::size_t o = 0; o < fan_out; ++o) {
      const double d = ws.delta[o];
      double* grow = gw + o * fan_in;
      for (std::size_t i = 0; i < fan_in; ++i) grow[i] = d * in[i];
      gb[o] = d;
    }
    if (l > 0) {
      const auto& z_prev = ws.pre[l - 1];
      for (std::size_t i = 0; i < fan_in; ++i) {
        double acc = 0.0;
        for (std::size_t o = 0; o < fan_out; ++o) acc += w[o * fan_in + i] * ws.delta[o];
        // ReLU subgradient at 0 is 0
        ws.delta_prev[i] = z_prev[i] > 0.0 ? acc : 0.0;
      }
      std::swap(ws.delta, ws.delta_prev);
    }
  }
  return loss;
}

std::size_t predict_class(const MlpSpec& spec, std::span<const double> params,
                          std::span<const double> x, MlpWorkspace& ws) {
  check_input(spec, x);
  ensure_sized(spec, ws);
  run_forward(spec, params, x, ws);
  const auto& logits = ws.act.back();
  std::size_t best = 0;
  for (std::size_t i = 1; i < logits.size(); ++i) {
    if (logits[i] > logits[best]) best = i;
  }
  return best;
}

std::vector<double> forward(const MlpModel& model, std::span<const double> x) {
  MlpWorkspace ws(model.spec());
  forward_logits(model.spec(), model.params(), x, ws);
  return ws.act.back();
}

double sample_loss(const MlpModel& model, const Sample& sample) {
  MlpWorkspace ws(model.spec());
  return cross_entropy_loss(model.spec(), model.params(), sample, ws);
}

ParamVector sample_gradient(const MlpModel& model, const Sample& sample) {
  MlpWorkspace ws(model.spec());
  ParamVector grad(model.params().size(), 0.0);
  loss_and_gradient(model.spec(), model.params(), sample, ws, grad);
  return grad;
}

std::size_t predict(const MlpModel& model, std::span<const double> x) {
  MlpWorkspace ws(model.spec());
  return predict_class(model.spec(), model.params(), x, ws);
}

namespace {

constexpr char kMagic[4] = {'C', 'I', 'M', '1'};

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

class ByteReader {
 public:
  ByteReader(const std::string& data, const std::filesystem::path& path)
      : data_(data), path_(path) {}

  std::uint32_t u32() { return static_cast<std::uint32_t>(bytes(4)); }
  std::uint64_t u64() { return bytes(8); }
  double f64() { return std::bit_cast<double>(bytes(8)); }

  void expect_magic() {
    if (data_.size() < 4 || std::memcmp(data_.data(), kMagic, 4) != 0) {
      fail("bad magic");
    }
    pos_ = 4;
  }

  void expect_end() {
    if (pos_ != data_.size()) fail("trailing bytes");
  }

  [[noreturn]] void fail(const std::string& why) {
    throw std::runtime_error("model file " + path_.string() + ": " + why);
  }

 private:
  std::uint64_t bytes(int n) {
    if (pos_ + static_cast<std::size_t>(n) > data_.size()) fail("truncated");
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) {
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i);
    }
    pos_ += static_cast<std::size_t>(n);
    return v;
  }

  const std::string& data_;
  std::filesystem::path path_;
  std::size_t pos_ = 0;
};

}  // namespace

void save_model(const MlpModel& model, const std::filesystem::path& path) {
  const MlpSpec& spec = model.spec();
  std::string out;
  out.append(kMagic, 4);
  put_u32(out, static_cast<std::uint32_t>(1 + spec.hidden_dims.size()));
  put_u32(out, static_cast<std::uint32_t>(spec.input_dim));
  for (std::size_t h : spec.hidden_dims) put_u32(out, static_cast<std::uint32_t>(h));
  put_u32(out, static_cast<std::uint32_t>(spec.num_classes));
  put_u64(out, static_cast<std::uint64_t>(model.params().size()));
  for (double v : model.params()) put_u64(out, std::bit_cast<std::uint64_t>(v));

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw std::runtime_error("write failed: " + path.string());
}

MlpModel load_model(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path.string());
  std::string data((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());

  ByteReader r(data, path);
  r.expect_magic();
  const std::uint32_t dim_count = r.u32();
  if (dim_count < 1 || dim_count > 1024) r.fail("implausible layer count");
  MlpSpec spec;
  spec.input_dim = r.u32();
  for (std::uint32_t i = 1; i < dim_count; ++i) spec.hidden_dims.push_back(r.u32());
  spec.num_classes = r.u32();
  try {
    spec.validate();
  } catch (const std::invalid_argument& e) {
    r.fail(e.what());
  }
  const std::uint64_t p = r.u64();
  if (p != param_count(spec)) r.fail("parameter count does not match architecture");
  ParamVector params(p);
  for (std::uint64_t i = 0; i < p; ++i) params[i] = r.f64();
  r.expect_end();
  try {
    return MlpModel(std::move(spec), std::move(params));
  } catch (const std::invalid_argument& e) {
    r.fail(e.what());
  }
}

}  // namespace cim
