#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace cim {

/// Flat parameter vector of a model. All direction/perturbation arithmetic
/// in the toolkit happens on this representation. 64-bit throughout: the
/// analyses subtract nearby vectors and check identities at 1e-10 scale.
using ParamVector = std::vector<double>;

/// Architecture of the multilayer-perceptron classifier. Activation is ReLU
/// on every hidden layer; the final layer emits raw logits.
struct MlpSpec {
  std::size_t input_dim = 0;
  std::vector<std::size_t> hidden_dims;
  std::size_t num_classes = 0;

  /// Throws std::invalid_argument unless input_dim >= 1, every hidden dim
  /// >= 1 and num_classes >= 2.
  void validate() const;

  /// [input_dim, hidden..., num_classes].
  std::vector<std::size_t> layer_dims() const;

  bool operator==(const MlpSpec&) const = default;
};

/// Total parameter count: sum over layers of fan_in*fan_out + fan_out.
std::size_t param_count(const MlpSpec& spec);

/// One labeled observation.
struct Sample {
  std::vector<double> x;
  std::size_t label = 0;
};

/// Parameter layout (pinned; the model file format and all gradient vectors
/// use it): layers in order, each layer stores its weight matrix row-major
/// as W[out][in] followed by the bias vector b[out].
class MlpModel {
 public:
  MlpModel(MlpSpec spec, ParamVector params);

  /// All parameters zero.
  static MlpModel zeros(const MlpSpec& spec);

  /// Weights uniform in +-sqrt(6 / (fan_in + fan_out)), biases zero, drawn
  /// from the pinned generator.
  static MlpModel seeded_init(const MlpSpec& spec, std::uint64_t seed);

  const MlpSpec& spec() const { return spec_; }
  const ParamVector& params() const { return params_; }

  /// Replaces the parameters; throws std::invalid_argument on length
  /// mismatch or non-finite entries.
  void set_params(ParamVector params);

 private:
  MlpSpec spec_;
  ParamVector params_;
};

/// Reusable scratch buffers for forward/backward passes. Hot loops (training,
/// surface sampling, prediction sweeps) keep one per worker to avoid
/// reallocations; the convenience wrappers below allocate their own.
class MlpWorkspace {
 public:
  MlpWorkspace() = default;
  explicit MlpWorkspace(const MlpSpec& spec) { resize(spec); }
  void resize(const MlpSpec& spec);

  std::vector<std::vector<double>> pre;   // pre-activations z_l, l = 1..L
  std::vector<std::vector<double>> act;   // post-activations a_l, l = 1..L
  std::vector<double> delta;              // backprop scratch
  std::vector<double> delta_prev;
  std::vector<std::size_t> offsets;       // parameter offset of each layer
  std::vector<std::size_t> dims;
};

// Kernels on an explicit parameter vector. These back both MlpModel and the
// perturbed-model evaluations, which never materialize an MlpModel per grid
// node.
void forward_logits(const MlpSpec& spec, std::span<const double> params,
                    std::span<const double> x, MlpWorkspace& ws);
double cross_entropy_loss(const MlpSpec& spec, std::span<const double> params,
                          const Sample& sample, MlpWorkspace& ws);
double loss_and_gradient(const MlpSpec& spec, std::span<const double> params,
                         const Sample& sample, MlpWorkspace& ws,
                         std::span<double> grad_out);
std::size_t predict_class(const MlpSpec& spec, std::span<const double> params,
                          std::span<const double> x, MlpWorkspace& ws);

/// Logits for one input. Pure; bit-identical outputs for identical inputs.
std::vector<double> forward(const MlpModel& model, std::span<const double> x);

/// Cross-entropy of the predicted distribution against the sample label,
/// computed with a log-sum-exp stabilized softmax. Never negative.
double sample_loss(const MlpModel& model, const Sample& sample);

/// Exact backpropagation gradient of sample_loss with respect to every
/// parameter, in the flat layout above.
ParamVector sample_gradient(const MlpModel& model, const Sample& sample);

/// Argmax over logits; ties break toward the smallest class index.
std::size_t predict(const MlpModel& model, std::span<const double> x);

/// Model file, versioned binary, little-endian:
///   "CIM1" | u32 dim_count | dim_count x u32 (input, hidden...) |
///   u32 num_classes | u64 param_count | param_count x f64
/// Readers reject wrong magic, inconsistent counts, truncation and trailing
/// bytes.
void save_model(const MlpModel& model, const std::filesystem::path& path);
MlpModel load_model(const std::filesystem::path& path);

}  // namespace cim
