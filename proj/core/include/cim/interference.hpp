#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cim/dataset.hpp"
#include "cim/mlp.hpp"

namespace cim {

/// Per-class mean loss gradients of a trained model: gradient c is the
/// average of sample_gradient over the samples of class c (the class's ego
/// direction). Weight decay is not part of these gradients; it is
/// data-independent and would add the same vector to every class.
struct ClassGradientSet {
  std::vector<ParamVector> gradients;      // indexed by class
  std::vector<std::int64_t> class_sizes;
  std::uint64_t base_model_digest = 0;

  std::size_t num_classes() const { return gradients.size(); }
};

/// Mean sample gradient over the samples of one class. Samples are reduced
/// in fixed chunk order, so the result does not depend on the thread count.
ParamVector class_gradient(const MlpModel& model, const Dataset& data, std::size_t c,
                           int threads = 1);

/// One class_gradient per class; throws listing the missing classes if any
/// class has no samples.
ClassGradientSet compute_class_gradients(const MlpModel& model, const Dataset& data,
                                         int threads = 1);

/// w - alpha * g, elementwise: one greedy step for a single class.
ParamVector ego_model(const ParamVector& w_star, const ParamVector& grad, double alpha);

/// w - (theta1 * g1 + theta2 * g2), elementwise.
ParamVector interference_model(const ParamVector& w_star, const ParamVector& g1,
                               const ParamVector& g2, double theta1, double theta2);

/// Numerically checks that the interference model at (lambda * alpha_i,
/// (1 - lambda) * alpha_j) equals the convex combination
/// lambda * ego(c1, alpha_i) + (1 - lambda) * ego(c2, alpha_j).
/// Returns the max absolute coordinate difference.
double check_convex_combination(const ParamVector& w_star, const ParamVector& g1,
                                const ParamVector& g2, double alpha_i, double alpha_j,
                                double lambda);

enum class SurfaceMetric { MistakeRate, CrossEntropy, ClassLoss };

/// "mistake" | "xent" | "class:<k>".
std::string metric_name(SurfaceMetric metric, std::size_t metric_class);
std::optional<std::pair<SurfaceMetric, std::size_t>> parse_metric(const std::string& name);

/// A square evaluation grid in the span of two class ego directions:
/// theta in [-sigma, sigma] on both axes, points_per_axis points including
/// the endpoints. points_per_axis must be odd so (0, 0) -- the unperturbed
/// model -- is a grid node.
struct SurfaceSpec {
  std::size_t c1 = 0;
  std::size_t c2 = 1;
  double sigma = 0.5;
  int points_per_axis = 19;
  SurfaceMetric metric = SurfaceMetric::MistakeRate;
  std::size_t metric_class = 0;  // used by SurfaceMetric::ClassLoss

  void validate() const;
};

struct SurfaceGrid {
  SurfaceSpec spec;
  std::vector<double> theta_axis;            // shared by both axes
  std::vector<std::vector<double>> values;   // values[i][j] at (axis[i], axis[j])

  std::size_t points() const { return theta_axis.size(); }
  double center_value() const;
};

/// Deterministic metric evaluation of an explicit parameter vector over the
/// dataset. Sums are reduced in fixed chunk order; the same routine backs
/// every grid node and the direct evaluations, so those agree bit-exactly.
double evaluate_metric(const MlpSpec& spec, const ParamVector& params, const Dataset& data,
                       SurfaceMetric metric, std::size_t metric_class = 0, int threads = 1);

/// Evaluates the metric of the perturbed model at every grid node. Nodes are
/// independent tasks (each writes its own slot), so the grid is identical
/// for any thread count and any evaluation order.
SurfaceGrid sample_surface(const MlpModel& model, const ClassGradientSet& grads,
                           const Dataset& data, const SurfaceSpec& spec, int threads = 1);

/// Center/min/max plus the fraction of nodes whose value is within tau of
/// (or below) the center value -- the flat-area fraction around the model.
struct SurfaceStats {
  double center = 0.0;
  double min = 0.0;
  double max = 0.0;
  double flat_fraction = 0.0;
  double tau = 0.02;
};

SurfaceStats surface_stats(const SurfaceGrid& grid, double tau = 0.02);

/// CSV "theta1,theta2,value", row-major, thetas at 17 significant digits,
/// values at 6 decimals.
void save_surface_csv(const SurfaceGrid& grid, const std::filesystem::path& path);

/// JSON {center, min, max, flat_fraction, tau, sigma, points, metric, c1, c2}.
void save_surface_stats_json(const SurfaceGrid& grid, const SurfaceStats& stats,
                             const std::filesystem::path& path);

}  // namespace cim
