#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "cim/dataset.hpp"
#include "cim/mlp.hpp"

namespace cim {

/// Cross-class test matrix. counts[c1][c2] is the number of true-c1 samples
/// predicted as c2; rates are derived from the integer counts on demand and
/// never accumulated in floating point, so row-stochasticity and permutation
/// invariance are exact. Rows of empty classes are all zero and flagged via
/// empty_class().
struct CCTMatrix {
  std::vector<std::vector<std::int64_t>> counts;
  std::vector<std::int64_t> class_sizes;

  std::size_t num_classes() const { return class_sizes.size(); }
  bool empty_class(std::size_t c) const { return class_sizes[c] == 0; }

  /// counts[c1][c2] / class_sizes[c1]; 0 for empty classes.
  double rate(std::size_t c1, std::size_t c2) const;
  std::vector<std::vector<double>> rates() const;
};

/// Counts predictions of the model over the dataset. Labels must be within
/// the model's class range. The prediction pass may run on several threads;
/// counts are merged as integers so the result is identical for any count.
CCTMatrix compute_cctm(const MlpModel& model, const Dataset& data, int threads = 1);

/// Same counting from precomputed label/prediction vectors.
CCTMatrix compute_cctm(const std::vector<std::size_t>& labels,
                       const std::vector<std::size_t>& predictions,
                       std::size_t num_classes);

/// Diagonal of the rates: per-class recall. Empty classes report 0.
std::vector<double> recall(const CCTMatrix& cctm);

/// max(r12, r21) / max(min(r12, r21), 1e-12) for the off-diagonal pair;
/// values near 1 mean the two classes confuse each other symmetrically.
double symmetry_score(const CCTMatrix& cctm, std::size_t c1, std::size_t c2);

/// Fraction of samples whose argmax prediction differs from the label.
double mistake_rate(const MlpModel& model, const Dataset& data, int threads = 1);

/// Writes rates as CSV (header "class,<name_0>,...", 6 decimals) plus a
/// companion "<stem>_counts.csv" with the integer counts.
void save_cctm_csv(const CCTMatrix& cctm, const std::filesystem::path& path);

}  // namespace cim
