#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <utility>
#include <vector>

#include "cim/mlp.hpp"

namespace cim {

/// Synthetic Gaussian-mixture specification: per_class i.i.d. draws from
/// Normal(mean_c, class_std^2 I) for each class.
struct DatasetSpec {
  std::size_t num_classes = 0;
  std::size_t dim = 0;
  std::size_t per_class = 0;
  std::vector<std::vector<double>> class_means;  // num_classes x dim
  double class_std = 1.0;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Immutable labeled dataset. Per-class index lists are precomputed so the
/// class subsets D_c are cheap to iterate.
class Dataset {
 public:
  Dataset() = default;
  Dataset(std::vector<Sample> samples, std::size_t num_classes, std::size_t dim);

  const std::vector<Sample>& samples() const { return samples_; }
  std::size_t size() const { return samples_.size(); }
  std::size_t num_classes() const { return num_classes_; }
  std::size_t dim() const { return dim_; }

  const std::vector<std::size_t>& class_indices(std::size_t c) const;
  std::vector<std::int64_t> class_counts() const;

 private:
  std::vector<Sample> samples_;
  std::size_t num_classes_ = 0;
  std::size_t dim_ = 0;
  std::vector<std::vector<std::size_t>> by_class_;
};

/// Deterministic per seed: samples are drawn class-major, sample-major,
/// coordinate-major from one pinned generator stream.
Dataset generate(const DatasetSpec& spec);

/// Four classes in the plane with a tunable hard pair: classes 0/1 sit
/// (1 - overlap) * 4 apart on the x-axis (std 1), classes 2/3 sit 10 apart
/// and well away from the 0/1 pair. 500 samples per class.
Dataset interference_preset(double overlap, std::uint64_t seed);

/// Stratified split: the samples of each class are shuffled by the pinned
/// generator and the first floor(train_fraction * n_c) go to train.
std::pair<Dataset, Dataset> stratified_split(const Dataset& data, double train_fraction,
                                             std::uint64_t seed);

/// CSV with header "y,x0,...,x{d-1}", one sample per row, values printed at
/// 17 significant digits so save/load round-trips bit-exactly. UTF-8, LF,
/// '.' decimal separator.
void save_csv(const Dataset& data, const std::filesystem::path& path);
Dataset load_csv(const std::filesystem::path& path);

}  // namespace cim
