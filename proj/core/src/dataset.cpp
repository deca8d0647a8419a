#include "cim/dataset.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "cim/rng.hpp"

namespace cim {

void DatasetSpec::validate() const {
  if (num_classes < 2) throw std::invalid_argument("DatasetSpec: num_classes must be >= 2");
  if (dim < 1) throw std::invalid_argument("DatasetSpec: dim must be >= 1");
  if (per_class < 1) throw std::invalid_argument("DatasetSpec: per_class must be >= 1");
  if (!(class_std > 0.0)) throw std::invalid_argument("DatasetSpec: class_std must be > 0");
  if (class_means.size() != num_classes) {
    throw std::invalid_argument("DatasetSpec: need one mean per class");
  }
  for (const auto& m : class_means) {
    if (m.size() != dim) throw std::invalid_argument("DatasetSpec: mean dimension mismatch");
    for (double v : m) {
      if (!std::isfinite(v)) throw std::invalid_argument("DatasetSpec: non-finite mean");
    }
  }
}

Dataset::Dataset(std::vector<Sample> samples, std::size_t num_classes, std::size_t dim)
    : samples_(std::move(samples)), num_classes_(num_classes), dim_(dim) {
  if (num_classes_ < 1) throw std::invalid_argument("Dataset: num_classes must be >= 1");
  by_class_.assign(num_classes_, {});
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    const Sample& s = samples_[i];
    if (s.label >= num_classes_) {
      throw std::invalid_argument("Dataset: label " + std::to_string(s.label) +
                                  " out of range at sample " + std::to_string(i));
    }
    if (s.x.size() != dim_) {
      throw std::invalid_argument("Dataset: feature dimension mismatch at sample " +
                                  std::to_string(i));
    }
    for (double v : s.x) {
      if (!std::isfinite(v)) {
        throw std::invalid_argument("Dataset: non-finite feature at sample " +
                                    std::to_string(i));
      }
    }
    by_class_[s.label].push_back(i);
  }
}

const std::vector<std::size_t>& Dataset::class_indices(std::size_t c) const {
  if (c >= num_classes_) throw std::invalid_argument("class_indices: class out of range");
  return by_class_[c];
}

std::vector<std::int64_t> Dataset::class_counts() const {
  std::vector<std::int64_t> counts(num_classes_, 0);
  for (std::size_t c = 0; c < num_classes_; ++c) {
    counts[c] = static_cast<std::int64_t>(by_class_[c].size());
  }
  return counts;
}

Dataset generate(const DatasetSpec& spec) {
  spec.validate();
  SplitMix64 rng(mix64(spec.seed));
  std::vector<Sample> samples;
  samples.reserve(spec.num_classes * spec.per_class);
  for (std::size_t c = 0; c < spec.num_classes; ++c) {
    for (std::size_t i = 0; i < spec.per_class; ++i) {
      Sample s;
      s.label = c;
      s.x.resize(spec.dim);
      for (std::size_t k = 0; k < spec.dim; ++k) {
        s.x[k] = spec.class_means[c][k] + spec.class_std * rng.normal();
      }
      samples.push_back(std::move(s));
    }
  }
  return Dataset(std::move(samples), spec.num_classes, spec.dim);
}

Dataset interference_preset(double overlap, std::uint64_t seed) {
  if (!(overlap >= 0.0 && overlap <= 1.0)) {
    throw std::invalid_argument("interference_preset: overlap must be in [0, 1]");
  }
  const double half = 2.0 * (1.0 - overlap);  // pair distance = 4 * (1 - overlap)
  DatasetSpec spec;
  spec.num_classes = 4;
  spec.dim = 2;
  spec.per_class = 500;
  spec.class_std = 1.0;
  spec.seed = seed;
  spec.class_means = {
      {-half, 0.0},
      {+half, 0.0},
      {-5.0, 12.0},
      {+5.0, 12.0},
  };
  return generate(spec);
}

std::pair<Dataset, Dataset> stratified_split(const Dataset& data, double train_fraction,
                                             std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw std::invalid_argument("stratified_split: train_fraction must be in (0, 1)");
  }
  std::vector<Sample> train, test;
  for (std::size_t c = 0; c < data.num_classes(); ++c) {
    auto idx = data.class_indices(c);
    SplitMix64 rng(seed_for(seed, 0x517Au + c));
    shuffle(idx, rng);
    const std::size_t n_train =
        static_cast<std::size_t>(std::floor(train_fraction * static_cast<double>(idx.size())));
    for (std::size_t i = 0; i < idx.size(); ++i) {
      (i < n_train ? train : test).push_back(data.samples()[idx[i]]);
    }
  }
  return {Dataset(std::move(train), data.num_classes(), data.dim()),
          Dataset(std::move(test), data.num_classes(), data.dim())};
}

void save_csv(const Dataset& data, const std::filesystem::path& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
  f << "y";
  for (std::size_t k = 0; k < data.dim(); ++k) f << ",x" << k;
  f << "\n";
  char buf[64];
  for (const Sample& s : data.samples()) {
    f << s.label;
    for (double v : s.x) {
      std::snprintf(buf, sizeof(buf), "%.17g", v);
      f << ',' << buf;
    }
    f << "\n";
  }
  if (!f) throw std::runtime_error("write failed: " + path.string());
}

namespace {

[[noreturn]] void parse_fail(const std::filesystem::path& path, std::size_t line,
                             const std::string& why) {
  throw std::runtime_error(path.string() + ":" + std::to_string(line) + ": " + why);
}

}  // namespace

Dataset load_csv(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path.string());

  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(f, line)) parse_fail(path, line_no, "empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line.rfind("y", 0) != 0) parse_fail(path, line_no, "header must start with 'y'");
  std::size_t dim = 0;
  for (char ch : line) {
    if (ch == ',') ++dim;
  }

  std::vector<Sample> samples;
  std::size_t max_label = 0;
  while (std::getline(f, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;

    Sample s;
    s.x.reserve(dim);
    std::size_t pos = 0;
    std::size_t field = 0;
    while (pos <= line.size()) {
      std::size_t comma = line.find(',', pos);
      if (comma == std::string::npos) comma = line.size();
      const std::string tok = line.substr(pos, comma - pos);
      if (tok.empty()) parse_fail(path, line_no, "empty field");
      char* end = nullptr;
      if (field == 0) {
        const long long y = std::strtoll(tok.c_str(), &end, 10);
        if (end != tok.c_str() + tok.size()) {
          parse_fail(path, line_no, "label is not an integer: '" + tok + "'");
        }
        if (y < 0) parse_fail(path, line_no, "label out of range: " + tok);
        s.label = static_cast<std::size_t>(y);
      } else {
        const double v = std::strtod(tok.c_str(), &end);
        if (end != tok.c_str() + tok.size()) {
          parse_fail(path, line_no, "bad numeric field: '" + tok + "'");
        }
        if (!std::isfinite(v)) parse_fail(path, line_no, "non-finite feature: '" + tok + "'");
        s.x.push_back(v);
      }
      ++field;
      pos = comma + 1;
      if (comma == line.size()) break;
    }
    if (s.x.size() != dim) {
      parse_fail(path, line_no,
                 "expected " + std::to_string(dim) + " features, got " +
                     std::to_string(s.x.size()));
    }
    max_label = std::max(max_label, s.label);
    samples.push_back(std::move(s));
  }
  if (samples.empty()) parse_fail(path, line_no, "no data rows");
  return Dataset(std::move(samples), max_label + 1, dim);
}

}  // namespace cim
