#include "cim/cctm.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>

#include "cim/parallel.hpp"

namespace cim {

double CCTMatrix::rate(std::size_t c1, std::size_t c2) const {
  if (class_sizes[c1] == 0) return 0.0;
  return static_cast<double>(counts[c1][c2]) / static_cast<double>(class_sizes[c1]);
}

std::vector<std::vector<double>> CCTMatrix::rates() const {
  const std::size_t c = num_classes();
  std::vector<std::vector<double>> r(c, std::vector<double>(c, 0.0));
  for (std::size_t i = 0; i < c; ++i) {
    for (std::size_t j = 0; j < c; ++j) r[i][j] = rate(i, j);
  }
  return r;
}

namespace {

std::vector<std::size_t> predict_all(const MlpModel& model, const Dataset& data,
                                     int threads) {
  if (data.size() == 0) throw std::invalid_argument("compute_cctm: empty dataset");
  const std::size_t c = model.spec().num_classes;
  for (const Sample& s : data.samples()) {
    if (s.label >= c) {
      throw std::invalid_argument("compute_cctm: label " + std::to_string(s.label) +
                                  " out of range for model with " + std::to_string(c) +
                                  " classes");
    }
  }
  std::vector<std::size_t> preds(data.size());
  parallel_chunks(data.size(), threads, [&](std::size_t, std::size_t begin, std::size_t end) {
    MlpWorkspace ws(model.spec());
    for (std::size_t i = begin; i < end; ++i) {
      preds[i] = predict_class(model.spec(), model.params(), data.samples()[i].x, ws);
    }
  });
  return preds;
}

}  // namespace

CCTMatrix compute_cctm(const MlpModel& model, const Dataset& data, int threads) {
  const auto preds = predict_all(model, data, threads);
  std::vector<std::size_t> labels(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) labels[i] = data.samples()[i].label;
  return compute_cctm(labels, preds, model.spec().num_classes);
}

CCTMatrix compute_cctm(const std::vector<std::size_t>& labels,
                       const std::vector<std::size_t>& predictions,
                       std::size_t num_classes) {
  if (labels.empty()) throw std::invalid_argument("compute_cctm: empty input");
  if (labels.size() != predictions.size()) {
    throw std::invalid_argument("compute_cctm: labels/predictions size mismatch");
  }
  CCTMatrix m;
  m.counts.assign(num_classes, std::vector<std::int64_t>(num_classes, 0));
  m.class_sizes.assign(num_classes, 0);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] >= num_classes || predictions[i] >= num_classes) {
      throw std::invalid_argument("compute_cctm: class index out of range at sample " +
                                  std::to_string(i));
    }
    ++m.counts[labels[i]][predictions[i]];
    ++m.class_sizes[labels[i]];
  }
  return m;
}

std::vector<double> recall(const CCTMatrix& cctm) {
  std::vector<double> diag(cctm.num_classes());
  for (std::size_t c = 0; c < cctm.num_classes(); ++c) diag[c] = cctm.rate(c, c);
  return diag;
}

double symmetry_score(const CCTMatrix& cctm, std::size_t c1, std::size_t c2) {
  if (c1 == c2) throw std::invalid_argument("symmetry_score: classes must differ");
  if (c1 >= cctm.num_classes() || c2 >= cctm.num_classes()) {
    throw std::invalid_argument("symmetry_score: class out of range");
  }
  if (cctm.empty_class(c1) || cctm.empty_class(c2)) {
    throw std::invalid_argument("symmetry_score: both classes must be nonempty");
  }
  const double r12 = cctm.rate(c1, c2);
  const double r21 = cctm.rate(c2, c1);
  const double hi = std::max(r12, r21);
  const double lo = std::min(r12, r21);
  return hi / std::max(lo, 1e-12);
}

double mistake_rate(const MlpModel& model, const Dataset& data, int threads) {
  if (data.size() == 0) throw std::invalid_argument("mistake_rate: empty dataset");
  const auto preds = predict_all(model, data, threads);
  std::int64_t wrong = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (preds[i] != data.samples()[i].label) ++wrong;
  }
  return static_cast<double>(wrong) / static_cast<double>(data.size());
}

void save_cctm_csv(const CCTMatrix& cctm, const std::filesystem::path& path) {
  const std::size_t c = cctm.num_classes();
  auto header = [&](std::ofstream& f) {
    f << "class";
    for (std::size_t j = 0; j < c; ++j) f << ",c" << j;
    f << "\n";
  };

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
  header(f);
  char buf[32];
  for (std::size_t i = 0; i < c; ++i) {
    f << 'c' << i;
    for (std::size_t j = 0; j < c; ++j) {
      std::snprintf(buf, sizeof(buf), "%.6f", cctm.rate(i, j));
      f << ',' << buf;
    }
    f << "\n";
  }
  if (!f) throw std::runtime_error("write failed: " + path.string());

  std::filesystem::path counts_path = path;
  counts_path.replace_filename(path.stem().string() + "_counts" + path.extension().string());
  std::ofstream g(counts_path, std::ios::binary | std::ios::trunc);
  if (!g) throw std::runtime_error("cannot open " + counts_path.string() + " for writing");
  header(g);
  for (std::size_t i = 0; i < c; ++i) {
    g << 'c' << i;
    for (std::size_t j = 0; j < c; ++j) g << ',' << cctm.counts[i][j];
    g << "\n";
  }
  if (!g) throw std::runtime_error("write failed: " + counts_path.string());
}

}  // namespace cim
