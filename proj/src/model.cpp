#include "omc/model.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "omc/errors.hpp"

namespace omc {

double coherence(const DenseMatrix& w) {
  if (w.rows < w.cols || w.cols < 1)
    throw ConfigError("coherence: need a tall orthonormal matrix");
  double defect = orthonormality_defect(w);
  if (defect > 1e-8)
    throw ConfigError("coherence: input not orthonormal (defect " +
                      std::to_string(defect) + ")");
  double max_row = 0.0;
  for (int i = 0; i < w.rows; ++i) {
    double g = dot_rows(w, i, w, i);
    if (g > max_row) max_row = g;
  }
  return max_row * double(w.rows) / double(w.cols);
}

GroundTruth gen_ground_truth(int d1, int d2, int k, double kappa_target,
                             std::uint64_t seed, bool symmetric_psd) {
  if (d1 < 1 || d2 < 1) throw ConfigError("gen_ground_truth: bad dimensions");
  if (k < 1 || k > std::min(d1, d2))
    throw ConfigError("gen_ground_truth: requires 1 <= k <= min(d1, d2)");
  if (!(kappa_target >= 1.0))
    throw ConfigError("gen_ground_truth: kappa_target must be >= 1");
  if (symmetric_psd && d1 != d2)
    throw ConfigError("gen_ground_truth: PSD instance needs d1 == d2");
  GroundTruth gt;
  gt.d1 = d1;
  gt.d2 = d2;
  gt.k = k;
  gt.symmetric_psd = symmetric_psd;
  Rng rng(stream_seed(seed, kStreamGroundTruth));
  gt.x = qr_thin(gaussian_matrix(d1, k, rng)).q;
  gt.y = symmetric_psd ? gt.x : qr_thin(gaussian_matrix(d2, k, rng)).q;
  gt.s.resize(k);
  for (int l = 0; l < k; ++l)
    gt.s[l] = k == 1 ? 1.0
                     : std::pow(kappa_target, -double(l) / double(k - 1));
  return gt;
}

double entry(const GroundTruth& gt, int i, int j) {
  if (i < 0 || i >= gt.d1 || j < 0 || j >= gt.d2)
    throw ConfigError("entry: index out of range");
  double s = 0.0;
  const double* xi = gt.x.row(i);
  const double* yj = gt.y.row(j);
  for (int l = 0; l < gt.k; ++l) s += xi[l] * gt.s[l] * yj[l];
  return s;
}

ProblemStats stats(const GroundTruth& gt) {
  ProblemStats ps;
  double mu_x = coherence(gt.x);
  double mu_y = gt.symmetric_psd ? mu_x : coherence(gt.y);
  ps.mu = std::max(mu_x, mu_y);
  ps.kappa = gt.s.front() / gt.s.back();
  ps.frob_norm_sq = 0.0;
  for (double s : gt.s) ps.frob_norm_sq += s * s;
  return ps;
}

namespace {

nlohmann::json matrix_to_json(const DenseMatrix& m) {
  return nlohmann::json{{"rows", m.rows}, {"cols", m.cols}, {"data", m.a}};
}

DenseMatrix matrix_from_json(const nlohmann::json& j) {
  DenseMatrix m(j.at("rows").get<int>(), j.at("cols").get<int>());
  std::vector<double> data = j.at("data").get<std::vector<double>>();
  if (data.size() != m.a.size())
    throw ConfigError("ground truth file: matrix size mismatch");
  m.a = std::move(data);
  return m;
}

}  // namespace

std::string ground_truth_to_json(const GroundTruth& gt) {
  nlohmann::json j{{"d1", gt.d1},
                   {"d2", gt.d2},
                   {"k", gt.k},
                   {"symmetric_psd", gt.symmetric_psd},
                   {"s", gt.s},
                   {"x", matrix_to_json(gt.x)},
                   {"y", matrix_to_json(gt.y)}};
  return j.dump(2) + "\n";
}

GroundTruth ground_truth_from_json(const std::string& text) {
  GroundTruth gt;
  try {
    nlohmann::json j = nlohmann::json::parse(text);
    gt.d1 = j.at("d1").get<int>();
    gt.d2 = j.at("d2").get<int>();
    gt.k = j.at("k").get<int>();
    gt.symmetric_psd = j.at("symmetric_psd").get<bool>();
    gt.s = j.at("s").get<std::vector<double>>();
    gt.x = matrix_from_json(j.at("x"));
    gt.y = matrix_from_json(j.at("y"));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("ground truth file: ") + e.what());
  }
  if (gt.x.rows != gt.d1 || gt.y.rows != gt.d2 || gt.x.cols != gt.k ||
      gt.y.cols != gt.k || int(gt.s.size()) != gt.k)
    throw ConfigError("ground truth file: inconsistent shapes");
  return gt;
}

void save_ground_truth(const GroundTruth& gt, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open for writing: " + path);
  f << ground_truth_to_json(gt);
}

GroundTruth load_ground_truth(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open for reading: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ground_truth_from_json(ss.str());
}

}  // namespace omc
