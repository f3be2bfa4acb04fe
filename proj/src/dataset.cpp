#include "svmcf/dataset.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace svmcf {

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& line, char delim) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, delim)) out.push_back(trim(cell));
  if (!line.empty() && line.back() == delim) out.push_back("");
  return out;
}

double parse_cell(const std::string& cell, int row, const std::string& col) {
  double v = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last)
    throw DataError("malformed numeric cell '" + cell + "' at row " +
                    std::to_string(row) + ", column '" + col + "'");
  return v;
}

}  // namespace

Dataset::Dataset(FeatureSchema schema, Eigen::MatrixXd rows, std::vector<int> labels,
                 int coerced_labels)
    : schema_(std::move(schema)),
      rows_(std::move(rows)),
      labels_(std::move(labels)),
      coerced_labels_(coerced_labels) {
  const int n = schema_.size();
  if (rows_.cols() != n) throw DataError("dataset: column count does not match schema");
  if (rows_.rows() < 1) throw DataError("dataset: no rows");
  if (static_cast<int>(labels_.size()) != rows_.rows())
    throw DataError("dataset: label count does not match row count");

  for (int r = 0; r < rows_.rows(); ++r) {
    if (labels_[r] != 1 && labels_[r] != -1)
      throw DataError("dataset: label at row " + std::to_string(r) + " is not +1/-1");
    for (int j = 0; j < n; ++j) {
      const double v = rows_(r, j);
      const FeatureSpec& f = schema_.feature(j);
      if (!std::isfinite(v))
        throw DataError("dataset: non-finite value at row " + std::to_string(r) +
                        ", column '" + f.name + "'");
      if (f.kind == FeatureKind::OneHot) {
        if (v != 0.0 && v != 1.0)
          throw DataError("dataset: one-hot entry not in {0,1} at row " +
                          std::to_string(r) + ", column '" + f.name + "'");
      } else if (v < f.lower || v > f.upper) {
        throw DataError("dataset: value " + std::to_string(v) + " outside bounds of '" +
                        f.name + "' at row " + std::to_string(r));
      }
    }
    for (const auto& [gid, members] : schema_.groups()) {
      double sum = 0.0;
      for (int j : members) sum += rows_(r, j);
      if (sum != 1.0)
        throw DataError("dataset: group constraint violated for group '" + gid +
                        "' at row " + std::to_string(r));
    }
  }
}

Dataset load_dataset(std::istream& in, const FeatureSchema& schema, const LoadOptions& opts) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("dataset: empty input");
  const std::vector<std::string> header = split(line, opts.delimiter);

  const int n = schema.size();
  std::vector<int> col_to_feature(header.size(), -1);
  int label_col = -1;
  std::vector<bool> seen(n, false);
  for (size_t c = 0; c < header.size(); ++c) {
    if (header[c] == schema.label_column()) {
      if (label_col >= 0) throw DataError("dataset: duplicate label column");
      label_col = static_cast<int>(c);
      continue;
    }
    const int f = schema.index_of(header[c]);
    if (f < 0) throw DataError("dataset: unknown column '" + header[c] + "'");
    if (seen[f]) throw DataError("dataset: duplicate column '" + header[c] + "'");
    seen[f] = true;
    col_to_feature[c] = f;
  }
  if (label_col < 0)
    throw DataError("dataset: label column '" + schema.label_column() + "' not found");
  for (int f = 0; f < n; ++f)
    if (!seen[f])
      throw DataError("dataset: missing column '" + schema.feature(f).name + "'");

  std::vector<Eigen::VectorXd> rows;
  std::vector<int> labels;
  int coerced = 0;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const std::vector<std::string> cells = split(line, opts.delimiter);
    if (cells.size() != header.size())
      throw DataError("dataset: row " + std::to_string(lineno) + " has " +
                      std::to_string(cells.size()) + " cells, expected " +
                      std::to_string(header.size()));
    Eigen::VectorXd x(n);
    for (size_t c = 0; c < cells.size(); ++c) {
      if (static_cast<int>(c) == label_col) continue;
      x[col_to_feature[c]] = parse_cell(cells[c], lineno, header[c]);
    }
    const std::string& lab = cells[label_col];
    if (lab == "1" || lab == "+1") {
      labels.push_back(1);
    } else if (lab == "-1") {
      labels.push_back(-1);
    } else if (lab == "0" && opts.coerce_01_labels) {
      labels.push_back(-1);
      ++coerced;
    } else {
      throw DataError("dataset: label '" + lab + "' at row " + std::to_string(lineno) +
                      (opts.coerce_01_labels ? " outside {0, 1, -1, +1}"
                                             : " outside {-1, +1} (use 0/1 coercion?)"));
    }
    rows.push_back(std::move(x));
  }
  if (rows.empty()) throw DataError("dataset: no data rows");

  Eigen::MatrixXd m(static_cast<int>(rows.size()), n);
  for (size_t r = 0; r < rows.size(); ++r) m.row(static_cast<int>(r)) = rows[r].transpose();
  return Dataset(schema, std::move(m), std::move(labels), coerced);
}

Dataset load_dataset_file(const std::string& path, const FeatureSchema& schema,
                          const LoadOptions& opts) {
  std::ifstream in(path);
  if (!in) throw DataError("dataset: cannot open '" + path + "'");
  return load_dataset(in, schema, opts);
}

Dataset load_dataset_text(const std::string& text, const FeatureSchema& schema,
                          const LoadOptions& opts) {
  std::istringstream in(text);
  return load_dataset(in, schema, opts);
}

// ---------------------------------------------------------------------------
// EmpiricalDistribution

EmpiricalDistribution EmpiricalDistribution::fit(const Dataset& data) {
  EmpiricalDistribution d;
  const int n = data.n_features();
  d.n_ = data.n_rows();
  d.sorted_.resize(n);
  d.stddev_.assign(n, 0.0);
  d.continuous_ = data.schema().continuous_indices();
  for (int f : d.continuous_) {
    std::vector<double> col(d.n_);
    for (int r = 0; r < d.n_; ++r) col[r] = data.rows()(r, f);
    std::sort(col.begin(), col.end());
    double mean = 0.0;
    for (double v : col) mean += v;
    mean /= d.n_;
    double ss = 0.0;
    for (double v : col) ss += (v - mean) * (v - mean);
    d.stddev_[f] = d.n_ > 1 ? std::sqrt(ss / (d.n_ - 1)) : 0.0;
    d.sorted_[f] = std::move(col);
  }
  return d;
}

bool EmpiricalDistribution::has(int feature) const {
  return feature >= 0 && feature < static_cast<int>(sorted_.size()) &&
         !sorted_[feature].empty();
}

double EmpiricalDistribution::stddev(int feature) const {
  if (!has(feature)) throw DataError("stddev: feature has no empirical distribution");
  return stddev_[feature];
}

double EmpiricalDistribution::percentile(int feature, double value) const {
  if (!has(feature))
    throw DataError("percentile: feature " + std::to_string(feature) +
                    " is not continuous (one-hot features have no percentile function)");
  const std::vector<double>& s = sorted_[feature];
  const double N = static_cast<double>(n_);
  const double eps = 0.5 / N;

  // Hazen position of the run of order statistics equal to s[lo..hi), as the
  // midrank position; lo/hi are 0-based.
  auto run_position = [&](size_t lo, size_t hi) {
    // 1-based ranks lo+1 .. hi; midrank = (lo + 1 + hi) / 2.
    const double midrank = (static_cast<double>(lo) + 1.0 + static_cast<double>(hi)) / 2.0;
    return (midrank - 0.5) / N;
  };

  auto lo_it = std::lower_bound(s.begin(), s.end(), value);
  auto hi_it = std::upper_bound(lo_it, s.end(), value);
  if (lo_it != hi_it) {
    // Exact hit (possibly tied): rank-based position, no interpolation.
    return run_position(static_cast<size_t>(lo_it - s.begin()),
                        static_cast<size_t>(hi_it - s.begin()));
  }
  if (lo_it == s.begin()) return eps;           // below the sample minimum
  if (lo_it == s.end()) return 1.0 - eps;       // above the sample maximum

  // Strictly between two distinct sample values: interpolate between the
  // midrank positions of the adjacent runs.
  const size_t right_lo = static_cast<size_t>(lo_it - s.begin());
  const double vl = s[right_lo - 1];
  const double vr = s[right_lo];
  auto left_first = std::lower_bound(s.begin(), s.begin() + right_lo, vl);
  auto right_last = std::upper_bound(s.begin() + right_lo, s.end(), vr);
  const double pl = run_position(static_cast<size_t>(left_first - s.begin()), right_lo);
  const double pr = run_position(right_lo, static_cast<size_t>(right_last - s.begin()));
  return pl + (value - vl) / (vr - vl) * (pr - pl);
}

// ---------------------------------------------------------------------------
// CovarianceModel

CovarianceModel CovarianceModel::fit(const Dataset& data, double shrinkage) {
  if (data.n_rows() < 2) throw DataError("covariance: need at least 2 rows");
  if (!(shrinkage >= 0.0)) throw ConfigError("covariance: shrinkage must be >= 0");

  CovarianceModel m;
  m.lambda_ = shrinkage;
  m.continuous_ = data.schema().continuous_indices();
  m.position_.assign(data.n_features(), -1);
  for (size_t p = 0; p < m.continuous_.size(); ++p) m.position_[m.continuous_[p]] = static_cast<int>(p);

  const int k = static_cast<int>(m.continuous_.size());
  if (k == 0) throw DataError("covariance: schema has no continuous features");
  const int N = data.n_rows();

  Eigen::MatrixXd Xc(N, k);
  for (int p = 0; p < k; ++p) Xc.col(p) = data.rows().col(m.continuous_[p]);
  m.mean_ = Xc.colwise().mean();
  Xc.rowwise() -= m.mean_.transpose();
  m.sigma_ = (Xc.transpose() * Xc) / static_cast<double>(N - 1);
  m.sigma_ = 0.5 * (m.sigma_ + m.sigma_.transpose());
  m.sigma_.diagonal().array() += shrinkage;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m.sigma_);
  if (eig.info() != Eigen::Success)
    throw DataError("covariance: eigendecomposition failed (non-finite input?)");
  const Eigen::VectorXd& ev = eig.eigenvalues();
  if (ev.minCoeff() <= 0.0)
    throw DataError("covariance not positive definite (min eigenvalue " +
                    std::to_string(ev.minCoeff()) + "); increase shrinkage");
  m.inv_sqrt_ = eig.eigenvectors() * ev.cwiseInverse().cwiseSqrt().asDiagonal() *
                eig.eigenvectors().transpose();

  const Eigen::MatrixXd identity_check =
      m.inv_sqrt_ * m.inv_sqrt_ * m.sigma_ - Eigen::MatrixXd::Identity(k, k);
  if (identity_check.cwiseAbs().maxCoeff() > 1e-8)
    throw DataError("covariance: inverse square root check failed; increase shrinkage");
  return m;
}

CovarianceModel CovarianceModel::fit(const Dataset& data) {
  const std::vector<int> cont = data.schema().continuous_indices();
  const int k = static_cast<int>(cont.size());
  if (k == 0) throw DataError("covariance: schema has no continuous features");
  const int N = data.n_rows();
  Eigen::MatrixXd Xc(N, k);
  for (int p = 0; p < k; ++p) Xc.col(p) = data.rows().col(cont[p]);
  const Eigen::RowVectorXd mean = Xc.colwise().mean();
  Xc.rowwise() -= mean;
  const double trace = (Xc.array().square().sum()) / std::max(1, N - 1);
  return fit(data, 1e-6 * trace / k);
}

int CovarianceModel::continuous_position(int feature) const {
  if (feature < 0 || feature >= static_cast<int>(position_.size())) return -1;
  return position_[feature];
}

Eigen::MatrixXd CovarianceModel::marginal_inverse_sqrt(const std::vector<int>& positions) const {
  const int k = static_cast<int>(positions.size());
  if (k == static_cast<int>(continuous_.size())) {
    bool all = true;
    for (int p = 0; p < k; ++p) all = all && positions[p] == p;
    if (all) return inv_sqrt_;
  }
  Eigen::MatrixXd sub(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) sub(i, j) = sigma_(positions[i], positions[j]);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sub);
  if (eig.info() != Eigen::Success || eig.eigenvalues().minCoeff() <= 0.0)
    throw DataError("covariance: marginal block not positive definite");
  return eig.eigenvectors() * eig.eigenvalues().cwiseInverse().cwiseSqrt().asDiagonal() *
         eig.eigenvectors().transpose();
}

// ---------------------------------------------------------------------------
// Prototypes

Eigen::VectorXd class_prototype(const Dataset& data, int label) {
  if (label != 1 && label != -1) throw ConfigError("class_prototype: label must be +1 or -1");
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(data.n_features());
  int count = 0;
  for (int r = 0; r < data.n_rows(); ++r) {
    if (data.label(r) == label) {
      sum += data.row(r);
      ++count;
    }
  }
  if (count == 0)
    throw DataError("class_prototype: no rows with label " + std::to_string(label));
  return sum / count;
}

ClassPrototypes fit_prototypes(const Dataset& data) {
  return ClassPrototypes{class_prototype(data, 1), class_prototype(data, -1)};
}

}  // namespace svmcf
