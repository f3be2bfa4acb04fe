#include <doctest.h>

#include <random>
#include <sstream>

#include "svmcf/dataset.hpp"
#include "helpers.hpp"

using namespace svmcf;
using svmcf::testing::continuous_schema;
using svmcf::testing::mixed_schema;

namespace {

Dataset five_sample_dataset() {
  // One continuous feature with samples {1,2,3,4,5}.
  Eigen::MatrixXd rows(5, 1);
  rows << 1, 2, 3, 4, 5;
  return Dataset(continuous_schema(1), rows, {1, -1, 1, -1, 1});
}

}  // namespace

TEST_CASE("schema: JSON parsing and validation") {
  const std::string text = R"({
    "label": "Outcome",
    "features": [
      {"name": "glucose", "lower": 0, "upper": "inf", "weight": 2.0},
      {"name": "bmi"},
      {"name": "race_a", "kind": "one_hot", "group": "race"},
      {"name": "race_b", "kind": "one_hot", "group": "race", "weight": "inf"}
    ]
  })";
  const FeatureSchema s = FeatureSchema::from_json_text(text);
  CHECK(s.size() == 4);
  CHECK(s.label_column() == "Outcome");
  CHECK(s.feature(0).lower == 0.0);
  CHECK(std::isinf(s.feature(0).upper));
  CHECK(s.feature(0).weight == 2.0);
  CHECK(std::isinf(s.feature(3).weight));
  CHECK(s.groups().at("race") == std::vector<int>{2, 3});
  CHECK(s.continuous_indices() == std::vector<int>{0, 1});

  // Single-member group rejected.
  CHECK_THROWS_AS(FeatureSchema::from_json_text(R"({
    "label": "y",
    "features": [{"name": "a", "kind": "one_hot", "group": "g"},
                 {"name": "b"}]})"),
                  ConfigError);
  // Nonpositive weight rejected.
  CHECK_THROWS_AS(FeatureSchema::from_json_text(R"({
    "label": "y",
    "features": [{"name": "a", "weight": 0}]})"),
                  ConfigError);
  // lower >= upper rejected.
  CHECK_THROWS_AS(FeatureSchema::from_json_text(R"({
    "label": "y",
    "features": [{"name": "a", "lower": 2, "upper": 1}]})"),
                  ConfigError);
}

TEST_CASE("load_dataset: two-row parse") {
  const FeatureSchema schema = FeatureSchema::from_json_text(
      R"({"label": "y", "features": [{"name": "glucose"}, {"name": "bmi"}]})");
  const Dataset d = load_dataset_text("glucose,bmi,y\n120,31.5,1\n88,22.0,-1\n", schema);
  CHECK(d.n_rows() == 2);
  CHECK(d.n_features() == 2);
  CHECK(d.rows()(0, 0) == 120.0);
  CHECK(d.label(1) == -1);
  CHECK(d.coerced_labels() == 0);
}

TEST_CASE("load_dataset: column order follows the header, not the schema") {
  const FeatureSchema schema = FeatureSchema::from_json_text(
      R"({"label": "y", "features": [{"name": "a"}, {"name": "b"}]})");
  const Dataset d = load_dataset_text("b,y,a\n2,1,1\n", schema);
  CHECK(d.rows()(0, 0) == 1.0);
  CHECK(d.rows()(0, 1) == 2.0);
}

TEST_CASE("load_dataset: one-hot group violation") {
  const FeatureSchema schema = mixed_schema(0, {2});
  CHECK_THROWS_WITH_AS(
      load_dataset_text("g0_0,g0_1,label\n1,1,1\n", schema),
      doctest::Contains("group constraint violated"), DataError);
  CHECK_THROWS_AS(load_dataset_text("g0_0,g0_1,label\n0.5,0.5,1\n", schema), DataError);
}

TEST_CASE("load_dataset: 0/1 label coercion is explicit") {
  const FeatureSchema schema = FeatureSchema::from_json_text(
      R"({"label": "y", "features": [{"name": "a"}]})");
  CHECK_THROWS_AS(load_dataset_text("a,y\n1,0\n", schema), DataError);
  LoadOptions opts;
  opts.coerce_01_labels = true;
  const Dataset d = load_dataset_text("a,y\n1,0\n2,1\n", schema, opts);
  CHECK(d.label(0) == -1);
  CHECK(d.label(1) == 1);
  CHECK(d.coerced_labels() == 1);
  // Even with coercion, other labels are rejected.
  CHECK_THROWS_AS(load_dataset_text("a,y\n1,2\n", schema, opts), DataError);
}

TEST_CASE("load_dataset: malformed cell names row and column") {
  const FeatureSchema schema = FeatureSchema::from_json_text(
      R"({"label": "y", "features": [{"name": "a"}, {"name": "b"}]})");
  CHECK_THROWS_WITH_AS(load_dataset_text("a,b,y\n1,oops,1\n", schema),
                       doctest::Contains("row 2, column 'b'"), DataError);
  CHECK_THROWS_AS(load_dataset_text("a,b,y\n1,1\n", schema), DataError);     // short row
  CHECK_THROWS_AS(load_dataset_text("a,y\n1,1\n", schema), DataError);       // missing column
  CHECK_THROWS_AS(load_dataset_text("a,b,c,y\n1,1,1,1\n", schema), DataError);  // unknown
}

TEST_CASE("load_dataset: bounds enforced") {
  const FeatureSchema schema = FeatureSchema::from_json_text(
      R"({"label": "y", "features": [{"name": "a", "lower": 0, "upper": 10}]})");
  CHECK_THROWS_AS(load_dataset_text("a,y\n-1,1\n", schema), DataError);
}

TEST_CASE("percentile: Hazen positions with interpolation and clamps") {
  const EmpiricalDistribution dist = EmpiricalDistribution::fit(five_sample_dataset());
  CHECK(dist.percentile(0, 3.0) == 0.5);
  CHECK(dist.percentile(0, 2.5) == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(dist.percentile(0, -10.0) == 0.1);   // clamp at 0.5/N
  CHECK(dist.percentile(0, 100.0) == 0.9);   // clamp at 1 - 0.5/N
  CHECK(dist.percentile(0, 1.0) == 0.1);     // first order statistic
  CHECK(dist.percentile(0, 5.0) == 0.9);
}

TEST_CASE("percentile: ties collapse to the midrank") {
  Eigen::MatrixXd rows(4, 1);
  rows << 1, 2, 2, 3;
  const Dataset d(continuous_schema(1), rows, {1, -1, 1, -1});
  const EmpiricalDistribution dist = EmpiricalDistribution::fit(d);
  // Ranks of the tied 2s are 2 and 3; midrank 2.5 -> (2.5 - 0.5)/4 = 0.5.
  CHECK(dist.percentile(0, 2.0) == 0.5);
  CHECK(dist.percentile(0, 1.0) == doctest::Approx(0.125));
  CHECK(dist.percentile(0, 3.0) == doctest::Approx(0.875));
  // Interpolation runs between the midrank positions on both sides.
  CHECK(dist.percentile(0, 1.5) == doctest::Approx(0.3125));
}

TEST_CASE("percentile: one-hot features are rejected") {
  const FeatureSchema schema = mixed_schema(1, {2});
  Eigen::MatrixXd rows(2, 3);
  rows << 1.0, 1, 0, 2.0, 0, 1;
  const Dataset d(schema, rows, {1, -1});
  const EmpiricalDistribution dist = EmpiricalDistribution::fit(d);
  CHECK(dist.has(0));
  CHECK(!dist.has(1));
  CHECK_THROWS_AS(dist.percentile(1, 0.5), DataError);
}

TEST_CASE("percentile: monotone, rank round-trip, and scale equivariance") {
  std::mt19937_64 rng(515);
  std::uniform_real_distribution<double> val(-50.0, 50.0);
  for (int trial = 0; trial < 30; ++trial) {
    const int N = 3 + static_cast<int>(rng() % 40);
    Eigen::MatrixXd rows(N, 1);
    for (int r = 0; r < N; ++r) rows(r, 0) = val(rng);
    std::vector<int> labels(N, 1);
    labels[0] = -1;
    const Dataset d(continuous_schema(1), rows, labels);
    const EmpiricalDistribution dist = EmpiricalDistribution::fit(d);

    // Monotonicity on random pairs.
    for (int k = 0; k < 40; ++k) {
      double a = val(rng), b = val(rng);
      if (a > b) std::swap(a, b);
      CHECK(dist.percentile(0, a) <= dist.percentile(0, b));
    }
    // Round-trip: the j-th distinct order statistic maps to (j - 0.5)/N.
    std::vector<double> sorted(rows.data(), rows.data() + N);
    std::sort(sorted.begin(), sorted.end());
    for (int j = 0; j < N; ++j) {
      const bool tied = (j > 0 && sorted[j] == sorted[j - 1]) ||
                        (j + 1 < N && sorted[j] == sorted[j + 1]);
      if (!tied) CHECK(dist.percentile(0, sorted[j]) == (j + 1 - 0.5) / N);
    }
    // Positive scaling leaves percentiles unchanged (exactly at samples).
    const double c = 0.5 + std::abs(val(rng));
    const Dataset ds(continuous_schema(1), rows * c, labels);
    const EmpiricalDistribution dist_s = EmpiricalDistribution::fit(ds);
    for (int j = 0; j < N; ++j)
      CHECK(dist_s.percentile(0, sorted[j] * c) == dist.percentile(0, sorted[j]));
    const double probe = val(rng);
    CHECK(dist_s.percentile(0, probe * c) ==
          doctest::Approx(dist.percentile(0, probe)).epsilon(1e-12));
  }
}

TEST_CASE("covariance: hand-computed example") {
  // rows (0,0), (2,2): sample covariance [[2,2],[2,2]]; plus 0.1 I.
  Eigen::MatrixXd rows(2, 2);
  rows << 0, 0, 2, 2;
  const Dataset d(continuous_schema(2), rows, {1, -1});
  const CovarianceModel cov = CovarianceModel::fit(d, 0.1);
  CHECK(cov.covariance()(0, 0) == doctest::Approx(2.1).epsilon(1e-12));
  CHECK(cov.covariance()(0, 1) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(cov.covariance()(1, 1) == doctest::Approx(2.1).epsilon(1e-12));
  const Eigen::MatrixXd check =
      cov.inverse_sqrt() * cov.inverse_sqrt() * cov.covariance() -
      Eigen::MatrixXd::Identity(2, 2);
  CHECK(check.cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("covariance: identical rows plus unit shrinkage give the identity") {
  Eigen::MatrixXd rows(3, 2);
  rows << 1, 2, 1, 2, 1, 2;
  const Dataset d(continuous_schema(2), rows, {1, 1, -1});
  const CovarianceModel cov = CovarianceModel::fit(d, 1.0);
  CHECK((cov.covariance() - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("covariance: singular without shrinkage") {
  Eigen::MatrixXd rows(2, 2);
  rows << 0, 0, 1, 1;  // rank-1 covariance
  const Dataset d(continuous_schema(2), rows, {1, -1});
  CHECK_THROWS_WITH_AS(CovarianceModel::fit(d, 0.0),
                       doctest::Contains("not positive definite"), DataError);
  CHECK_THROWS_AS(CovarianceModel::fit(
                      Dataset(continuous_schema(1), Eigen::MatrixXd::Constant(1, 1, 3.0), {1}),
                      0.1),
                  DataError);  // N < 2
}

TEST_CASE("covariance: inverse-sqrt identity on random data") {
  std::mt19937_64 rng(99);
  std::normal_distribution<double> g(0.0, 2.0);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 4);
    const int N = 10 + static_cast<int>(rng() % 40);
    Eigen::MatrixXd rows(N, n);
    for (int r = 0; r < N; ++r)
      for (int j = 0; j < n; ++j) rows(r, j) = g(rng);
    std::vector<int> labels(N, 1);
    labels[0] = -1;
    const Dataset d(continuous_schema(n), rows, labels);
    const CovarianceModel cov = CovarianceModel::fit(d);  // auto shrinkage
    const Eigen::MatrixXd check =
        cov.inverse_sqrt() * cov.inverse_sqrt() * cov.covariance() -
        Eigen::MatrixXd::Identity(n, n);
    CHECK(check.cwiseAbs().maxCoeff() <= 1e-8);
    // A marginal block behaves the same way.
    const Eigen::MatrixXd sub = cov.marginal_inverse_sqrt({0, 1});
    Eigen::MatrixXd block(2, 2);
    block << cov.covariance()(0, 0), cov.covariance()(0, 1), cov.covariance()(1, 0),
        cov.covariance()(1, 1);
    CHECK((sub * sub * block - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-8);
  }
}

TEST_CASE("prototypes: centroids per class") {
  Eigen::MatrixXd rows(3, 2);
  rows << 0, 0, 2, 2, 3, 4;
  const Dataset d(continuous_schema(2), rows, {1, 1, -1});
  const Eigen::VectorXd vp = class_prototype(d, 1);
  CHECK(vp[0] == 1.0);
  CHECK(vp[1] == 1.0);
  const Eigen::VectorXd vn = class_prototype(d, -1);
  CHECK(vn[0] == 3.0);
  CHECK(vn[1] == 4.0);

  const Dataset single(continuous_schema(2), rows.topRows(2), {1, 1});
  CHECK_THROWS_AS(class_prototype(single, -1), DataError);
}

TEST_CASE("prototypes: one-hot coordinates are fractional frequencies") {
  const FeatureSchema schema = mixed_schema(0, {2});
  Eigen::MatrixXd rows(4, 2);
  rows << 1, 0, 1, 0, 0, 1, 1, 0;
  const Dataset d(schema, rows, {1, 1, 1, -1});
  const Eigen::VectorXd vp = class_prototype(d, 1);
  CHECK(vp[0] == doctest::Approx(2.0 / 3.0));
  CHECK(vp[1] == doctest::Approx(1.0 / 3.0));
}
