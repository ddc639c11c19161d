#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "circcoords/circle.hpp"
#include "circcoords/data_prep.hpp"
#include "circcoords/evaluation.hpp"

using namespace circcoords;

namespace {

double max_pairwise_gap(const PointCloud& a, const PointCloud& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = i + 1; j < a.size(); ++j)
      worst = std::max(worst, std::fabs(a.distance(i, j) - b.distance(i, j)));
  return worst;
}

TimeSeries column_series(const std::vector<double>& v) { return TimeSeries(1, v); }

}  // namespace

TEST(VonMises, ConcentrationZeroIsUniform) {
  std::mt19937_64 rng(71);
  std::vector<double> draws(5000);
  for (double& x : draws) x = sample_von_mises(rng, 0.0, 0.0);
  EXPECT_GE(chi_square_uniform(draws).p_value, 1e-3);
}

TEST(VonMises, MeanResultantMatchesBesselRatio) {
  // E[cos θ] = I1(κ) / I0(κ) for the von Mises law centered at 0.
  const double kappa = 1.3;
  std::mt19937_64 rng(72);
  double c = 0.0, s = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double x = sample_von_mises(rng, 0.0, kappa);
    ASSERT_GE(x, 0.0);
    ASSERT_LT(x, kTwoPi);
    c += std::cos(x);
    s += std::sin(x);
  }
  EXPECT_NEAR(c / n, std::cyl_bessel_i(1.0, kappa) / std::cyl_bessel_i(0.0, kappa), 0.01);
  EXPECT_NEAR(s / n, 0.0, 0.01);
}

TEST(UnbalancedCircle, ExactRadiusWhenNoSpread) {
  CircleParams p;
  p.radius_sd = 0.0;
  p.radius_mean = 2.5;
  const auto sample = gen_unbalanced_circle(p, 3);
  ASSERT_EQ(sample.cloud.size(), 1000u);
  ASSERT_EQ(sample.true_parameter.size(), 1000u);
  for (std::size_t i = 0; i < sample.cloud.size(); ++i) {
    EXPECT_NEAR(std::hypot(sample.cloud[i][0], sample.cloud[i][1]), 2.5, 1e-12);
    EXPECT_NEAR(circle_distance(std::atan2(sample.cloud[i][1], sample.cloud[i][0]), sample.true_parameter[i]), 0.0,
                1e-12);
  }
}

TEST(UnbalancedCircle, ZeroDispersionIsUniform) {
  CircleParams p;
  p.dispersion = 0.0;
  int accepted = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed)
    accepted += chi_square_uniform(gen_unbalanced_circle(p, seed).true_parameter).p_value >= 0.01;
  EXPECT_GE(accepted, 95);
}

TEST(UnbalancedCircle, DenseNearZero) {
  const auto sample = gen_unbalanced_circle({}, 4);
  std::vector<int> bins(12, 0);
  for (double a : sample.true_parameter) ++bins[static_cast<std::size_t>(a / kTwoPi * 12.0) % 12];
  // The bins adjacent to angle 0 (= 2π) hold the mode; the bins around π are the sparsest.
  const int near_zero = std::max(bins[0], bins[11]);
  EXPECT_EQ(near_zero, *std::max_element(bins.begin(), bins.end()));
  EXPECT_GT(near_zero, 3 * std::min(bins[5], bins[6]));
}

TEST(UnbalancedCircle, SeedDeterminism) {
  const auto a = gen_unbalanced_circle({}, 9);
  const auto b = gen_unbalanced_circle({}, 9);
  const auto c = gen_unbalanced_circle({}, 10);
  EXPECT_EQ(a.cloud.data(), b.cloud.data());
  EXPECT_EQ(a.true_parameter, b.true_parameter);
  EXPECT_NE(a.cloud.data(), c.cloud.data());
  EXPECT_EQ(a.generator_params.at("dispersion"), 1.3);
  EXPECT_EQ(a.seed, 9u);
}

TEST(UnbalancedEllipse, UnitDilationMatchesCircle) {
  const auto circle = gen_unbalanced_circle({}, 5);
  const auto ellipse = gen_unbalanced_ellipse({}, 1.0, 5);
  EXPECT_EQ(circle.cloud.data(), ellipse.cloud.data());
  for (std::size_t i = 0; i < circle.true_parameter.size(); ++i)
    EXPECT_NEAR(circle_distance(circle.true_parameter[i], ellipse.true_parameter[i]), 0.0, 1e-9);
}

TEST(UnbalancedEllipse, PointsOnIdealEllipse) {
  CircleParams p;
  p.radius_sd = 0.0;
  const auto sample = gen_unbalanced_ellipse(p, 1.6, 6);
  for (std::size_t i = 0; i < sample.cloud.size(); ++i) {
    const double x = sample.cloud[i][0] / 1.6, y = sample.cloud[i][1];
    EXPECT_NEAR(x * x + y * y, 1.0, 1e-12);
    EXPECT_GE(sample.true_parameter[i], 0.0);
    EXPECT_LT(sample.true_parameter[i], kTwoPi);
  }
}

TEST(UnbalancedEllipse, ArcParameterMatchesQuadrature) {
  // Composite Simpson over the speed sqrt(a² sin² t + cos² t) as an independent reference.
  const double a = 1.6;
  auto arc = [a](double theta) {
    const int steps = 200000;
    const double h = theta / steps;
    double sum = 0.0;
    for (int i = 0; i <= steps; ++i) {
      const double t = i * h;
      const double w = (i == 0 || i == steps) ? 1.0 : (i % 2 ? 4.0 : 2.0);
      sum += w * std::sqrt(a * a * std::sin(t) * std::sin(t) + std::cos(t) * std::cos(t));
    }
    return sum * h / 3.0;
  };
  const double perimeter = arc(kTwoPi);
  EXPECT_NEAR(ellipse_arc_parameter(kPi / 2, a), kTwoPi * arc(kPi / 2) / perimeter, 1e-9);
  EXPECT_NEAR(ellipse_arc_parameter(kPi / 2, a), kPi / 2, 1e-12);
  for (double theta : {0.3, 1.1, 2.0, 3.5, 5.9})
    EXPECT_NEAR(ellipse_arc_parameter(theta, a), kTwoPi * arc(theta) / perimeter, 1e-9);
  EXPECT_NEAR(ellipse_arc_parameter(0.7, 1.0), 0.7, 1e-12);
}

TEST(Detrend, ConstantColumnBecomesZero) {
  const auto out = detrend(column_series(std::vector<double>(50, 3.7)), 7);
  for (double x : out.data()) EXPECT_EQ(x, 0.0);
}

TEST(Detrend, FullWindowStandardizesRamp) {
  std::vector<double> ramp(40);
  for (std::size_t t = 0; t < ramp.size(); ++t) ramp[t] = 2.0 * t + 1.0;
  const auto out = detrend(column_series(ramp), ramp.size());
  double mean = 0.0;
  for (double x : ramp) mean += x;
  mean /= ramp.size();
  double var = 0.0;
  for (double x : ramp) var += (x - mean) * (x - mean);
  const double sd = std::sqrt(var / ramp.size());
  for (std::size_t t = 0; t < ramp.size(); ++t) EXPECT_NEAR(out(t, 0), (ramp[t] - mean) / sd, 1e-12);
}

TEST(Detrend, RemovesSlowDrift) {
  const std::size_t T = 960;
  std::vector<double> v(T);
  for (std::size_t t = 0; t < T; ++t) v[t] = std::sin(kTwoPi * t / 40.0) + 0.02 * t;
  const auto out = detrend(column_series(v), 120);
  // Drift amplitude: difference between the mean of the last and first 120 frames.
  auto block_mean = [](const std::vector<double>& x, std::size_t from) {
    double s = 0.0;
    for (std::size_t t = from; t < from + 120; ++t) s += x[t];
    return s / 120.0;
  };
  const double before = std::fabs(block_mean(v, T - 120) - block_mean(v, 0));
  const double after = std::fabs(block_mean(out.data(), T - 120) - block_mean(out.data(), 0));
  EXPECT_GE(before, 10.0 * after);
}

TEST(Detrend, MovingMeanOfOutputIsSmall) {
  std::mt19937_64 rng(73);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::vector<double> v(200);
  for (double& x : v) x = 5.0 + noise(rng);
  const std::size_t window = 200;
  const auto out = detrend(column_series(v), window);
  double mean = 0.0;
  for (double x : out.data()) mean += x;
  EXPECT_LE(std::fabs(mean / 200.0), 1e-8);
}

TEST(DelayEmbed, ZeroDelayIsIdentity) {
  const TimeSeries ts(2, {1, 2, 3, 4, 5, 6});
  const auto cloud = delay_embed(ts, 0, 3);
  EXPECT_EQ(cloud.size(), 3u);
  EXPECT_EQ(cloud.dim(), 2u);
  EXPECT_EQ(cloud.data(), ts.data());
}

TEST(DelayEmbed, ShapeAndOverlap) {
  std::vector<double> flat(2 * 960);
  for (std::size_t i = 0; i < flat.size(); ++i) flat[i] = static_cast<double>(i);
  const TimeSeries ts(2, flat);
  const auto one = delay_embed(ts, 1, 1);
  EXPECT_EQ(one.size(), 959u);
  EXPECT_EQ(one.dim(), 4u);
  const auto cloud = delay_embed(ts, 4, 20);
  EXPECT_EQ(cloud.size(), 880u);
  EXPECT_EQ(cloud.dim(), 10u);
  for (std::size_t t = 0; t < 880; ++t)
    for (std::size_t b = 0; b <= 4; ++b)
      for (std::size_t c = 0; c < 2; ++c) ASSERT_EQ(cloud[t][b * 2 + c], ts(t + b * 20, c));
  // Consecutive rows of a unit-lag embedding share N·d coordinates.
  const auto unit = delay_embed(ts, 3, 1);
  for (std::size_t t = 0; t + 1 < unit.size(); ++t)
    for (std::size_t j = 0; j < 6; ++j) ASSERT_EQ(unit[t][j + 2], unit[t + 1][j]);
}

TEST(DelayEmbed, TooShortThrows) {
  const TimeSeries ts(1, {1, 2, 3});
  EXPECT_ANY_THROW(delay_embed(ts, 1, 3));
}

TEST(Pca, FullDimensionPreservesDistances) {
  std::mt19937_64 rng(74);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> flat(60 * 4);
  for (double& x : flat) x = normal(rng);
  const PointCloud cloud(4, flat);
  const auto out = pca_reduce(cloud, 4);
  EXPECT_LT(max_pairwise_gap(cloud, out.cloud), 1e-9);
  EXPECT_FALSE(out.rank_deficient);
}

TEST(Pca, PlanarDataInFiveDimensions) {
  std::mt19937_64 rng(75);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd basis = Eigen::MatrixXd::Random(5, 2);
  basis = Eigen::HouseholderQR<Eigen::MatrixXd>(basis).householderQ() * Eigen::MatrixXd::Identity(5, 2);
  std::vector<double> flat;
  std::vector<double> planar;
  for (int i = 0; i < 80; ++i) {
    const double a = 3.0 * normal(rng), b = normal(rng);
    planar.push_back(a);
    planar.push_back(b);
    for (int r = 0; r < 5; ++r) flat.push_back(a * basis(r, 0) + b * basis(r, 1) + 1.0);
  }
  const PointCloud cloud(5, flat);
  const auto out = pca_reduce(cloud, 2);
  EXPECT_EQ(out.cloud.dim(), 2u);
  EXPECT_LT(max_pairwise_gap(PointCloud(2, planar), out.cloud), 1e-9);
  const auto padded = pca_reduce(cloud, 4);
  EXPECT_TRUE(padded.rank_deficient);
  for (std::size_t i = 0; i < padded.cloud.size(); ++i) {
    EXPECT_EQ(padded.cloud[i][2], 0.0);
    EXPECT_EQ(padded.cloud[i][3], 0.0);
  }
}

TEST(Pca, DiagonalCovarianceAndOrderedVariance) {
  const auto lc = gen_limit_cycle_series({}, 7);
  const auto embedded = delay_embed(detrend(lc.series, 120), 4, 20);
  const auto out = pca_reduce(embedded, 5);
  const std::size_t n = out.cloud.size();
  Eigen::MatrixXd y(n, 5);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t c = 0; c < 5; ++c) y(i, c) = out.cloud[i][c];
  const Eigen::MatrixXd cov = (y.transpose() * y) / static_cast<double>(n - 1);
  for (int a = 0; a < 5; ++a) {
    EXPECT_NEAR(y.col(a).mean(), 0.0, 1e-9);
    for (int b = 0; b < 5; ++b)
      if (a != b) EXPECT_NEAR(cov(a, b), 0.0, 1e-9);
  }
  for (int a = 1; a < 5; ++a) EXPECT_LE(cov(a, a), cov(a - 1, a - 1) + 1e-9);

  // Dense eigen-decomposition of the embedded covariance as a reference.
  Eigen::MatrixXd x(n, embedded.dim());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t c = 0; c < embedded.dim(); ++c) x(i, c) = embedded[i][c];
  const Eigen::MatrixXd centered = x.rowwise() - x.colwise().mean();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(centered.transpose() * centered / static_cast<double>(n - 1));
  const auto& values = eig.eigenvalues();
  for (int a = 0; a < 5; ++a) {
    const double reference = values[values.size() - 1 - a];
    EXPECT_NEAR(cov(a, a), reference, 1e-9 * std::max(1.0, reference));
  }
  for (std::size_t a = 1; a < out.explained_variance.size(); ++a)
    EXPECT_LE(out.explained_variance[a], out.explained_variance[a - 1]);
}

TEST(Pca, SignConvention) {
  std::mt19937_64 rng(76);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> flat(50 * 3);
  for (std::size_t i = 0; i < 50; ++i) {
    flat[3 * i] = 4.0 * normal(rng);
    flat[3 * i + 1] = 2.0 * normal(rng);
    flat[3 * i + 2] = 0.5 * normal(rng);
  }
  const PointCloud cloud(3, flat);
  auto negated = flat;
  for (double& x : negated) x = -x;
  // Flipping the data flips each direction; the convention flips it back.
  const auto a = pca_reduce(cloud, 3);
  const auto b = pca_reduce(PointCloud(3, negated), 3);
  for (std::size_t i = 0; i < 50; ++i)
    for (std::size_t c = 0; c < 3; ++c) EXPECT_NEAR(a.cloud[i][c], -b.cloud[i][c], 1e-9);
}

TEST(LimitCycle, ShapeAndDeterminism) {
  const auto a = gen_limit_cycle_series({}, 11);
  const auto b = gen_limit_cycle_series({}, 11);
  EXPECT_EQ(a.series.length(), 960u);
  EXPECT_EQ(a.series.channels(), 2u);
  EXPECT_EQ(a.series.rate(), 4.0);
  EXPECT_EQ(a.series.data(), b.series.data());
  EXPECT_EQ(a.phase.size(), 960u);
  for (double p : a.phase) {
    EXPECT_GE(p, 0.0);
    EXPECT_LT(p, kTwoPi);
  }
}
