// Copyright 2026 The entrolim Authors
// SPDX-License-Identifier: Apache-2.0

#include "entrolim/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include <Eigen/Eigenvalues>
#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/special_functions/digamma.hpp>

#include "entrolim/distributions.hpp"
#include "kdtree.hpp"

namespace entrolim {
namespace {

constexpr std::size_t kGroups = 20;
constexpr double kLn2 = std::numbers::ln2;

double sample_sd(std::span<const double> xs) {
  if (xs.size() < 2) return 0.0;
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

double jackknife_se(std::span<const double> leave_out) {
  const auto g = static_cast<double>(leave_out.size());
  const double mean = std::accumulate(leave_out.begin(), leave_out.end(), 0.0) / g;
  double ss = 0.0;
  for (double t : leave_out) ss += (t - mean) * (t - mean);
  return std::sqrt((g - 1.0) / g * ss);
}

/// Random assignment of n items to `groups` groups of (almost) equal size.
std::vector<std::size_t> group_labels(std::size_t n, std::size_t groups, std::uint64_t seed) {
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  Rng rng(seed);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<std::size_t> label(n);
  for (std::size_t i = 0; i < n; ++i) label[perm[i]] = i % groups;
  return label;
}

double abs_pow(double x, LpExponent p) {
  const double a = std::abs(x);
  if (p.value() == 1.0) return a;
  if (p.value() == 2.0) return a * a;
  return std::pow(a, p.value());
}

double root(double m, LpExponent p) {
  if (p.value() == 1.0) return m;
  if (p.value() == 2.0) return std::sqrt(m);
  return std::pow(m, 1.0 / p.value());
}

// Spacing estimator ----------------------------------------------------------

struct SpacingResult {
  double nats = 0.0;
  std::size_t degenerate_windows = 0;
};

/// Correa's estimator on sorted data, in nats.
SpacingResult correa_nats(std::span<const double> sorted) {
  const std::size_t n = sorted.size();
  const auto m = static_cast<std::size_t>(std::lround(std::sqrt(static_cast<double>(n))));
  // Prefix sums of x, x^2 and j*x on data centred at the overall mean.
  const long double centre =
      std::accumulate(sorted.begin(), sorted.end(), 0.0L) / static_cast<long double>(n);
  std::vector<long double> s1(n + 1, 0.0L), s2(n + 1, 0.0L), sj(n + 1, 0.0L);
  for (std::size_t j = 0; j < n; ++j) {
    const long double x = sorted[j] - centre;
    s1[j + 1] = s1[j] + x;
    s2[j + 1] = s2[j] + x * x;
    sj[j + 1] = sj[j] + static_cast<long double>(j) * x;
  }
  SpacingResult out;
  long double total = 0.0L;
  std::size_t used = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i >= m ? i - m : 0;
    const std::size_t hi = std::min(i + m, n - 1);
    const auto w = static_cast<long double>(hi - lo + 1);
    const long double sum_x = s1[hi + 1] - s1[lo];
    const long double mean_x = sum_x / w;
    const long double sum_j = (static_cast<long double>(lo) + static_cast<long double>(hi)) * w / 2.0L;
    const long double num = (sj[hi + 1] - sj[lo]) - mean_x * sum_j;
    const long double den = static_cast<long double>(n) * ((s2[hi + 1] - s2[lo]) - sum_x * mean_x);
    if (!(num > 0.0L) || !(den > 0.0L)) {
      ++out.degenerate_windows;
      continue;
    }
    total += std::log(num / den);
    ++used;
  }
  out.nats = used == 0 ? -std::numeric_limits<double>::infinity()
                       : static_cast<double>(-total / static_cast<long double>(used));
  return out;
}

// Kozachenko-Leonenko --------------------------------------------------------

double log_unit_ball_volume(std::size_t m) {
  const double half = static_cast<double>(m) / 2.0;
  return half * std::log(std::numbers::pi) - std::lgamma(half + 1.0);
}

double kl_nats(std::span<const double> points, std::size_t dim, std::size_t k) {
  const std::size_t n = points.size() / dim;
  const detail::KdTree tree(points, dim);
  const std::vector<double> eps = tree.all_kth_neighbor_distances(k);
  long double sum_log = 0.0L;
  for (double r : eps) sum_log += std::log(std::max(r, std::numeric_limits<double>::min()));
  return boost::math::digamma(static_cast<double>(n)) - boost::math::digamma(static_cast<double>(k)) +
         log_unit_ball_volume(dim) +
         static_cast<double>(dim) * static_cast<double>(sum_log / static_cast<long double>(n));
}

std::vector<double> subset(std::span<const double> points, std::size_t dim,
                           std::span<const std::size_t> labels, std::size_t group) {
  std::vector<double> out;
  out.reserve(points.size() / kGroups + dim);
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] == group)
      out.insert(out.end(), points.begin() + static_cast<std::ptrdiff_t>(i * dim),
                 points.begin() + static_cast<std::ptrdiff_t>((i + 1) * dim));
  return out;
}

bool covariance_degenerate(std::span<const double> points, std::size_t dim) {
  if (dim < 2) return false;
  const std::size_t n = points.size() / dim;
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> x(
      points.data(), static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(dim));
  const Eigen::RowVectorXd mean = x.colwise().mean();
  const Eigen::MatrixXd centred = x.rowwise() - mean;
  const Eigen::MatrixXd cov = centred.transpose() * centred / static_cast<double>(n);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
  const double hi = es.eigenvalues().maxCoeff();
  return hi <= 0.0 || es.eigenvalues().minCoeff() <= 1e-10 * hi;
}

/// Copies points, jittering if any two coincide exactly.
std::vector<double> prepared_points(const Signal& samples, std::uint64_t seed, bool& jittered) {
  const std::size_t dim = samples.dim();
  const std::size_t n = samples.length();
  std::vector<double> pts = samples.raw();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  auto row = [&](std::size_t i) {
    return std::span<const double>(pts).subspan(i * dim, dim);
  };
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    const auto ra = row(a), rb = row(b);
    return std::lexicographical_compare(ra.begin(), ra.end(), rb.begin(), rb.end());
  });
  jittered = false;
  for (std::size_t i = 1; i < n && !jittered; ++i) {
    const auto ra = row(idx[i - 1]), rb = row(idx[i]);
    jittered = std::equal(ra.begin(), ra.end(), rb.begin());
  }
  if (jittered) {
    Rng rng(derive_seed(seed, 0x6a17));
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (double& v : pts) v += 1e-12 * std::max(std::abs(v), 1.0) * u(rng);
  }
  return pts;
}

/// Statistic evaluated on the whole sample and on kGroups disjoint random
/// blocks. Returns value and the block-spread standard error.
template <typename Stat>
Estimate full_and_blocks(std::span<const double> points, std::size_t dim, std::size_t min_block,
                         std::uint64_t seed, Stat stat) {
  const std::size_t n = points.size() / dim;
  Estimate out;
  out.value = stat(points);
  const std::size_t groups = std::min(kGroups, n / min_block);
  if (groups < 2) {
    out.std_error = std::numeric_limits<double>::infinity();
    return out;
  }
  const auto labels = group_labels(n, groups, seed);
  std::vector<double> block_values;
  for (std::size_t g = 0; g < groups; ++g) block_values.push_back(stat(subset(points, dim, labels, g)));
  out.std_error = sample_sd(block_values) / std::sqrt(static_cast<double>(groups));
  return out;
}

MutualInformationEstimate mi_impl(const Signal& x, const Signal& y, std::size_t k,
                                  std::uint64_t seed) {
  const std::size_t dx = x.dim(), dy = y.dim(), n = x.length();
  Signal joint(dx + dy, n);
  for (std::size_t i = 0; i < n; ++i) {
    std::copy(x.at(i).begin(), x.at(i).end(), joint.at(i).begin());
    std::copy(y.at(i).begin(), y.at(i).end(), joint.at(i).begin() + static_cast<std::ptrdiff_t>(dx));
  }
  bool jittered = false;
  const std::vector<double> pts = prepared_points(joint, seed, jittered);
  const std::size_t dj = dx + dy;
  auto stat = [&](std::span<const double> p) {
    const std::size_t m = p.size() / dj;
    std::vector<double> px, py;
    px.reserve(m * dx);
    py.reserve(m * dy);
    for (std::size_t i = 0; i < m; ++i) {
      px.insert(px.end(), p.begin() + static_cast<std::ptrdiff_t>(i * dj),
                p.begin() + static_cast<std::ptrdiff_t>(i * dj + dx));
      py.insert(py.end(), p.begin() + static_cast<std::ptrdiff_t>(i * dj + dx),
                p.begin() + static_cast<std::ptrdiff_t>((i + 1) * dj));
    }
    return (kl_nats(px, dx, k) + kl_nats(py, dy, k) - kl_nats(p, dj, k)) / kLn2;
  };
  const Estimate e = full_and_blocks(pts, dj, 5 * (k + 1), derive_seed(seed, 1), stat);
  MutualInformationEstimate out;
  out.raw_bits = e.value;
  out.value_bits = std::max(e.value, 0.0);
  out.std_error_bits = e.std_error;
  out.saturated = covariance_degenerate(pts, dj);
  return out;
}

}  // namespace

NormEstimate lp_norm_estimate(std::span<const double> samples, LpExponent p, std::size_t batches) {
  if (samples.empty()) throw InvalidArgument("lp_norm_estimate: empty input");
  const std::size_t n = samples.size();
  NormEstimate out;
  if (p.is_infinite()) {
    double mx = 0.0;
    for (double x : samples) mx = std::max(mx, std::abs(x));
    out.value = mx;
    out.downward_biased = true;
    const std::size_t blocks = std::min(kGroups, n);
    std::vector<double> maxima(blocks, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t b = std::min(i * blocks / n, blocks - 1);
      maxima[b] = std::max(maxima[b], std::abs(samples[i]));
    }
    out.std_error = sample_sd(maxima);
    return out;
  }
  long double sum = 0.0L;
  for (double x : samples) sum += abs_pow(x, p);
  const double mean = static_cast<double>(sum / static_cast<long double>(n));
  out.value = root(mean, p);

  double se_mean = 0.0;
  if (batches > 1 && n >= 2 * batches) {
    std::vector<double> means(batches, 0.0);
    std::vector<std::size_t> counts(batches, 0);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t b = i * batches / n;
      means[b] += abs_pow(samples[i], p);
      ++counts[b];
    }
    for (std::size_t b = 0; b < batches; ++b) means[b] /= static_cast<double>(counts[b]);
    se_mean = sample_sd(means) / std::sqrt(static_cast<double>(batches));
  } else if (n > 1) {
    long double ss = 0.0L;
    for (double x : samples) {
      const long double d = abs_pow(x, p) - mean;
      ss += d * d;
    }
    se_mean = std::sqrt(static_cast<double>(ss / static_cast<long double>(n - 1)) /
                        static_cast<double>(n));
  }
  out.std_error = mean > 0.0 ? out.value / (p.value() * mean) * se_mean : 0.0;
  return out;
}

std::string to_string(EntropyEstimator id) {
  return id == EntropyEstimator::vasicek ? "vasicek" : "knn_kl";
}

EntropyEstimate entropy_estimate_1d(std::span<const double> samples, std::uint64_t seed) {
  const std::size_t n = samples.size();
  if (n < 100) throw InvalidArgument("entropy_estimate_1d: need at least 100 samples");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return samples[a] < samples[b]; });
  std::vector<double> sorted(n);
  for (std::size_t i = 0; i < n; ++i) sorted[i] = samples[order[i]];

  EntropyEstimate out;
  out.estimator_id = EntropyEstimator::vasicek;
  out.sample_count = n;
  const SpacingResult full = correa_nats(sorted);
  out.value_bits = full.nats / kLn2;

  std::size_t ties = 0;
  for (std::size_t i = 1; i < n; ++i) ties += sorted[i] == sorted[i - 1] ? 1 : 0;
  out.ties_warning = ties * 10 > n || full.degenerate_windows > 0;

  const auto labels = group_labels(n, kGroups, seed);
  std::vector<double> leave_out;
  std::vector<double> kept;
  kept.reserve(n);
  for (std::size_t g = 0; g < kGroups; ++g) {
    kept.clear();
    for (std::size_t i = 0; i < n; ++i)
      if (labels[order[i]] != g) kept.push_back(sorted[i]);
    leave_out.push_back(correa_nats(kept).nats / kLn2);
  }
  out.std_error_bits = jackknife_se(leave_out);
  return out;
}

EntropyEstimate entropy_estimate_knn(const Signal& samples, std::size_t k_neighbors,
                                     std::uint64_t seed) {
  const std::size_t dim = samples.dim();
  const std::size_t n = samples.length();
  if (dim == 0 || dim > 4) throw InvalidArgument("entropy_estimate_knn: dimension must be 1..4");
  if (k_neighbors == 0) throw InvalidArgument("entropy_estimate_knn: k must be positive");
  if (n < std::max<std::size_t>(50, 2 * (k_neighbors + 1)))
    throw InvalidArgument("entropy_estimate_knn: need at least 50 samples");

  EntropyEstimate out;
  out.estimator_id = EntropyEstimator::knn_kl;
  out.sample_count = n;
  const std::vector<double> pts = prepared_points(samples, seed, out.jitter_applied);
  out.degenerate = covariance_degenerate(pts, dim);
  const Estimate e = full_and_blocks(pts, dim, 2 * (k_neighbors + 1), derive_seed(seed, 1),
                                     [&](std::span<const double> p) {
                                       return kl_nats(p, dim, k_neighbors) / kLn2;
                                     });
  out.value_bits = e.value;
  out.std_error_bits = e.std_error;
  return out;
}

EntropyEstimate conditional_entropy_estimate(std::span<const double> path, std::size_t memory,
                                             std::size_t k_neighbors, std::uint64_t seed) {
  if (path.size() < 10000) throw InvalidArgument("conditional_entropy_estimate: path shorter than 10^4");
  if (memory > 3) throw InvalidArgument("conditional_entropy_estimate: memory must be <= 3");
  if (memory == 0) return entropy_estimate_knn(Signal(1, {path.begin(), path.end()}), k_neighbors, seed);

  const std::size_t dim = memory + 1;
  const std::size_t n = path.size() - memory;
  std::vector<double> embed(n * dim);
  for (std::size_t t = 0; t < n; ++t)
    for (std::size_t j = 0; j < dim; ++j) embed[t * dim + j] = path[t + j];
  bool jittered = false;
  const std::vector<double> pts = prepared_points(Signal(dim, embed), seed, jittered);

  auto stat = [&](std::span<const double> p) {
    const std::size_t m = p.size() / dim;
    std::vector<double> past;
    past.reserve(m * memory);
    for (std::size_t i = 0; i < m; ++i)
      past.insert(past.end(), p.begin() + static_cast<std::ptrdiff_t>(i * dim),
                  p.begin() + static_cast<std::ptrdiff_t>(i * dim + memory));
    return (kl_nats(p, dim, k_neighbors) - kl_nats(past, memory, k_neighbors)) / kLn2;
  };
  const Estimate e = full_and_blocks(pts, dim, 2 * (k_neighbors + 1), derive_seed(seed, 1), stat);
  EntropyEstimate out;
  out.estimator_id = EntropyEstimator::knn_kl;
  out.sample_count = n;
  out.value_bits = e.value;
  out.std_error_bits = e.std_error;
  out.jitter_applied = jittered;
  out.degenerate = covariance_degenerate(pts, dim);
  return out;
}

MutualInformationEstimate mutual_information_estimate(const Signal& x, const Signal& y,
                                                      std::size_t k_neighbors,
                                                      std::uint64_t seed) {
  if (x.length() != y.length()) throw DimensionError("mutual_information_estimate: length mismatch");
  if (x.length() < 10000) throw InvalidArgument("mutual_information_estimate: need at least 10^4 samples");
  if (x.dim() + y.dim() > 4) throw InvalidArgument("mutual_information_estimate: combined dimension > 4");
  return mi_impl(x, y, k_neighbors, seed);
}

bool WhitenessReport::passed(double alpha, double mi_threshold) const {
  return p_value >= alpha && mi_lag1_bits < std::max(mi_threshold, 3.0 * mi_lag1_std_error);
}

WhitenessReport whiteness_stats(std::span<const double> e, std::size_t max_lag, std::uint64_t seed,
                                std::size_t max_mi_samples) {
  if (max_lag == 0) throw InvalidArgument("whiteness_stats: max_lag must be positive");
  const std::size_t n = e.size();
  if (n < 100 * max_lag) throw InvalidArgument("whiteness_stats: need length >= 100 * max_lag");

  WhitenessReport out;
  const long double mean = std::accumulate(e.begin(), e.end(), 0.0L) / static_cast<long double>(n);
  long double c0 = 0.0L;
  for (double x : e) c0 += (x - mean) * (x - mean);
  out.autocorrelations.assign(max_lag, 0.0);
  double q = 0.0;
  for (std::size_t h = 1; h <= max_lag; ++h) {
    long double ch = 0.0L;
    for (std::size_t t = h; t < n; ++t) ch += (e[t] - mean) * (e[t - h] - mean);
    const double r = c0 > 0.0L ? static_cast<double>(ch / c0) : 0.0;
    out.autocorrelations[h - 1] = r;
    q += r * r / static_cast<double>(n - h);
  }
  out.portmanteau = static_cast<double>(n) * static_cast<double>(n + 2) * q;
  const boost::math::chi_squared chi2(static_cast<double>(max_lag));
  out.p_value = boost::math::cdf(boost::math::complement(chi2, out.portmanteau));

  if (max_mi_samples == 0) return out;
  const std::size_t pairs = std::min(n - 1, max_mi_samples);
  Signal cur(1, pairs), prev(1, pairs);
  for (std::size_t t = 0; t < pairs; ++t) {
    cur.raw()[t] = e[t + 1];
    prev.raw()[t] = e[t];
  }
  const MutualInformationEstimate mi = mi_impl(cur, prev, 4, seed);
  out.mi_lag1_bits = mi.value_bits;
  out.mi_lag1_std_error = mi.std_error_bits;
  return out;
}

DensityFit density_fit_gg(std::span<const double> samples, LpExponent p) {
  const std::size_t n = samples.size();
  if (n < 1000) throw InvalidArgument("density_fit_gg: need at least 1000 samples");
  const NormEstimate norm = lp_norm_estimate(samples, p);
  DensityFit out;
  out.fitted_mu = norm.value;
  out.threshold = 1.63 / std::sqrt(static_cast<double>(n));
  if (!(norm.value > 0.0)) {
    out.ks_distance = 1.0;
    return out;
  }
  const GeneralizedGaussian law(p, norm.value);
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  double d = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double f = law.cdf(sorted[i]);
    d = std::max({d, static_cast<double>(i + 1) / static_cast<double>(n) - f,
                  f - static_cast<double>(i) / static_cast<double>(n)});
  }
  out.ks_distance = d;
  return out;
}

DeterminantEstimate covariance_det_estimate(const Signal& samples, std::uint64_t seed) {
  const std::size_t dim = samples.dim();
  const std::size_t n = samples.length();
  if (n < 100 * dim || n < 2 * kGroups)
    throw InvalidArgument("covariance_det_estimate: need at least 100 samples per dimension");
  const auto m = static_cast<Eigen::Index>(dim);

  // Per-group sums let every leave-one-group-out covariance be assembled
  // without another pass over the data.
  const auto labels = group_labels(n, kGroups, seed);
  std::vector<Eigen::VectorXd> gsum(kGroups, Eigen::VectorXd::Zero(m));
  std::vector<Eigen::MatrixXd> gouter(kGroups, Eigen::MatrixXd::Zero(m, m));
  std::vector<double> gcount(kGroups, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::Map<const Eigen::VectorXd> x(samples.at(i).data(), m);
    const std::size_t g = labels[i];
    gsum[g] += x;
    gouter[g].noalias() += x * x.transpose();
    gcount[g] += 1.0;
  }
  Eigen::VectorXd tsum = Eigen::VectorXd::Zero(m);
  Eigen::MatrixXd touter = Eigen::MatrixXd::Zero(m, m);
  for (std::size_t g = 0; g < kGroups; ++g) {
    tsum += gsum[g];
    touter += gouter[g];
  }
  auto covariance = [&](const Eigen::VectorXd& s, const Eigen::MatrixXd& o, double cnt) {
    return Eigen::MatrixXd((o - s * s.transpose() / cnt) / (cnt - 1.0));
  };
  const Eigen::MatrixXd cov = covariance(tsum, touter, static_cast<double>(n));
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
  const double hi = es.eigenvalues().maxCoeff();

  DeterminantEstimate out;
  out.singular = hi <= 0.0 || es.eigenvalues().minCoeff() <= 1e-10 * hi;
  if (out.singular) return out;
  out.det = cov.determinant();
  std::vector<double> leave_out;
  for (std::size_t g = 0; g < kGroups; ++g)
    leave_out.push_back(
        covariance(tsum - gsum[g], touter - gouter[g], static_cast<double>(n) - gcount[g]).determinant());
  out.std_error = jackknife_se(leave_out);
  return out;
}

}  // namespace entrolim
