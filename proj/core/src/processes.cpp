// Copyright 2026 The entrolim Authors
// SPDX-License-Identifier: Apache-2.0

#include "entrolim/processes.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

namespace entrolim {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::string format_list(std::span<const double> xs) {
  std::string out = "[";
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i > 0) out += ",";
    out += format_double(xs[i]);
  }
  return out + "]";
}

double companion_spectral_radius(std::span<const double> first_row) {
  const auto n = static_cast<Eigen::Index>(first_row.size());
  if (n == 0) return 0.0;
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) c(0, j) = first_row[static_cast<std::size_t>(j)];
  for (Eigen::Index i = 1; i < n; ++i) c(i, i - 1) = 1.0;
  Eigen::EigenSolver<Eigen::MatrixXd> eig(c, false);
  return eig.eigenvalues().cwiseAbs().maxCoeff();
}

double matrix_spectral_radius(const Eigen::MatrixXd& a) {
  Eigen::EigenSolver<Eigen::MatrixXd> eig(a, false);
  return eig.eigenvalues().cwiseAbs().maxCoeff();
}

std::size_t decay_steps(double radius) {
  if (radius <= 0.0) return 0;
  return static_cast<std::size_t>(std::ceil(std::log(1e-3) / std::log(radius)));
}

// Solves Sigma = A Sigma A^T + Q through vec(Sigma) = (I - A kron A)^{-1} vec(Q).
Eigen::MatrixXd discrete_lyapunov(const Eigen::MatrixXd& a, const Eigen::MatrixXd& q) {
  const Eigen::Index m = a.rows();
  Eigen::MatrixXd kron(m * m, m * m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j) kron.block(i * m, j * m, m, m) = a(i, j) * a;
  const Eigen::MatrixXd lhs = Eigen::MatrixXd::Identity(m * m, m * m) - kron;
  Eigen::VectorXd rhs(m * m);
  // Row-major vec so that kron(A, A) vec(S) = vec(A S A^T).
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j) rhs(i * m + j) = q(i, j);
  const Eigen::VectorXd sol = lhs.fullPivLu().solve(rhs);
  Eigen::MatrixXd out(m, m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j) out(i, j) = sol(i * m + j);
  return 0.5 * (out + out.transpose());
}

Eigen::MatrixXd factor_psd(const Eigen::MatrixXd& cov) {
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() == Eigen::Success) return llt.matrixL();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  const Eigen::VectorXd root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return eig.eigenvectors() * root.asDiagonal();
}

void require_stable_scalar(std::span<const double> ar, std::span<const double> ma) {
  for (double c : ar)
    if (!std::isfinite(c)) throw InvalidArgument("AR coefficients must be finite");
  for (double c : ma)
    if (!std::isfinite(c)) throw InvalidArgument("MA coefficients must be finite");
  if (ar_spectral_radius(ar) >= 1.0) {
    throw InvalidArgument("AR polynomial has a root on or inside the unit circle: " +
                          format_list(ar));
  }
  std::vector<double> neg_ma(ma.begin(), ma.end());
  for (double& c : neg_ma) c = -c;
  if (companion_spectral_radius(neg_ma) >= 1.0) {
    throw InvalidArgument("MA polynomial is not invertible: " + format_list(ma));
  }
}

}  // namespace

double ar_spectral_radius(std::span<const double> ar) {
  return companion_spectral_radius(ar);
}

std::vector<double> arma_impulse_response(std::span<const double> ar,
                                          std::span<const double> ma,
                                          std::size_t n) {
  std::vector<double> psi(n + 1, 0.0);
  psi[0] = 1.0;
  for (std::size_t j = 1; j <= n; ++j) {
    double v = j <= ma.size() ? ma[j - 1] : 0.0;
    for (std::size_t i = 1; i <= std::min(j, ar.size()); ++i) v += ar[i - 1] * psi[j - i];
    psi[j] = v;
  }
  return psi;
}

std::vector<double> arma_autocovariance(std::span<const double> ar,
                                        std::span<const double> ma,
                                        double innovation_variance,
                                        std::size_t max_lag) {
  const std::size_t p = ar.size();
  const std::size_t q = ma.size();
  const std::vector<double> psi = arma_impulse_response(ar, ma, q);
  auto theta = [&](std::size_t j) { return j == 0 ? 1.0 : ma[j - 1]; };
  auto forcing = [&](std::size_t k) {
    double s = 0.0;
    for (std::size_t j = k; j <= q; ++j) s += theta(j) * psi[j - k];
    return innovation_variance * s;
  };

  const auto n = static_cast<Eigen::Index>(p + 1);
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd rhs(n);
  for (std::size_t k = 0; k <= p; ++k) {
    for (std::size_t j = 1; j <= p; ++j) {
      const std::size_t lag = k >= j ? k - j : j - k;
      m(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(lag)) -= ar[j - 1];
    }
    rhs(static_cast<Eigen::Index>(k)) = forcing(k);
  }
  const Eigen::VectorXd head = m.fullPivLu().solve(rhs);

  std::vector<double> r(std::max(max_lag, p) + 1, 0.0);
  for (std::size_t k = 0; k <= p; ++k) r[k] = head(static_cast<Eigen::Index>(k));
  for (std::size_t k = p + 1; k < r.size(); ++k) {
    double v = forcing(k);
    for (std::size_t j = 1; j <= p; ++j) v += ar[j - 1] * r[k - j];
    r[k] = v;
  }
  r.resize(max_lag + 1);
  return r;
}

DisturbanceModel::DisturbanceModel(ModelSpec spec, ModelOptions options) {
  auto state = std::make_shared<State>(spec, options);

  auto init_scalar = [&](std::span<const double> ar, std::span<const double> ma,
                         double variance) {
    require_stable_scalar(ar, ma);
    if (!(variance > 0.0)) throw InvalidArgument("innovation variance must be positive");
    const std::size_t order = std::max(ar.size(), ma.size());
    const double radius =
        std::max(ar_spectral_radius(ar), [&] {
          std::vector<double> neg(ma.begin(), ma.end());
          for (double& c : neg) c = -c;
          return companion_spectral_radius(neg);
        }());
    state->effective_memory = std::max<std::size_t>({1, order, decay_steps(radius)});
    const std::size_t horizon = options.prediction_horizon;
    state->autocov = arma_autocovariance(ar, ma, variance, std::max(order, horizon));
    state->psi = arma_impulse_response(ar, ma, order);
    state->stationary_cov = Eigen::MatrixXd::Constant(1, 1, state->autocov[0]);

    constexpr std::size_t kMaxStoredOrder = 1024;
    state->predictors = levinson_durbin(state->autocov, horizon,
                                        std::min(horizon, kMaxStoredOrder));
    const auto& pv = state->predictors.error_variance;
    std::size_t order_found = std::min(horizon, kMaxStoredOrder);
    for (std::size_t k = 0; k <= std::min(horizon, kMaxStoredOrder); ++k) {
      if (pv[k] - variance <= 1e-12 * variance) {
        order_found = k;
        break;
      }
    }
    state->prediction_order = order_found;
  };

  std::visit(
      Overloaded{
          [&](const IidSpec& s) { init_scalar({}, {}, s.innovation.variance()); },
          [&](const GaussArmaSpec& s) { init_scalar(s.ar, s.ma, s.innovation_variance); },
          [&](const GenGaussArSpec& s) { init_scalar(s.ar, {}, s.innovation.variance()); },
          [&](const VectorGaussArSpec& s) {
            const auto& a = s.transition;
            if (a.rows() == 0) throw InvalidArgument("vector AR transition is empty");
            if (a.rows() != a.cols()) {
              throw DimensionError("vector AR transition must be square");
            }
            if (s.innovation_covariance.rows() != a.rows() ||
                s.innovation_covariance.cols() != a.cols()) {
              throw DimensionError("innovation covariance must match transition size");
            }
            require_spd(s.innovation_covariance, "innovation covariance");
            const double radius = matrix_spectral_radius(a);
            if (radius >= 1.0) {
              throw InvalidArgument("vector AR transition has spectral radius >= 1");
            }
            state->effective_memory = std::max<std::size_t>(1, decay_steps(radius));
            state->stationary_cov = discrete_lyapunov(a, s.innovation_covariance);
          }},
      spec);

  if (const auto* arma = std::get_if<GaussArmaSpec>(&spec)) {
    // Joint stationary law of (d_{-1..-p}, w_{-1..-q}).
    const std::size_t p = arma->ar.size();
    const std::size_t q = arma->ma.size();
    const double s2 = arma->innovation_variance;
    const std::vector<double> psi = arma_impulse_response(arma->ar, arma->ma, p + q);
    const auto n = static_cast<Eigen::Index>(p + q);
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t i = 1; i <= p; ++i) {
      for (std::size_t j = 1; j <= p; ++j) {
        cov(static_cast<Eigen::Index>(i - 1), static_cast<Eigen::Index>(j - 1)) =
            state->autocov[i > j ? i - j : j - i];
      }
      for (std::size_t j = 1; j <= q; ++j) {
        const double c = j >= i ? s2 * psi[j - i] : 0.0;
        const auto di = static_cast<Eigen::Index>(i - 1);
        const auto wj = static_cast<Eigen::Index>(p + j - 1);
        cov(di, wj) = c;
        cov(wj, di) = c;
      }
    }
    for (std::size_t j = 1; j <= q; ++j) {
      const auto wj = static_cast<Eigen::Index>(p + j - 1);
      cov(wj, wj) = s2;
    }
    if (n > 0) state->initial_state_chol = factor_psd(cov);
  }
  if (std::holds_alternative<VectorGaussArSpec>(spec))
    state->initial_state_chol = factor_psd(state->stationary_cov);

  state_ = std::move(state);
}

DisturbanceModel DisturbanceModel::iid(GeneralizedGaussian innovation) {
  return DisturbanceModel(IidSpec{innovation});
}

DisturbanceModel DisturbanceModel::gauss_arma(std::vector<double> ar, std::vector<double> ma,
                                              double innovation_variance) {
  return DisturbanceModel(GaussArmaSpec{std::move(ar), std::move(ma), innovation_variance});
}

DisturbanceModel DisturbanceModel::gen_gauss_ar(std::vector<double> ar,
                                                GeneralizedGaussian innovation) {
  return DisturbanceModel(GenGaussArSpec{std::move(ar), innovation});
}

DisturbanceModel DisturbanceModel::vector_gauss_ar(Eigen::MatrixXd transition,
                                                   Eigen::MatrixXd innovation_covariance) {
  return DisturbanceModel(
      VectorGaussArSpec{std::move(transition), std::move(innovation_covariance)});
}

ModelKind DisturbanceModel::kind() const {
  return static_cast<ModelKind>(state_->spec.index());
}

std::size_t DisturbanceModel::dim() const {
  if (const auto* v = std::get_if<VectorGaussArSpec>(&state_->spec)) {
    return static_cast<std::size_t>(v->transition.rows());
  }
  return 1;
}

bool DisturbanceModel::is_gaussian() const {
  return std::visit(Overloaded{[](const IidSpec& s) {
                                 return !s.innovation.p().is_infinite() &&
                                        s.innovation.p().value() == 2.0;
                               },
                               [](const GaussArmaSpec&) { return true; },
                               [](const GenGaussArSpec& s) {
                                 return !s.innovation.p().is_infinite() &&
                                        s.innovation.p().value() == 2.0;
                               },
                               [](const VectorGaussArSpec&) { return true; }},
                    state_->spec);
}

std::string DisturbanceModel::descriptor() const {
  return std::visit(
      Overloaded{
          [](const IidSpec& s) { return "iid(" + s.innovation.descriptor() + ")"; },
          [](const GaussArmaSpec& s) {
            return "gauss_arma(ar=" + format_list(s.ar) + ",ma=" + format_list(s.ma) +
                   ",var=" + format_double(s.innovation_variance) + ")";
          },
          [](const GenGaussArSpec& s) {
            return "gen_gauss_ar(ar=" + format_list(s.ar) + "," + s.innovation.descriptor() +
                   ")";
          },
          [](const VectorGaussArSpec& s) {
            std::ostringstream os;
            os << "vector_gauss_ar(m=" << s.transition.rows() << ",A=[";
            for (Eigen::Index i = 0; i < s.transition.size(); ++i) {
              if (i > 0) os << ",";
              os << format_double(s.transition(i / s.transition.cols(), i % s.transition.cols()));
            }
            os << "])";
            return os.str();
          }},
      state_->spec);
}

Signal DisturbanceModel::sample_path(std::size_t length, std::uint64_t seed) const {
  if (length == 0) throw InvalidArgument("sample_path length must be >= 1");
  Rng rng(seed);
  std::normal_distribution<double> normal;
  const State& st = *state_;

  return std::visit(
      Overloaded{
          [&](const IidSpec& s) {
            Signal out(1, length);
            for (auto& x : out.raw()) x = s.innovation.draw(rng);
            return out;
          },
          [&](const GaussArmaSpec& s) {
            const std::size_t p = s.ar.size();
            const std::size_t q = s.ma.size();
            const double sd = std::sqrt(s.innovation_variance);
            std::vector<double> d(p + length, 0.0);
            std::vector<double> w(q + length, 0.0);
            if (p + q > 0) {
              Eigen::VectorXd z(static_cast<Eigen::Index>(p + q));
              for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = normal(rng);
              const Eigen::VectorXd init = st.initial_state_chol * z;
              // init(i-1) = d_{-i}; init(p+j-1) = w_{-j}.
              for (std::size_t i = 1; i <= p; ++i) d[p - i] = init(static_cast<Eigen::Index>(i - 1));
              for (std::size_t j = 1; j <= q; ++j)
                w[q - j] = init(static_cast<Eigen::Index>(p + j - 1));
            }
            Signal out(1, length);
            for (std::size_t k = 0; k < length; ++k) {
              const double wk = sd * normal(rng);
              w[q + k] = wk;
              double v = wk;
              for (std::size_t i = 1; i <= p; ++i) v += s.ar[i - 1] * d[p + k - i];
              for (std::size_t j = 1; j <= q; ++j) v += s.ma[j - 1] * w[q + k - j];
              d[p + k] = v;
              out.raw()[k] = v;
            }
            return out;
          },
          [&](const GenGaussArSpec& s) {
            const std::size_t p = s.ar.size();
            const std::size_t burn_in = 10 * st.effective_memory;
            std::vector<double> d(p + burn_in + length, 0.0);
            for (std::size_t k = p; k < d.size(); ++k) {
              double v = s.innovation.draw(rng);
              for (std::size_t i = 1; i <= p; ++i) v += s.ar[i - 1] * d[k - i];
              d[k] = v;
            }
            return Signal(1, std::vector<double>(d.end() - static_cast<std::ptrdiff_t>(length),
                                                 d.end()));
          },
          [&](const VectorGaussArSpec& s) {
            const auto m = s.transition.rows();
            const Eigen::MatrixXd chol_w = factor_psd(s.innovation_covariance);
            Signal out(static_cast<std::size_t>(m), length);
            Eigen::VectorXd z(m);
            for (Eigen::Index i = 0; i < m; ++i) z(i) = normal(rng);
            Eigen::VectorXd x = st.initial_state_chol * z;
            for (std::size_t k = 0; k < length; ++k) {
              if (k > 0) {
                for (Eigen::Index i = 0; i < m; ++i) z(i) = normal(rng);
                x = s.transition * x + chol_w * z;
              }
              auto slot = out.at(k);
              for (Eigen::Index i = 0; i < m; ++i) slot[static_cast<std::size_t>(i)] = x(i);
            }
            return out;
          }},
      st.spec);
}

double DisturbanceModel::innovation_entropy_bits() const {
  return std::visit(
      Overloaded{[](const IidSpec& s) { return s.innovation.entropy_bits(); },
                 [](const GaussArmaSpec& s) { return gaussian_entropy_bits(s.innovation_variance); },
                 [](const GenGaussArSpec& s) { return s.innovation.entropy_bits(); },
                 [](const VectorGaussArSpec& s) {
                   return GaussianVector(s.innovation_covariance).entropy_bits();
                 }},
      state_->spec);
}

double DisturbanceModel::conditional_entropy_bits(std::size_t k) const {
  const State& st = *state_;
  return std::visit(
      Overloaded{
          [&](const IidSpec& s) { return s.innovation.entropy_bits(); },
          [&](const GaussArmaSpec&) {
            if (k > st.options.prediction_horizon) {
              throw CapacityError("conditional entropy requested at k=" + std::to_string(k) +
                                  " beyond prediction horizon " +
                                  std::to_string(st.options.prediction_horizon));
            }
            return gaussian_entropy_bits(st.predictors.error_variance[k]);
          },
          [&](const GenGaussArSpec& s) {
            if (k < s.ar.size()) {
              throw UnavailableError(
                  "conditional entropy of a non-Gaussian AR model is not available "
                  "in closed form for k < AR order");
            }
            return s.innovation.entropy_bits();
          },
          [&](const VectorGaussArSpec& s) {
            if (k == 0) return GaussianVector(st.stationary_cov).entropy_bits();
            return GaussianVector(s.innovation_covariance).entropy_bits();
          }},
      st.spec);
}

EntropySchedule DisturbanceModel::entropy_schedule(std::size_t k_max) const {
  EntropySchedule out;
  out.conditional_bits.reserve(k_max + 1);
  for (std::size_t k = 0; k <= k_max; ++k) out.conditional_bits.push_back(conditional_entropy_bits(k));
  out.entropy_rate_bits = entropy_rate_bits();
  return out;
}

double DisturbanceModel::entropy_rate_bits() const { return innovation_entropy_bits(); }

std::vector<double> DisturbanceModel::autocovariance(std::size_t max_lag) const {
  if (dim() != 1) throw InvalidArgument("autocovariance is defined for scalar models");
  if (max_lag < state_->autocov.size()) {
    return {state_->autocov.begin(),
            state_->autocov.begin() + static_cast<std::ptrdiff_t>(max_lag + 1)};
  }
  return arma_autocovariance(ar(), ma(), innovation_variance(), max_lag);
}

SpectralDensity DisturbanceModel::power_spectrum() const {
  if (dim() != 1) throw InvalidArgument("power_spectrum is defined for scalar models");
  RationalSpectrum r;
  r.ar.assign(ar().begin(), ar().end());
  r.ma.assign(ma().begin(), ma().end());
  r.variance = innovation_variance();
  return SpectralDensity(std::move(r));
}

double DisturbanceModel::stationary_variance() const {
  if (dim() != 1) throw InvalidArgument("stationary_variance is defined for scalar models");
  return state_->stationary_cov(0, 0);
}

Eigen::MatrixXd DisturbanceModel::stationary_covariance() const { return state_->stationary_cov; }

double DisturbanceModel::innovation_variance() const {
  return std::visit(
      Overloaded{[](const IidSpec& s) { return s.innovation.variance(); },
                 [](const GaussArmaSpec& s) { return s.innovation_variance; },
                 [](const GenGaussArSpec& s) { return s.innovation.variance(); },
                 [](const VectorGaussArSpec&) -> double {
                   throw InvalidArgument("innovation_variance is defined for scalar models");
                 }},
      state_->spec);
}

std::span<const double> DisturbanceModel::ar() const {
  if (const auto* s = std::get_if<GaussArmaSpec>(&state_->spec)) return s->ar;
  if (const auto* s = std::get_if<GenGaussArSpec>(&state_->spec)) return s->ar;
  return {};
}

std::span<const double> DisturbanceModel::ma() const {
  if (const auto* s = std::get_if<GaussArmaSpec>(&state_->spec)) return s->ma;
  return {};
}

const Eigen::MatrixXd& DisturbanceModel::transition() const {
  if (const auto* s = std::get_if<VectorGaussArSpec>(&state_->spec)) return s->transition;
  throw InvalidArgument("transition() is defined for vector models");
}

const LinearPredictorSet& DisturbanceModel::predictors() const {
  if (dim() != 1) throw InvalidArgument("predictors() is defined for scalar models");
  return state_->predictors;
}

}  // namespace entrolim
