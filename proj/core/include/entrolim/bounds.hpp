// Copyright 2026 The entrolim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <string>
#include <variant>

#include "entrolim/common.hpp"
#include "entrolim/processes.hpp"

namespace entrolim {

/// Finite-time horizon: the bound on e_k at step k.
struct AtStep {
  std::size_t k = 0;
  friend bool operator==(const AtStep&, const AtStep&) = default;
};
/// liminf over k.
struct Asymptotic {
  friend bool operator==(const Asymptotic&, const Asymptotic&) = default;
};
using Horizon = std::variant<AtStep, Asymptotic>;

/// "asymptotic" or the decimal step index.
std::string horizon_label(const Horizon& h);

struct BoundSpec {
  LpExponent p = LpExponent::finite(2.0);
  Horizon horizon = Asymptotic{};
};

enum class BoundForm { direct, asymptotic, spectral, gw, variance, maxdev, mimo_det, mimo_product };

std::string to_string(BoundForm form);

/// A lower bound together with the ingredients it was computed from. Bounds
/// are in the units of the error signal (variance units for the variance and
/// MIMO forms); entropies in bits.
struct BoundReport {
  BoundForm form = BoundForm::direct;
  LpExponent p = LpExponent::finite(2.0);
  Horizon horizon = Asymptotic{};
  double conditional_entropy_bits = 0.0;
  double constant_cp = 0.0;
  double bound_value = 0.0;
  /// Signal dimension for the MIMO forms.
  std::size_t dim = 1;

  /// Recomputes bound_value from the entropy and constant: 2^h / C for norm
  /// forms, 2^{2h} / C for the variance and determinant forms.
  [[nodiscard]] bool consistent(double rel_tol = 1e-12) const;
  /// {"form","p","k_or_asymptotic","h_bits","C_p","bound"}.
  [[nodiscard]] std::string to_json() const;
};

/// C_p = 2 Gamma((p+1)/p) (p e)^{1/p}; C_inf = 2. Rejects p < 1 through
/// LpExponent.
double lp_constant(LpExponent p);

/// Lower bound 2^h / C_p on [E|e_k|^p]^{1/p} given h = h(d_k | d_0..d_{k-1}).
double lp_bound(double h_cond_bits, LpExponent p);

/// lp_bound applied to the model's conditional entropy at step k.
BoundReport lp_bound_at_step(const DisturbanceModel& model, LpExponent p, std::size_t k);

/// 2^{h_inf(d)} / C_p, the bound on liminf [E|e_k|^p]^{1/p}.
BoundReport lp_bound_asymptotic(const DisturbanceModel& model, LpExponent p);

/// 2^{2h} / (2 pi e): the minimum-variance floor on E[e_k^2].
double variance_bound(double h_cond_bits);

/// 2^h / 2: the floor on esssup |e_k|.
double maxdev_bound(double h_cond_bits);

/// 2^{-J_inf} 2^{(1/2pi) int log2 sqrt(2 pi e S_d)} / C_p.
BoundReport spectral_lp_bound(const DisturbanceModel& model, LpExponent p);

/// (sqrt(2 pi e) / C_p) sqrt(GW_d lim E[d_k^2]).
BoundReport gw_lp_bound(const DisturbanceModel& model, LpExponent p);

/**
 * Lower bound on det E[e_k e_k^T] for m-dimensional errors:
 * 2^{2h} / (2 pi e)^m.
 *
 * The exponent is 2h: this is what the maximum-entropy bound for Gaussian
 * vectors (h <= log2 sqrt((2 pi e)^m det Sigma)) yields, and it is the only
 * choice for which m = 1 reduces to variance_bound(h). A form printed with
 * 2^h is dimensionally inconsistent and is not used here.
 */
double mimo_det_bound(double h_cond_bits, std::size_t m);

/// Lower bound on prod_i E[e_k(i)^2]. Same value as mimo_det_bound, via
/// Hadamard's inequality det Sigma <= prod_i Sigma_ii.
double mimo_product_bound(double h_cond_bits, std::size_t m);

/// MIMO determinant (or product) bound for a vector model at a horizon.
BoundReport mimo_bound(const DisturbanceModel& model, const Horizon& horizon,
                       BoundForm form = BoundForm::mimo_det);

}  // namespace entrolim
