// Copyright 2026 The entrolim Authors
// SPDX-License-Identifier: Apache-2.0

#include "entrolim/bounds.hpp"

#include <cmath>
#include <numbers>

#include "entrolim/spectral.hpp"
#include "json.hpp"

namespace entrolim {

std::string horizon_label(const Horizon& h) {
  if (const auto* s = std::get_if<AtStep>(&h)) return std::to_string(s->k);
  return "asymptotic";
}

std::string to_string(BoundForm form) {
  switch (form) {
    case BoundForm::direct: return "direct";
    case BoundForm::asymptotic: return "asymptotic";
    case BoundForm::spectral: return "spectral";
    case BoundForm::gw: return "gw";
    case BoundForm::variance: return "variance";
    case BoundForm::maxdev: return "maxdev";
    case BoundForm::mimo_det: return "mimo_det";
    case BoundForm::mimo_product: return "mimo_product";
  }
  return "unknown";
}

bool BoundReport::consistent(double rel_tol) const {
  const bool squared = form == BoundForm::variance || form == BoundForm::mimo_det ||
                       form == BoundForm::mimo_product;
  const double expected =
      std::exp2((squared ? 2.0 : 1.0) * conditional_entropy_bits) / constant_cp;
  return std::abs(expected - bound_value) <= rel_tol * std::abs(expected);
}

std::string BoundReport::to_json() const {
  nlohmann::ordered_json j;
  j["form"] = to_string(form);
  j["p"] = p.to_string();
  if (const auto* s = std::get_if<AtStep>(&horizon)) {
    j["k_or_asymptotic"] = s->k;
  } else {
    j["k_or_asymptotic"] = "asymptotic";
  }
  j["h_bits"] = conditional_entropy_bits;
  j["C_p"] = constant_cp;
  j["bound"] = bound_value;
  return j.dump();
}

double lp_constant(LpExponent p) {
  if (p.is_infinite()) return 2.0;
  const double v = p.value();
  return 2.0 * std::tgamma((v + 1.0) / v) * std::pow(v * std::numbers::e, 1.0 / v);
}

double lp_bound(double h_cond_bits, LpExponent p) {
  return std::exp2(h_cond_bits) / lp_constant(p);
}

BoundReport lp_bound_at_step(const DisturbanceModel& model, LpExponent p, std::size_t k) {
  if (model.dim() != 1) throw DimensionError("L_p bounds are defined for scalar models");
  BoundReport r;
  r.form = BoundForm::direct;
  r.p = p;
  r.horizon = AtStep{k};
  r.conditional_entropy_bits = model.conditional_entropy_bits(k);
  r.constant_cp = lp_constant(p);
  r.bound_value = std::exp2(r.conditional_entropy_bits) / r.constant_cp;
  return r;
}

BoundReport lp_bound_asymptotic(const DisturbanceModel& model, LpExponent p) {
  if (model.dim() != 1) throw DimensionError("L_p bounds are defined for scalar models");
  BoundReport r;
  r.form = BoundForm::asymptotic;
  r.p = p;
  r.horizon = Asymptotic{};
  r.conditional_entropy_bits = model.entropy_rate_bits();
  r.constant_cp = lp_constant(p);
  r.bound_value = std::exp2(r.conditional_entropy_bits) / r.constant_cp;
  return r;
}

double variance_bound(double h_cond_bits) { return std::exp2(2.0 * h_cond_bits - kLog2TwoPiE); }

double maxdev_bound(double h_cond_bits) { return std::exp2(h_cond_bits) / 2.0; }

BoundReport spectral_lp_bound(const DisturbanceModel& model, LpExponent p) {
  const double szego = szego_entropy_integral_bits(model.power_spectrum());
  const double j = negentropy_rate_bits(model);
  BoundReport r;
  r.form = BoundForm::spectral;
  r.p = p;
  r.horizon = Asymptotic{};
  r.conditional_entropy_bits = szego - j;
  r.constant_cp = lp_constant(p);
  r.bound_value = std::exp2(-j) * std::exp2(szego) / r.constant_cp;
  return r;
}

BoundReport gw_lp_bound(const DisturbanceModel& model, LpExponent p) {
  const double gw = gaussianity_whiteness(model);
  const double variance = model.stationary_variance();
  BoundReport r;
  r.form = BoundForm::gw;
  r.p = p;
  r.horizon = Asymptotic{};
  r.constant_cp = lp_constant(p);
  r.bound_value = std::sqrt(2.0 * std::numbers::pi * std::numbers::e) / r.constant_cp *
                  std::sqrt(gw * variance);
  r.conditional_entropy_bits = 0.5 * (kLog2TwoPiE + std::log2(gw * variance));
  return r;
}

double mimo_det_bound(double h_cond_bits, std::size_t m) {
  if (m == 0) throw InvalidArgument("MIMO dimension must be >= 1");
  return std::exp2(2.0 * h_cond_bits - static_cast<double>(m) * kLog2TwoPiE);
}

double mimo_product_bound(double h_cond_bits, std::size_t m) {
  return mimo_det_bound(h_cond_bits, m);
}

BoundReport mimo_bound(const DisturbanceModel& model, const Horizon& horizon, BoundForm form) {
  if (form != BoundForm::mimo_det && form != BoundForm::mimo_product) {
    throw InvalidArgument("mimo_bound form must be mimo_det or mimo_product");
  }
  BoundReport r;
  r.form = form;
  r.p = LpExponent::finite(2.0);
  r.horizon = horizon;
  r.dim = model.dim();
  if (const auto* s = std::get_if<AtStep>(&horizon)) {
    r.conditional_entropy_bits = model.conditional_entropy_bits(s->k);
  } else {
    r.conditional_entropy_bits = model.entropy_rate_bits();
  }
  r.constant_cp = std::exp2(static_cast<double>(r.dim) * kLog2TwoPiE);
  r.bound_value = mimo_det_bound(r.conditional_entropy_bits, r.dim);
  return r;
}

}  // namespace entrolim
