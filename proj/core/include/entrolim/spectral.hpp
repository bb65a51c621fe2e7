// Copyright 2026 The entrolim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "entrolim/processes.hpp"
#include "entrolim/spectral_density.hpp"

namespace entrolim {

/// (1/2pi) int_{-pi}^{pi} log2 sqrt(2 pi e S(w)) dw, the entropy rate of the
/// Gaussian process with spectrum S (Szego-Kolmogorov). Evaluated by adaptive
/// Gauss-Legendre quadrature on [0, pi] using even symmetry, absolute
/// tolerance 1e-9 bits. Throws QuadratureError where S vanishes.
double szego_entropy_integral_bits(const SpectralDensity& s);

/// Negentropy rate J = szego_entropy_integral_bits(S_d) - h_inf(d) >= 0,
/// zero iff d is Gaussian.
///
/// Defined through the relation between the spectral integral and the entropy
/// rate only; no further structure of the quantity is modelled. Throws Error
/// if the result is below -1e-6, which indicates an inconsistent model.
double negentropy_rate_bits(const DisturbanceModel& model);

/// Gaussianity-whiteness GW = 2^{2 h_inf(d)} / (2 pi e lim E[d_k^2]) in [0, 1],
/// equal to 1 iff d is white Gaussian. For Gaussian AR(1) it is 1 - a^2.
///
/// This is the value for which the variance-form asymptotic bound coincides
/// with the entropy-rate form; no further structure is modelled.
double gaussianity_whiteness(const DisturbanceModel& model);

}  // namespace entrolim
