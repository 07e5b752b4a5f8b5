// SPDX-License-Identifier: Apache-2.0
//
// Entropy-coded dithered scalar quantization of the KL coefficients of the
// MMSE estimate, with the 1.508-bit-per-coefficient rate accounting and the
// mapping from a feedback budget to an achievable error.

#pragma once

#include <armadillo>
#include <vector>

#include "csifb/estimation.hpp"
#include "csifb/rng.hpp"

namespace csifb {

// Per-complex-coefficient entropy overhead of the dithered uniform scalar
// quantizer over the rate-distortion bound (0.754 bits per real dimension).
inline constexpr double kEcsqOverheadBits = 1.508;

struct BitAllocation {
    double gamma = 0.0;
    std::vector<int> quantized_set;  // indices with lambda^u >= gamma
    arma::vec per_coeff_bits;        // log2(lambda/gamma) + 1.508, per quantized coeff
    double total_bits = 0.0;         // R_scalar
    double target_distortion = 0.0;  // error this allocation achieves
    bool saturated = false;          // budget exceeded the representable range
};

// Water-fill the excess D - D_mmse and charge 1.508 bits per quantized
// coefficient. Throws for D <= D_mmse.
BitAllocation allocate_bits(const PosteriorModel& pm, double target_distortion);

// Unique D with R_scalar(D) = beta_fb * C_ul, by monotone bisection on the
// water level. Saturates at the smallest representable excess.
BitAllocation budget_to_error(const PosteriorModel& pm, double beta_fb,
                              double c_ul);

// Subtractive-dithered uniform quantization of the KL coefficient vector,
// real and imaginary parts independently with step sqrt(6*gamma) (so the
// per-complex-coefficient MSE is gamma). Encoder and decoder share the dither
// through the seeded stream. Unquantized coefficients reconstruct as zero.
// use_dither=false is a test hook.
arma::cx_vec ecsq_encode_decode(const arma::cx_vec& kl_coeffs,
                                const BitAllocation& alloc, RngStream& dither,
                                bool use_dither = true);

} // namespace csifb
