#pragma once

namespace phase_manifold::numerics {

// log(erfc(z)), finite for all finite z (no underflow for large positive z).
double log_erfc(double z);

// exp(a) * erfc(z) evaluated in log space where the factors would
// overflow/underflow separately.
double exp_times_erfc(double a, double z);

}  // namespace phase_manifold::numerics
