#pragma once

namespace epsim {

inline constexpr const char* kVersion = "0.1.0";

// One-line statement of the evolution convention used throughout:
// amplitudes propagate as U(z) = exp(-i z H) with loss entering the
// Hamiltonian diagonal as beta - i g_m Gamma, so every eigenvalue of a
// lossy lattice has non-positive imaginary part and |U(z)| is passive.
inline constexpr const char* kConvention =
    "U(z)=exp(-izH), diagonal beta - i*g_m*Gamma";

}  // namespace epsim
