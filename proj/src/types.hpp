// Shared basic types for the cubic-strata library: field parameters, the
// tolerance record, and the complex number text format used by every
// external interface ("a+bi", with a mandatory sign between the parts).
#pragma once

#include <array>
#include <complex>
#include <optional>
#include <string>

namespace cubicstrata {

using Complex = std::complex<double>;

// Parameters of the vector field  z' = z^3 + e1*z + e0  on the sphere.
struct Params {
  Complex e1{0.0, 0.0};
  Complex e0{0.0, 0.0};
};

inline Complex eval_p(const Params& p, Complex z) { return (z * z + p.e1) * z + p.e0; }
inline Complex eval_dp(const Params& p, Complex z) { return 3.0 * z * z + p.e1; }

// Every numeric knob in one record.  Certificates embed the values they were
// decided under, so a classification can be replayed later.
struct Tolerances {
  double root_merge = 1e-8;     // |zi-zj| <= root_merge*max(1,|zi|,|zj|) merges
  double root_round = 1e-12;    // canonical ordering rounds (Re,Im) to this
  double zero_norm = 1e-12;     // |e1|+|e0| at or below this is the zero field
  double axis = 1e-9;           // pointwise relative eigenvalue axis distance
  double band = 1e-3;           // banded axis distance for grid sampling
  double locate = 1e-10;        // boundary location indicator residual
  double rel = 1e-10;           // integrator relative tolerance
  double abs = 1e-12;           // integrator absolute tolerance
  double max_time = 1e4;        // |t| budget per trajectory
  double landing = 1e-6;        // landing radius, times the root scale
  double match = 1e-6;          // separatrix match tolerance, radians at |z|=R
  double chart_factor = 10.0;   // R = chart_factor*max(1,|e1|^(1/2),|e0|^(1/3))
  double quad_rel = 1e-10;      // path time quadrature target
  double d0 = 1e-2;             // largest wall offset in the limit ladder
  int extrap_k = 8;             // ladder depth: d0*2^-k, k=0..extrap_k
  double crossing = 1e-4;       // wall-crossing relation residual bound
  // Grid profile: dense slice sampling trades some accuracy for speed.
  double grid_rel = 1e-8;
  double grid_abs = 1e-10;
  double grid_landing = 1e-5;
};

// "a+bi" with a mandatory sign between the parts, e.g. "-3+1i", "0-0.5i",
// "1e-3+2e-4i".  This is the one complex format used by the CLI and files.
std::string format_complex(Complex v, int precision = 12);
std::optional<Complex> parse_complex(const std::string& text);

// Plain decimal helper used by the writers; %.*g via snprintf.
std::string format_double(double v, int precision = 12);

}  // namespace cubicstrata
