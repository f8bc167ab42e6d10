#pragma once

#include <iosfwd>
#include <vector>

namespace specpart::oracles {

/// Bound state of -u'' + V_L u on the half-line with u(0) = 0, V_L = 0 on
/// (0, L], c beyond: the unique root of tan(sqrt(l) L) = -1/sqrt(c/l - 1)
/// in (pi^2/(4L^2), min(c, pi^2/L^2)). Throws BracketInvalid unless
/// pi^2/(4L^2) < c < pi^2/L^2.
double transcendental_root(double L, double c);

/// Residual of the defining equation at lambda.
double transcendental_residual(double L, double c, double lambda);

/// Half-strip (0, inf) x (0, ell*pi) with the axial step in x.
struct HalfStripSpec {
  double ell = 1.0;
  double L = 1.0;
  double c = 5.0;
};

struct HalfStripSpectrum {
  double lambda0 = 0.0;
  std::vector<double> eigenvalues;  // lambda0 + j^2/ell^2, j = 1..count
  double sigma = 0.0;               // c + 1/ell^2
  int m = 0;                        // eigenvalues strictly below sigma
};

HalfStripSpectrum halfstrip_spectrum(const HalfStripSpec& spec, int count);

/// Width parameter ell putting (c - lambda0) ell^2 midway between m^2 - 1
/// and (m+1)^2 - 1, so exactly m eigenvalues lie below sigma.
double halfstrip_ell_for(int m, double L, double c);

/// Sorted pi^2 (m^2/a^2 + n^2/b^2), first `count` values.
std::vector<double> rectangle_eigs(double a, double b, int count);

/// (pi/(pi - 1/j))^2 + (pi/(2^(2j) - 2^(2j-1)))^2; tends to 1.
double strip_room_energy(int j);

/// name,value rows for the fixtures used in the tests.
void write_csv(std::ostream& os);

}  // namespace specpart::oracles
