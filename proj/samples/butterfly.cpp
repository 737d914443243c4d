// Band edges of the almost Mathieu operator for small denominators, and the spectral distance to flux 0.

#include <iomanip>
#include <iostream>
#include <numeric>

#include <nctorus/nctorus.hpp>

int main() {
  using namespace nct;
  const BandSpectrum flat = amo_spectrum(0, 1, 16);
  std::cout << std::fixed << std::setprecision(6);
  for (long long q = 1; q <= 6; ++q)
    for (long long p = 1; p < q; ++p) {
      if (std::gcd(p, q) != 1) continue;
      const BandSpectrum s = amo_spectrum(p, q, 32);
      std::cout << p << "/" << q << "  bands " << s.bands.size() << "  measure " << s.measure() << "  D to flux 0 "
                << hausdorff_distance(flat, s) << "\n";
    }

  const auto audit = audit_interpolation_constants(8100, 2500);
  std::cout << "k = 8100: step " << audit.step_exact->str() << ", slack " << audit.slack << "\n";
}
