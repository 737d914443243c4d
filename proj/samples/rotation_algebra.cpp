// Products in the rotation algebra at theta = 1/3, checked against clock and shift matrices.

#include <iostream>

#include <nctorus/nctorus.hpp>

int main() {
  using namespace nct;
  const SkewMatrix theta(2, std::vector<Rational>{Rational(1, 3)});
  const auto u = ExactPolynomial::generator(theta, 0), v = ExactPolynomial::generator(theta, 1);

  const auto uv = poly_mul(u, v), vu = poly_mul(v, u);
  for (const auto& [m, c] : uv.terms()) std::cout << "uv: u^(" << m[0] << "," << m[1] << ") coeff " << c.to_complex() << "\n";
  for (const auto& [m, c] : vu.terms()) std::cout << "vu: u^(" << m[0] << "," << m[1] << ") coeff " << c.to_complex() << "\n";
  std::cout << "tau(uv u* v*) = " << trace(poly_mul(uv, poly_mul(poly_adjoint(u), poly_adjoint(v)))).to_complex() << "\n";

  const UnitaryTuple cs = clock_shift(1, 3);
  const auto rep = verify_relations(cs);
  std::cout << "clock/shift 3x3: commutation residual " << rep.commutation_residual << ", sigma_12 " << cs.sigma()(0, 1)
            << "\n";

  PairTable pairs;
  pairs.emplace(std::make_pair(0, 1), clock_shift(1, 3));
  pairs.emplace(std::make_pair(0, 2), clock_shift(1, 2));
  pairs.emplace(std::make_pair(1, 2), clock_shift(2, 5));
  const UnitaryTuple t = tensor_construct(3, pairs);
  std::cout << "three generators on C^" << t.size() << ", residual " << verify_relations(t).commutation_residual << "\n";
}
