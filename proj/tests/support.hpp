#pragma once

#include <cmath>
#include <memory>
#include <random>

#include "regge/fespace.hpp"
#include "regge/regge.hpp"
#include "regge/verify.hpp"

namespace regge::testing {

inline constexpr double kPi = 3.14159265358979323846;

inline std::shared_ptr<const Mesh> square(int n) {
  return std::make_shared<const Mesh>(Mesh::build_structured({}, n));
}

inline ReggeField random_regge(std::shared_ptr<const FeSpace> s, unsigned seed, double scale = 1.0) {
  return ReggeField(s, random_vector(s->ndofs(), seed, scale));
}

inline SymJet2 conformal(const Jet2& x, const Jet2& y, double a = 0.2) {
  const Jet2 c = exp(2.0 * a * sin(kPi * x) * sin(kPi * y));
  return SymJet2{c, Jet2(0.0), c};
}

inline double rel_diff(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
}

}  // namespace regge::testing
