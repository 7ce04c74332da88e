#include "nsch/potential.hpp"

#include <doctest.h>

#include <cmath>

using namespace nsch;

// Closed-form oracle values below were evaluated from the defining
// formulas at high precision and frozen.

TEST_CASE("parameter constraints") {
  CHECK_THROWS_AS(PotentialParams(2.0, 1.0, 2.0), Error);   // theta >= theta0
  CHECK_THROWS_AS(PotentialParams(-1.0, 1.0, 2.0), Error);  // theta <= 0
  CHECK_THROWS_AS(PotentialParams(1.0, 2.0, 1.2), Error);   // gamma <= 3/2
  CHECK_NOTHROW(PotentialParams(1.0, 2.0, 1.6));
}

TEST_CASE("entropy of mixing closed form") {
  CHECK(flory_huggins(0.0, 1.0) == 0.0);
  // (1/2)[1.5 ln 1.5 + 0.5 ln 0.5]
  CHECK(flory_huggins(0.5, 1.0) == doctest::Approx(0.13081203594113694).epsilon(1e-12));
  // symmetry of the formula
  for (const double c : {0.1, 0.33, 0.77, 0.999})
    CHECK(flory_huggins(c, 1.3) == flory_huggins(-c, 1.3));
  // continuous extension at the closed endpoints
  CHECK(flory_huggins(1.0, 2.0) == doctest::Approx(2.0 * std::log(2.0)));
  CHECK_THROWS_AS(flory_huggins(1.0 + 1e-12, 1.0), Error);
}

TEST_CASE("entropy derivatives") {
  CHECK(flory_huggins_prime(0.0, 1.0) == 0.0);
  CHECK(flory_huggins_second(0.0, 1.7) == doctest::Approx(1.7));
  // F'(0.9) with theta = 2 equals ln 19
  CHECK(flory_huggins_prime(0.9, 2.0) == doctest::Approx(std::log(19.0)).epsilon(1e-14));
  CHECK_THROWS_AS(flory_huggins_prime(1.0, 1.0), Error);
  CHECK_THROWS_AS(flory_huggins_second(-1.0, 1.0), Error);
}

TEST_CASE("regularized potential: interior agreement and Taylor branches") {
  const PotentialParams params(2.0, 4.0, 2.0);
  const RegularizedPotential reg(params, 0.1);
  // interior region by construction
  CHECK(reg.value(0.3) == flory_huggins(0.3, 2.0));
  CHECK(reg.prime(-0.85) == -flory_huggins_prime(0.85, 2.0));
  // frozen oracle: F(0.9) + 0.1 F'(0.9) + 0.005 F''(0.9), theta = 2
  CHECK(reg.seam_value() == doctest::Approx(0.9892638744281454).epsilon(1e-12));
  CHECK(reg.value(1.0) == doctest::Approx(1.3363393512921578).epsilon(1e-12));
  // second derivative constant on the outer branch
  CHECK(reg.second(1.5) == reg.seam_second());
  CHECK(reg.second(7.0) == reg.seam_second());
  CHECK_THROWS_AS(RegularizedPotential(params, 0.6), Error);
}

TEST_CASE("g_prime is the mixing curvature") {
  const PotentialParams params(1.0, 2.0, 2.0);
  const RegularizedPotential reg(params, 0.1);
  CHECK(reg.g_prime(0.0) == doctest::Approx(-1.0));  // theta - theta0
  const Scalar outer = reg.seam_second() - 2.0;
  CHECK(reg.g_prime(1.2) == doctest::Approx(outer));
  CHECK(reg.g_prime(-3.0) == doctest::Approx(outer));
}

TEST_CASE("elastic energy closed form") {
  CHECK(elastic_energy(0.0, 2.0) == 0.0);
  CHECK(elastic_energy(1.0, 2.0) == doctest::Approx(1.0));
  CHECK(elastic_energy(2.0, 5.0 / 3.0) == doctest::Approx(4.762203155904599).epsilon(1e-10));
  CHECK_THROWS_AS(elastic_energy(-0.1, 2.0), Error);
}

TEST_CASE("elastic energy matches the quadrature of its integral definition") {
  // f_e(rho) = int_1^rho z^{gamma-2} dz, so rho f_e(rho) + rho/(gamma-1)
  // must equal rho^gamma/(gamma-1); composite Simpson as the oracle
  auto simpson = [](double a, double b, double gamma) {
    const int n = 2000;
    const double h = (b - a) / n;
    double acc = std::pow(a, gamma - 2.0) + std::pow(b, gamma - 2.0);
    for (int i = 1; i < n; ++i)
      acc += std::pow(a + i * h, gamma - 2.0) * ((i % 2) ? 4.0 : 2.0);
    return acc * h / 3.0;
  };
  for (const double gamma : {1.6, 2.0, 5.0 / 3.0}) {
    for (int i = 1; i <= 20; ++i) {
      const double rho = 0.2 + 0.2 * i;
      const double fe = simpson(1.0, rho, gamma);
      const double lhs = rho * fe + rho / (gamma - 1.0);
      CHECK(lhs == doctest::Approx(elastic_energy(rho, gamma)).epsilon(1e-9));
    }
  }
}

TEST_CASE("seam smoothness, envelope, convexity: property sweep") {
  for (const auto& [theta, theta0, eps] :
       {std::tuple{1.0, 2.0, 1e-1}, std::tuple{1.0, 2.0, 1e-3}, std::tuple{0.5, 1.0, 1e-2}}) {
    const auto rows = verify_potential(theta, theta0, eps);
    for (const auto& r : rows) {
      INFO(r.name, " measured ", r.measured, " threshold ", r.threshold, " (theta ", theta,
           " theta0 ", theta0, " eps ", eps, ")");
      CHECK(r.pass);
    }
  }
}

TEST_CASE("seam one-sided limits agree to 1e-10") {
  const PotentialParams params(1.0, 2.0, 2.0);
  for (const double eps : {1e-1, 1e-2, 1e-3}) {
    const RegularizedPotential reg(params, eps);
    const double s = reg.seam();
    double best = 1.0;
    for (double d = 1e-8; d >= 0.9e-13; d *= 0.1) {
      const double inner = reg.second(s - d);
      const double outer = reg.second(s + d);
      best = std::min(best, std::abs(inner - outer) / std::abs(outer));
    }
    CHECK(best <= 1e-10);
  }
}

TEST_CASE("finite-difference consistency of reg_prime away from seams") {
  const PotentialParams params(1.0, 2.0, 2.0);
  const RegularizedPotential reg(params, 0.05);
  const double h = 1e-6;
  for (double c = -1.4; c <= 1.4; c += 0.013) {
    if (std::abs(std::abs(c) - reg.seam()) < 2.0 * h) continue;
    const double fd = (reg.value(c + h) - reg.value(c - h)) / (2.0 * h);
    CHECK(fd == doctest::Approx(reg.prime(c)).epsilon(1e-7));
  }
}
