#include <doctest.h>

#include "eigdef/error.hpp"
#include "eigdef/numerics.hpp"
#include "eigdef/rom.hpp"
#include "eigdef/systems.hpp"

using namespace eigdef;
using namespace eigdef::systems;

TEST_CASE("three-node heat rod written out by hand") {
  HeatRodParams p;
  p.n = 3;
  p.generation = 0.0;
  const auto sys = heat_rod(p);
  RealMatrix e = RealMatrix::Zero(3, 3);
  e.diagonal() << 0.25, 0.5, 0.25;
  CHECK((sys.mass() - e).norm() == 0.0);
  const double mu = 7.0;
  RealMatrix a(3, 3);
  a << -3, 2, 0, 2, -4, 2, 0, 2, -(2 + mu);
  CHECK((sys.operator_at(mu) - a).norm() < 1e-14);
  const RealVector b = sys.source_at(mu);
  CHECK(b(0) == doctest::Approx(293.0));
  CHECK(b(1) == 0.0);
  CHECK(b(2) == doctest::Approx(mu * 293.0));
}

TEST_CASE("heat-rod source with volumetric generation") {
  HeatRodParams p;
  p.n = 5;
  p.generation = 8.0;
  const RealVector b = heat_rod(p).source_at(2.0);
  const double dx = 0.25;
  CHECK(b(0) == doctest::Approx(1.0 * 293.0 + 8.0 * dx / 2));
  CHECK(b(2) == doctest::Approx(8.0 * dx));
  CHECK(b(4) == doctest::Approx(2.0 * 293.0 + 8.0 * dx / 2));
}

TEST_CASE("insulated rod conserves energy: constant mode at lambda = 0") {
  HeatRodParams p;
  p.n = 12;
  p.h_left = 0.0;
  p.generation = 0.0;
  const auto sys = heat_rod(p);
  const RealMatrix a = sys.operator_at(0.0);
  CHECK((a * RealVector::Ones(12)).norm() < 1e-12);
  CHECK_THROWS_AS(equilibrium(heat_rod([&] { auto q = p; q.generation = 1.0; return q; }()), 0.0), Error);
  try {
    auto q = p;
    q.generation = 1.0;
    equilibrium(heat_rod(q), 0.0);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kEquilibriumUndefined);
  }
}

TEST_CASE("heat-rod spectrum is negative and the slowest mode speeds up with mu") {
  HeatRodParams p;
  p.n = 50;
  const auto sys = heat_rod(p);
  CHECK(numerics::is_symmetric(sys.operator_at(3.0), 0.0));
  double previous = 0.0;
  for (double mu = 0.0; mu <= 60.0; mu += 5.0) {
    const auto pairs = numerics::generalized_eig(sys.operator_at(mu), sys.mass(), false);
    for (const auto& pr : pairs) CHECK(pr.eigenvalue.real() < 0.0);
    const double slowest = std::abs(pairs.front().eigenvalue.real());
    CHECK(slowest > previous);
    previous = slowest;
  }
}

TEST_CASE("heat-rod validation and domain") {
  HeatRodParams p;
  p.n = 2;
  CHECK_THROWS_AS(heat_rod(p), Error);
  p.n = 5;
  p.conductivity = 0.0;
  CHECK_THROWS_AS(heat_rod(p), Error);
  p.conductivity = 1.0;
  const auto sys = heat_rod(p);
  try {
    sys.operator_at(-1.0);
    FAIL("out-of-domain parameter accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kOutOfDomain);
  }
}

TEST_CASE("equilibrium residual and fixed point") {
  const auto sys = heat_rod({});
  const double mu = 25.0;
  const RealVector x = equilibrium(sys, mu);
  const RealMatrix a = sys.operator_at(mu);
  const RealVector b = sys.source_at(mu);
  CHECK((a * x + b).norm() <= 1e-10 * (a.norm() * x.norm() + b.norm()));

  const auto times = rom::uniform_times(5.0, 200);
  const auto traj = rom::simulate_full(sys, mu, x, times);
  for (Index t = 0; t < traj.states.cols(); ++t) CHECK((traj.states.col(t) - x).norm() <= 1e-8 * x.norm());

  // single insulated-free cell: A = [−h], b = [h·T]
  HeatRodParams one;
  one.n = 3;
  one.generation = 0.0;
  one.h_left = 2.0;
  const RealVector iso = equilibrium(heat_rod(one), 2.0);
  for (Index i = 0; i < 3; ++i) CHECK(iso(i) == doctest::Approx(293.0));
}

TEST_CASE("two-mass chain stiffness") {
  SpringChainParams p;
  p.n_mass = 2;
  p.k_nominal = 1.0;
  p.k_defect = 1.0;
  const auto chain = spring_chain_with_defect(p);
  RealMatrix k(2, 2);
  k << -2, 1, 1, -1;
  CHECK((chain.stiffness_at(0.3) - k).norm() == 0.0);
  CHECK((chain.stiffness_at(0.9) - k).norm() == 0.0);
}

TEST_CASE("defect moves one spring at a time") {
  SpringChainParams p;
  p.n_mass = 10;
  const auto chain = spring_chain_with_defect(p);
  const double h = 0.1;
  CHECK(defect_spring_index(p, 0.0) == 0);
  CHECK(defect_spring_index(p, 0.05) == 0);
  CHECK(defect_spring_index(p, 0.1) == 0);  // tie goes toward the anchor
  CHECK(defect_spring_index(p, 0.1000001) == 1);
  CHECK(defect_spring_index(p, 1.0) == 9);

  CHECK((chain.stiffness_at(3.5 * h - 0.01) - chain.stiffness_at(3.5 * h + 0.02)).norm() == 0.0);
  // crossing a cell boundary hands the defect from spring 3 to spring 4,
  // touching only nodes 2..4
  const RealMatrix crossed = chain.stiffness_at(4.0 * h + 0.01) - chain.stiffness_at(4.0 * h - 0.01);
  Index touched = 0;
  for (Index i = 0; i < 10; ++i)
    for (Index j = 0; j < 10; ++j) touched += crossed(i, j) != 0.0;
  CHECK(touched > 0);
  CHECK(crossed.block(0, 0, 2, 2).norm() == 0.0);
  CHECK(crossed.block(6, 6, 4, 4).norm() == 0.0);
  CHECK(numerics::is_symmetric(chain.stiffness_at(0.42), 0.0));

  p.k_defect = p.k_nominal;
  const auto uniform = spring_chain_with_defect(p);
  CHECK((uniform.stiffness_at(0.1) - uniform.stiffness_at(0.8)).norm() == 0.0);
}

TEST_CASE("first-order form: single oscillator and decoupled pair") {
  RealMatrix m = RealMatrix::Identity(1, 1);
  SecondOrderSystem one(m, [](double) { return RealMatrix::Constant(1, 1, -1.0); }, {0.0, 1.0}, {});
  const auto sys = first_order_form(one);
  RealMatrix a(2, 2);
  a << 0, 1, -1, 0;
  CHECK((sys.operator_at(0.5) - a).norm() == 0.0);
  CHECK((sys.mass() - RealMatrix::Identity(2, 2)).norm() == 0.0);
  auto pairs = numerics::generalized_eig(sys.operator_at(0.5), sys.mass(), true);
  CHECK(std::abs(pairs[0].eigenvalue - Complex(0, 1)) < 1e-12);
  CHECK(std::abs(pairs[1].eigenvalue - Complex(0, -1)) < 1e-12);

  RealMatrix k = RealMatrix::Zero(2, 2);
  k.diagonal() << -4.0, -9.0;
  SecondOrderSystem two(RealMatrix::Identity(2, 2), [k](double) { return k; }, {0.0, 1.0}, {});
  pairs = numerics::generalized_eig(first_order_form(two).operator_at(0.0), first_order_form(two).mass(), true);
  std::vector<double> imag;
  for (const auto& pr : pairs) {
    CHECK(std::abs(pr.eigenvalue.real()) < 1e-12);
    imag.push_back(pr.eigenvalue.imag());
  }
  CHECK(imag[0] == doctest::Approx(3.0));
  CHECK(imag[1] == doctest::Approx(2.0));
  CHECK(imag[2] == doctest::Approx(-2.0));
  CHECK(imag[3] == doctest::Approx(-3.0));
}

TEST_CASE("chain first-order spectrum is the square root of the displacement spectrum") {
  SpringChainParams p;
  p.n_mass = 6;
  p.mass = 2.0;
  const auto chain = spring_chain_with_defect(p);
  const auto disp = displacement_form(chain);
  const auto first = first_order_form(chain);
  const auto dp = numerics::generalized_eig(disp.operator_at(0.4), disp.mass(), false);
  const auto fp = numerics::generalized_eig(first.operator_at(0.4), first.mass(), true);
  for (const auto& pr : fp) CHECK(std::abs(pr.eigenvalue.real()) < 1e-10);
  std::vector<double> omega_sq;
  for (const auto& pr : fp)
    if (pr.eigenvalue.imag() > 0) omega_sq.push_back(pr.eigenvalue.imag() * pr.eigenvalue.imag());
  std::sort(omega_sq.begin(), omega_sq.end());
  std::vector<double> want;
  for (const auto& pr : dp) want.push_back(-pr.eigenvalue.real());
  std::sort(want.begin(), want.end());
  REQUIRE(omega_sq.size() == want.size());
  for (std::size_t i = 0; i < want.size(); ++i) CHECK(omega_sq[i] == doctest::Approx(want[i]).epsilon(1e-9));
}

TEST_CASE("traveling bump") {
  const RealVector mid = traveling_bump(101, 0.05, 0.5);
  CHECK(mid.norm() == doctest::Approx(1.0));
  for (Index i = 0; i < 101; ++i) CHECK(mid(i) == mid(100 - i));
  const RealVector even = traveling_bump(100, 0.05, 0.5);
  for (Index i = 0; i < 100; ++i) CHECK(even(i) == even(99 - i));
  CHECK(std::abs(traveling_bump(200, 0.02, 0.2).dot(traveling_bump(200, 0.02, 0.8))) < 1e-6);
  CHECK((traveling_bump(64, 0.1, 0.3) - traveling_bump(64, 0.1, 0.3)).norm() == 0.0);
  CHECK_THROWS_AS(traveling_bump(64, 0.1, 1.3), Error);
}

TEST_CASE("systems rebuild from their generator record") {
  HeatRodParams p;
  p.n = 9;
  p.conductivity = 2.5;
  const auto a = heat_rod(p);
  const auto b = make_system(a.metadata().generator);
  CHECK((a.operator_at(4.0) - b.operator_at(4.0)).norm() == 0.0);
  CHECK((a.source_at(4.0) - b.source_at(4.0)).norm() == 0.0);

  SpringChainParams s;
  s.n_mass = 7;
  const auto c = first_order_form(spring_chain_with_defect(s));
  const auto d = make_system(c.metadata().generator);
  CHECK((c.operator_at(0.3) - d.operator_at(0.3)).norm() == 0.0);
  CHECK(d.n() == 14);
  CHECK_THROWS_AS(make_system({{"kind", "airfoil"}}), Error);
}
