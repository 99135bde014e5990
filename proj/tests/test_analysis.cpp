#include <doctest.h>

#include "helpers.hpp"
#include "tgfem/analysis.hpp"

using namespace tgfem;

namespace {

// Symbolic norms of the example-1 solution (tests/oracles/compute_oracles.py).
constexpr double kGrad2d = 2.0203050891044215;   // sqrt(200/49)
constexpr double kL2_2d = 0.27492869961410751;   // sqrt(100/1323)
constexpr double kGrad3d = 0.60946711754493754;  // sqrt(3440/9261)
constexpr double kL2_3d = 0.075887530751390072;  // sqrt(160/27783)

}  // namespace

TEST_CASE("order formulas") {
  CHECK(order1(0.3, 0.3, 0.125, NormKind::H1) == 1.0);
  CHECK(order1(0.3, 0.3, 0.125, NormKind::L2) == 2.0);
  CHECK(order1(1.7574e-1, 5.5291e-3, 1.0 / 32, NormKind::H1) == doctest::Approx(1.9981).epsilon(1e-4));
  CHECK(order1(3.3784e-3, 1.1498e-4, 1.0 / 25, NormKind::L2) == doctest::Approx(3.05).epsilon(2e-3));
  CHECK(order1(0.68371, 8.8087e-2, 1.0 / 8, NormKind::H1) == doctest::Approx(1.9855).epsilon(1e-4));
  CHECK(order1(0.34949, 2.2041e-2, 1.0 / 16, NormKind::H1) == doctest::Approx(1.9968).epsilon(1e-4));
}

TEST_CASE("order2 caps") {
  // 1 + ln(19.43)/ln 8 = 2.427 before the cap
  CHECK(order1(1.8407, 9.4723e-2, 1.0 / 8, NormKind::H1) == doctest::Approx(2.427).epsilon(1e-3));
  CHECK(order2(1.8407, 9.4723e-2, 1.0 / 8, NormKind::H1) == 2.0);
  CHECK(order2(1.0, 1e-6, 1.0 / 8, NormKind::L2) == 3.0);
  CHECK(order2(0.5, 0.5, 1.0 / 8, NormKind::H1) == 1.0);
  CHECK(order2(0.5, 0.4, 1.0 / 8, NormKind::L2) < 3.0);
}

TEST_CASE("order inputs are validated") {
  CHECK_THROWS_AS(order1(0.0, 0.1, 0.5, NormKind::H1), std::domain_error);
  CHECK_THROWS_AS(order1(0.1, -1.0, 0.5, NormKind::H1), std::domain_error);
  CHECK_THROWS_AS(order1(0.1, 0.1, 1.0, NormKind::H1), std::domain_error);
  CHECK_THROWS_AS(order2(0.1, 0.0, 0.5, NormKind::L2), std::domain_error);
}

TEST_CASE("orders are scale invariant") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(1e-4, 1.0), s(1e-3, 1e3);
  for (int trial = 0; trial < 50; ++trial) {
    const double a = u(rng), b = u(rng), c = s(rng);
    for (NormKind k : {NormKind::H1, NormKind::L2}) {
      CHECK(std::abs(order1(a, b, 0.1, k) - order1(c * a, c * b, 0.1, k)) < 1e-12);
      CHECK(std::abs(order2(a, b, 0.1, k) - order2(c * a, c * b, 0.1, k)) < 1e-12);
    }
  }
}

TEST_CASE("norms of the exact solution against the symbolic oracle") {
  const struct {
    int dim, n;
    double grad, l2, tol;
  } cases[] = {{2, 32, kGrad2d, kL2_2d, 1e-9}, {3, 6, kGrad3d, kL2_3d, 1e-5}};
  for (const auto& c : cases) {
    const Problem p = problems::get("example1", c.dim);
    const Mesh m = Mesh::structured(c.dim, c.n);
    const FeSpace s(m);
    const FeFunction zero(s);
    const QuadratureRule& q = QuadratureRule::get(c.dim, 5);
    CHECK(h1_seminorm_error(zero, *p.exact_grad_u, q) == doctest::Approx(c.grad).epsilon(c.tol));
    CHECK(l2_error(zero, *p.exact_u, q) == doctest::Approx(c.l2).epsilon(c.tol));
  }
}

TEST_CASE("quadrature error of the norms decays at sixth order") {
  const Problem p = problems::get("example1", 2);
  const QuadratureRule& q = QuadratureRule::get(2, 5);
  double prev = 0.0;
  for (int n : {8, 16, 32}) {
    const Mesh m = Mesh::structured(2, n);
    const FeSpace s(m);
    const double e = std::abs(l2_error(FeFunction(s), *p.exact_u, q) - kL2_2d);
    if (prev > 0.0) CHECK(prev / e > 40.0);
    prev = e;
  }
}

TEST_CASE("errors vanish when the exact solution is the FE function itself") {
  const Mesh m = Mesh::structured(2, 3);
  const FeSpace s(m);
  std::mt19937_64 rng(4);
  const FeFunction f(s, testing::random_vector(rng, s.num_free()));
  const auto value = [&](const Point& x) {
    const auto [c, lam] = testing::locate(m, x);
    return evaluate(f, c, lam);
  };
  const auto grad = [&](const Point& x) { return gradient_on_cell(f, testing::locate(m, x).first); };
  const QuadratureRule& q = QuadratureRule::get(2, 5);
  CHECK(l2_error(f, value, q) < 1e-12);
  CHECK(h1_seminorm_error(f, grad, q) < 1e-12);
}

TEST_CASE("error functions check their inputs") {
  const Mesh m = Mesh::structured(2, 3);
  const FeSpace s(m);
  const FeFunction f(s);
  CHECK_THROWS_AS(l2_error(f, [](const Point&) { return 0.0; }, QuadratureRule::get(2, 2)),
                  std::invalid_argument);
  CHECK_THROWS_AS(l2_error(f, [](const Point&) { return INFINITY; }, QuadratureRule::get(2, 5)),
                  std::domain_error);
  CHECK_THROWS_AS(h1_seminorm_error(f, [](const Point&) { return Gradient{NAN, 0, 0}; }, QuadratureRule::get(2, 5)),
                  std::domain_error);
  const Mesh other = Mesh::structured(2, 4);
  const FeSpace os(other);
  CHECK_THROWS_AS(h1_seminorm_distance(f, FeFunction(os)), std::invalid_argument);
}

TEST_CASE("triangle inequality on random pairs") {
  const Problem p = problems::get("example1", 2);
  const Mesh m = Mesh::structured(2, 6);
  const FeSpace s(m);
  const QuadratureRule& q = QuadratureRule::get(2, 5);
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 10; ++trial) {
    const FeFunction a(s, testing::random_vector(rng, s.num_free()));
    const FeFunction b(s, testing::random_vector(rng, s.num_free()));
    CHECK(h1_seminorm_error(a, *p.exact_grad_u, q) <=
          h1_seminorm_error(b, *p.exact_grad_u, q) + h1_seminorm_distance(a, b) + 1e-12);
    CHECK(l2_error(a, *p.exact_u, q) <= l2_error(b, *p.exact_u, q) + l2_distance(a, b) + 1e-12);
  }
}

TEST_CASE("fine reference solution") {
  const Problem zero = problems::zero(2);
  const Mesh m = Mesh::structured(2, 8);
  const FeSpace s(m);
  const FeFunction uz = solve_fine_reference(zero, s);
  for (double v : uz.coefficients()) CHECK(v == 0.0);

  const Problem p = problems::get("example1", 2);
  const QuadratureRule& q = QuadratureRule::get(2, 5);
  const Mesh m64 = Mesh::structured(2, 64);
  const FeSpace s64(m64);
  const double e64 = h1_seminorm_error(solve_fine_reference(p, s64), *p.exact_grad_u, q);
  CHECK(e64 == doctest::Approx(8.7995e-2).epsilon(0.2));
  const Mesh m32 = Mesh::structured(2, 32);
  const FeSpace s32(m32);
  const double e32 = h1_seminorm_error(solve_fine_reference(p, s32), *p.exact_grad_u, q);
  CHECK(e32 / e64 > 1.9);
  CHECK(e32 / e64 < 2.1);
}

TEST_CASE("coarse L2 error at H = 1/25") {
  const Problem p = problems::get("example1", 2);
  const Mesh m = Mesh::structured(2, 25);
  const FeSpace s(m);
  const double e = l2_error(solve_fine_reference(p, s), *p.exact_u, QuadratureRule::get(2, 5));
  CHECK(e == doctest::Approx(3.3784e-3).epsilon(0.2));
}
