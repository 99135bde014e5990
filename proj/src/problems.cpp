#include "tgfem/problems.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace tgfem::problems {

namespace {

// p(x) = x^2 - 2x^3 + x^4,  q(y) = y - 3y^2 + 2y^3,  r(z) = z^3 - z
double p0(double x) { return x * x * (1.0 - x) * (1.0 - x); }
double p1(double x) { return 2.0 * x - 6.0 * x * x + 4.0 * x * x * x; }
double p2(double x) { return 2.0 - 12.0 * x + 12.0 * x * x; }
double q0(double y) { return y * (1.0 - y) * (1.0 - 2.0 * y); }
double q1(double y) { return 1.0 - 6.0 * y + 6.0 * y * y; }
double q2(double y) { return -6.0 + 12.0 * y; }
double r0(double z) { return z * z * z - z; }
double r1(double z) { return 3.0 * z * z - 1.0; }
double r2(double z) { return 6.0 * z; }

Problem example1(int dim) {
  Problem pb;
  pb.id = "example1";
  pb.dim = dim;
  if (dim == 2) {
    pb.exact_u = [](const Point& x) { return 100.0 * p0(x[0]) * q0(x[1]); };
    pb.exact_grad_u = [](const Point& x) {
      return Gradient{100.0 * p1(x[0]) * q0(x[1]), 100.0 * p0(x[0]) * q1(x[1]), 0.0};
    };
    pb.f = [](const Point& x) {
      return -100.0 * (p2(x[0]) * q0(x[1]) + p0(x[0]) * q2(x[1]));
    };
  } else {
    pb.exact_u = [](const Point& x) { return 100.0 * p0(x[0]) * q0(x[1]) * r0(x[2]); };
    pb.exact_grad_u = [](const Point& x) {
      return Gradient{100.0 * p1(x[0]) * q0(x[1]) * r0(x[2]), 100.0 * p0(x[0]) * q1(x[1]) * r0(x[2]),
                      100.0 * p0(x[0]) * q0(x[1]) * r1(x[2])};
    };
    pb.f = [](const Point& x) {
      return -100.0 * (p2(x[0]) * q0(x[1]) * r0(x[2]) + p0(x[0]) * q2(x[1]) * r0(x[2]) +
                       p0(x[0]) * q0(x[1]) * r2(x[2]));
    };
  }
  return pb;
}

Problem example2(int dim) {
  using std::numbers::pi;
  Problem pb;
  pb.id = "example2";
  pb.dim = dim;
  if (dim == 2) {
    pb.f = [](const Point& x) { return 70.0 * std::log((x[0] + 0.1) * (std::sin(pi * x[1]) + 1.0)); };
  } else {
    pb.f = [](const Point& x) {
      return 70.0 * std::log((x[0] + 0.1) * (std::sin(pi * x[1]) + 1.0) * (x[2] + 0.1) *
                             (std::sin(pi * x[2]) + 1.0));
    };
  }
  return pb;
}

}  // namespace

Problem get(std::string_view id, int dim) {
  if (dim != 2 && dim != 3) throw std::invalid_argument("problems::get: dim must be 2 or 3");
  if (id == "example1") return example1(dim);
  if (id == "example2") return example2(dim);
  throw std::invalid_argument("problems::get: unknown problem id '" + std::string(id) + "'");
}

Problem zero(int dim) {
  Problem pb;
  pb.id = "zero";
  pb.dim = dim;
  pb.f = [](const Point&) { return 0.0; };
  pb.exact_u = [](const Point&) { return 0.0; };
  pb.exact_grad_u = [](const Point&) { return Gradient{0.0, 0.0, 0.0}; };
  return pb;
}

}  // namespace tgfem::problems
