#include "tgfem/quadrature.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>

namespace tgfem {

namespace {

double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

void add_orbit3(QuadratureRule& rule, double a, double w) {
  // (a, a, 1-2a) and its permutations
  const double b = 1.0 - 2.0 * a;
  rule.points.push_back({b, a, a, 0.0});
  rule.points.push_back({a, b, a, 0.0});
  rule.points.push_back({a, a, b, 0.0});
  for (int k = 0; k < 3; ++k) rule.weights.push_back(w);
}

std::vector<QuadratureRule> make_rules_2d() {
  std::vector<QuadratureRule> rules;

  QuadratureRule centroid{2, 1, {{1.0 / 3, 1.0 / 3, 1.0 / 3, 0.0}}, {0.5}};
  rules.push_back(centroid);

  QuadratureRule deg2{2, 2, {}, {}};
  add_orbit3(deg2, 1.0 / 6.0, 1.0 / 6.0);
  rules.push_back(deg2);

  // Strang-Fix / Dunavant, 6 points.
  QuadratureRule deg4{2, 4, {}, {}};
  add_orbit3(deg4, 0.44594849091596489, 0.5 * 0.22338158967801147);
  add_orbit3(deg4, 0.09157621350977073, 0.5 * 0.10995174365532187);
  rules.push_back(deg4);

  // Radon, 7 points.
  const double r15 = std::sqrt(15.0);
  QuadratureRule deg5{2, 5, {{1.0 / 3, 1.0 / 3, 1.0 / 3, 0.0}}, {0.5 * 9.0 / 40.0}};
  add_orbit3(deg5, (6.0 - r15) / 21.0, 0.5 * (155.0 - r15) / 1200.0);
  add_orbit3(deg5, (6.0 + r15) / 21.0, 0.5 * (155.0 + r15) / 1200.0);
  rules.push_back(deg5);
  return rules;
}

std::vector<QuadratureRule> make_rules_3d() {
  std::vector<QuadratureRule> rules;
  rules.push_back({3, 1, {{0.25, 0.25, 0.25, 0.25}}, {1.0 / 6.0}});

  QuadratureRule deg2{3, 2, {}, {}};
  const double a = (5.0 + 3.0 * std::sqrt(5.0)) / 20.0;
  const double b = (5.0 - std::sqrt(5.0)) / 20.0;
  for (int k = 0; k < 4; ++k) {
    std::array<double, 4> p{b, b, b, b};
    p[k] = a;
    deg2.points.push_back(p);
    deg2.weights.push_back(1.0 / 24.0);
  }
  rules.push_back(deg2);
  rules.push_back(grundmann_moeller(3, 1));
  rules.push_back(grundmann_moeller(3, 2));
  return rules;
}

}  // namespace

QuadratureRule grundmann_moeller(int dim, int s) {
  if (dim != 2 && dim != 3) throw std::invalid_argument("grundmann_moeller: dim must be 2 or 3");
  if (s < 0) throw std::invalid_argument("grundmann_moeller: s must be >= 0");
  QuadratureRule rule;
  rule.dim = dim;
  const int d = 2 * s + 1;
  rule.degree = d;
  for (int i = 0; i <= s; ++i) {
    const int denom = d + dim - 2 * i;
    const double w = (i % 2 == 0 ? 1.0 : -1.0) * std::pow(static_cast<double>(denom), d) /
                     (std::pow(2.0, 2 * s) * factorial(i) * factorial(d + dim - i));
    // every beta in N^{dim+1} with |beta| = s - i
    std::array<int, 4> beta{0, 0, 0, 0};
    std::function<void(int, int)> visit = [&](int slot, int remaining) {
      if (slot == dim) {
        beta[dim] = remaining;
        std::array<double, 4> p{0.0, 0.0, 0.0, 0.0};
        for (int k = 0; k <= dim; ++k) p[k] = static_cast<double>(2 * beta[k] + 1) / denom;
        rule.points.push_back(p);
        rule.weights.push_back(w);
        return;
      }
      for (int b = 0; b <= remaining; ++b) {
        beta[slot] = b;
        visit(slot + 1, remaining - b);
      }
    };
    visit(0, s - i);
  }
  return rule;
}

const std::vector<QuadratureRule>& QuadratureRule::all(int dim) {
  static const std::vector<QuadratureRule> rules2 = make_rules_2d();
  static const std::vector<QuadratureRule> rules3 = make_rules_3d();
  if (dim == 2) return rules2;
  if (dim == 3) return rules3;
  throw std::invalid_argument("QuadratureRule: dim must be 2 or 3");
}

const QuadratureRule& QuadratureRule::get(int dim, int min_degree) {
  for (const QuadratureRule& r : all(dim))
    if (r.degree >= min_degree) return r;
  throw std::invalid_argument("QuadratureRule: no shipped rule of degree " + std::to_string(min_degree));
}

}  // namespace tgfem
