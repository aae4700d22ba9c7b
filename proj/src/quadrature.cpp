#include "fbmchar/quadrature.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>
#include <tuple>

#include <Eigen/Eigenvalues>

#include "fbmchar/types.hpp"

namespace fbm::quad {

namespace {

// Recurrence coefficients of the monic Jacobi polynomials:
// p_{k+1}(x) = (x - a_k) p_k(x) - b_k^2 p_{k-1}(x).
struct Recurrence {
  std::vector<double> a;
  std::vector<double> b;  // b[k] for k >= 1; b[0] unused
  double mu0;
};

Recurrence jacobi_recurrence(std::size_t n, double alpha, double beta) {
  Recurrence r;
  r.a.resize(n);
  r.b.assign(n + 1, 0.0);
  const double ab = alpha + beta;
  for (std::size_t i = 0; i < n; ++i) {
    const double k = static_cast<double>(i);
    if (i == 0) {
      r.a[i] = (beta - alpha) / (ab + 2.0);
    } else {
      r.a[i] = (beta * beta - alpha * alpha) / ((2.0 * k + ab) * (2.0 * k + ab + 2.0));
    }
  }
  for (std::size_t i = 1; i <= n; ++i) {
    const double k = static_cast<double>(i);
    double b2;
    if (i == 1) {
      b2 = 4.0 * (1.0 + alpha) * (1.0 + beta) / ((2.0 + ab) * (2.0 + ab) * (3.0 + ab));
    } else {
      const double s = 2.0 * k + ab;
      b2 = 4.0 * k * (k + alpha) * (k + beta) * (k + ab) / (s * s * (s + 1.0) * (s - 1.0));
    }
    r.b[i] = std::sqrt(b2);
  }
  r.mu0 = std::exp((ab + 1.0) * std::log(2.0) + std::lgamma(alpha + 1.0) + std::lgamma(beta + 1.0) -
                   std::lgamma(ab + 2.0));
  return r;
}

Rule build_rule(std::size_t n, double alpha, double beta) {
  const Recurrence rec = jacobi_recurrence(n, alpha, beta);
  const auto m = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    jac(i, i) = rec.a[static_cast<std::size_t>(i)];
    if (i + 1 < m) {
      jac(i, i + 1) = rec.b[static_cast<std::size_t>(i) + 1];
      jac(i + 1, i) = rec.b[static_cast<std::size_t>(i) + 1];
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jac, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw NumericError("Gauss-Jacobi eigenvalue problem did not converge");
  }

  Rule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double x = solver.eigenvalues()(static_cast<Eigen::Index>(i));
    // Newton polish on the monic recurrence.
    for (int it = 0; it < 3; ++it) {
      double p_prev = 0.0, p = 1.0, d_prev = 0.0, d = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        const double b2 = k == 0 ? 0.0 : rec.b[k] * rec.b[k];
        const double p_next = (x - rec.a[k]) * p - b2 * p_prev;
        const double d_next = p + (x - rec.a[k]) * d - b2 * d_prev;
        p_prev = p;
        p = p_next;
        d_prev = d;
        d = d_next;
      }
      if (d == 0.0) break;
      const double dx = p / d;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Christoffel function with orthonormal polynomials.
    double q_prev = 0.0, q = 1.0 / std::sqrt(rec.mu0), sum = q * q;
    for (std::size_t k = 0; k + 1 < n; ++k) {
      const double q_next = ((x - rec.a[k]) * q - (k == 0 ? 0.0 : rec.b[k]) * q_prev) / rec.b[k + 1];
      q_prev = q;
      q = q_next;
      sum += q * q;
    }
    rule.nodes[i] = x;
    rule.weights[i] = 1.0 / sum;
  }
  return rule;
}

}  // namespace

const Rule& gauss_jacobi(std::size_t n, double alpha, double beta) {
  if (n == 0) throw InvalidArgument("quadrature rule needs at least one node");
  if (!(alpha > -1.0) || !(beta > -1.0)) {
    std::ostringstream os;
    os << "Gauss-Jacobi exponents must exceed -1, got alpha = " << alpha << ", beta = " << beta;
    throw InvalidArgument(os.str());
  }
  static std::mutex mutex;
  static std::map<std::tuple<std::size_t, double, double>, std::unique_ptr<Rule>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[{n, alpha, beta}];
  if (!slot) slot = std::make_unique<Rule>(build_rule(n, alpha, beta));
  return *slot;
}

double power_product_integral(double a, double b, double c, double p, double q, std::size_t nodes) {
  if (!(c >= 0.0 && c <= a && a <= b)) {
    std::ostringstream os;
    os << "power_product_integral needs 0 <= c <= a <= b, got a = " << a << ", b = " << b
       << ", c = " << c;
    throw InvalidArgument(os.str());
  }
  if (b == a) return 0.0;
  const double length = b - a;

  if (a == 0.0 && c == 0.0) {
    if (!(p + q > -1.0)) throw InvalidArgument("power_product_integral diverges at the origin");
    return std::pow(b, p + q + 1.0) / (p + q + 1.0);
  }

  const Rule& legendre = gauss_legendre(nodes);
  auto legendre_panel = [&](double lo, double hi) {
    const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    double acc = 0.0;
    for (std::size_t i = 0; i < legendre.size(); ++i) {
      const double s = mid + half * legendre.nodes[i];
      acc += legendre.weights[i] * std::pow(s, p) * std::pow(s - c, q);
    }
    return half * acc;
  };

  double total = 0.0;
  double lo = a;
  double width;
  if (c == a) {
    if (!(q > -1.0)) throw InvalidArgument("power_product_integral diverges at the lower endpoint");
    const double first = std::min(a, length);
    const Rule& jacobi = gauss_jacobi(nodes, 0.0, q);
    const double half = 0.5 * first;
    double acc = 0.0;
    for (std::size_t i = 0; i < jacobi.size(); ++i) {
      const double s = a + half * (1.0 + jacobi.nodes[i]);
      acc += jacobi.weights[i] * std::pow(s, p);
    }
    total += std::pow(half, q + 1.0) * acc;
    lo = a + first;
    width = first;
  } else {
    width = a - c;
  }
  while (lo < b) {
    const double hi = std::min(b, lo + width);
    total += legendre_panel(lo, hi);
    lo = hi;
    width = lo - c;
  }
  return total;
}

}  // namespace fbm::quad
