#pragma once

#include <cstddef>
#include <vector>

namespace fbm::quad {

/// Nodes and weights on [-1, 1].
struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const noexcept { return nodes.size(); }
};

/// Gauss rule for the weight (1-x)^alpha (1+x)^beta, alpha, beta > -1.
/// Golub-Welsch followed by Newton polishing of the nodes; weights from the
/// Christoffel function. Rules are cached and the returned reference stays valid.
const Rule& gauss_jacobi(std::size_t n, double alpha, double beta);

inline const Rule& gauss_legendre(std::size_t n) { return gauss_jacobi(n, 0.0, 0.0); }

inline constexpr std::size_t kDefaultNodes = 64;

/// Integral of s^p (s - c)^q over [a, b] for 0 <= c <= a <= b, q > -1 when
/// c == a, p + q > -1 when a == c == 0.
///
/// The range is cut into panels that grow geometrically away from c, so each
/// panel sits at least one panel length from both c and the origin. The panel
/// touching c (when c == a) uses a Gauss-Jacobi rule carrying (s - c)^q
/// exactly; all others use Gauss-Legendre with `nodes` points.
double power_product_integral(double a, double b, double c, double p, double q,
                              std::size_t nodes = kDefaultNodes);

}  // namespace fbm::quad
