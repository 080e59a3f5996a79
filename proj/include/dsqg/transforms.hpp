#pragma once

#include <span>
#include <vector>

namespace dsqg {

/// Per-axis trigonometric family of a separable expansion on (0, L).
///
/// Sine axes carry modes 1..K and are sampled at the interior nodes 1..M-1 of an
/// M-cell grid; cosine axes carry modes 0..K and are sampled at nodes 0..M.
enum class Parity { kSine, kCosine };

/// Number of coefficients per axis for K modes of the given parity.
inline int coefficient_count(Parity p, int k) { return p == Parity::kSine ? k : k + 1; }
/// Number of samples per axis on an M-cell grid.
inline int sample_count(Parity p, int m) { return p == Parity::kSine ? m - 1 : m + 1; }

/// Evaluates sum c_{mn} X_m(pi i/M) Y_n(pi j/M), X,Y in {sin, cos}, on an M-cell grid.
///
/// `coeffs` is row-major with coefficient_count(px,k) rows and coefficient_count(py,k)
/// columns. Requires k <= M-1 for sine axes and k <= M for cosine axes. Output is row-major
/// sample_count(px,M) x sample_count(py,M).
std::vector<double> synthesize(std::span<const double> coeffs, int k, Parity px, Parity py, int m);

/// Exact inverse of synthesize() with k = M-1 (sine) or M (cosine), truncated to k modes.
std::vector<double> analyze(std::span<const double> values, Parity px, Parity py, int m, int k);

}  // namespace dsqg
