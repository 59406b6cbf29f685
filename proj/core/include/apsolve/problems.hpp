#pragma once

#include <cstddef>
#include <string>
#include <variant>

#include "apsolve/linalg.hpp"

namespace apsolve {

/// Constant-band tridiagonal matrix: `lo` below the diagonal, `up` above.
CsrMatrix gen_tridiag(double lo, double di, double up, std::size_t n);

/// Five-point Laplacian on an nx x ny interior grid (4 on the diagonal, -1
/// for each neighbour), unknowns numbered with x varying fastest.
CsrMatrix gen_poisson5(std::size_t nx, std::size_t ny);

/// H[i][j] = 1 / (i + j + 1), 0-based.
DenseMatrix gen_hilbert(std::size_t n);

enum class Func1D {
  Poly,  // t (1 - t) e^{3 + t}
  Sine,  // 2 sin(pi t) e^{3 + t}
};

/// f(t_i) at t_i = i / (n + 1), i = 1..n.
Vector exact_solution_1d(std::size_t n, Func1D f = Func1D::Poly);

/// x (1 - x) y (1 - y) e^{3 + x^2 + y^2} on the interior nodes of an
/// nx x ny grid with spacings 1/(nx+1) and 1/(ny+1), x fastest.
Vector exact_solution_2d(std::size_t nx, std::size_t ny);

struct Tridiag {
  double lo = -1.0;
  double di = 2.0;
  double up = -1.0;
  std::size_t n = 100;
};
struct Poisson5 {
  std::size_t nx = 2;
  std::size_t ny = 2;
};
struct Hilbert {
  std::size_t n = 10;
};
struct MatrixMarketFile {
  std::string path;
};

struct SolutionOnes {};
struct SolutionCustom {
  Vector values;
};
using SolutionKind = std::variant<Func1D, SolutionOnes, SolutionCustom>;

struct ProblemSpec {
  std::variant<Tridiag, Poisson5, Hilbert, MatrixMarketFile> kind;
  // Poisson problems always use the 2-D function unless Ones/Custom is chosen.
  SolutionKind solution = Func1D::Poly;
};

struct Problem {
  Matrix a;
  Vector exact;
  Vector b;  // a * exact
};

/// Builds the matrix and a manufactured right-hand side b = A x_exact.
Problem build_problem(const ProblemSpec& spec);

std::string describe(const ProblemSpec& spec);

}  // namespace apsolve
