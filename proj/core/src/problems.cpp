#include "apsolve/problems.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "apsolve/matrix_market.hpp"

namespace apsolve {

CsrMatrix gen_tridiag(double lo, double di, double up, std::size_t n) {
  if (n < 2) throw InvalidArgument("tridiagonal size must be at least 2");
  std::vector<Triplet> t;
  t.reserve(3 * n);
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0) t.push_back({i, i - 1, lo});
    t.push_back({i, i, di});
    if (i + 1 < n) t.push_back({i, i + 1, up});
  }
  return CsrMatrix::from_triplets(n, n, std::move(t));
}

CsrMatrix gen_poisson5(std::size_t nx, std::size_t ny) {
  if (nx < 2 || ny < 2) throw InvalidArgument("Poisson grid needs nx, ny >= 2");
  const std::size_t n = nx * ny;
  std::vector<Triplet> t;
  t.reserve(5 * n);
  for (std::size_t j = 0; j < ny; ++j) {
    for (std::size_t i = 0; i < nx; ++i) {
      const std::size_t k = j * nx + i;
      if (j > 0) t.push_back({k, k - nx, -1.0});
      if (i > 0) t.push_back({k, k - 1, -1.0});
      t.push_back({k, k, 4.0});
      if (i + 1 < nx) t.push_back({k, k + 1, -1.0});
      if (j + 1 < ny) t.push_back({k, k + nx, -1.0});
    }
  }
  return CsrMatrix::from_triplets(n, n, std::move(t));
}

DenseMatrix gen_hilbert(std::size_t n) {
  if (n < 1) throw InvalidArgument("Hilbert size must be at least 1");
  DenseMatrix h(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) h(i, j) = 1.0 / static_cast<double>(i + j + 1);
  return h;
}

Vector exact_solution_1d(std::size_t n, Func1D f) {
  Vector x(n);
  const double h = 1.0 / static_cast<double>(n + 1);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i + 1) * h;
    x[i] = f == Func1D::Poly ? t * (1.0 - t) * std::exp(3.0 + t)
                             : 2.0 * std::sin(std::numbers::pi * t) * std::exp(3.0 + t);
  }
  return x;
}

Vector exact_solution_2d(std::size_t nx, std::size_t ny) {
  Vector u(nx * ny);
  const double hx = 1.0 / static_cast<double>(nx + 1);
  const double hy = 1.0 / static_cast<double>(ny + 1);
  for (std::size_t j = 0; j < ny; ++j) {
    const double y = static_cast<double>(j + 1) * hy;
    for (std::size_t i = 0; i < nx; ++i) {
      const double x = static_cast<double>(i + 1) * hx;
      u[j * nx + i] = x * (1.0 - x) * y * (1.0 - y) * std::exp(3.0 + x * x + y * y);
    }
  }
  return u;
}

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

Problem build_problem(const ProblemSpec& spec) {
  Matrix a = std::visit(overloaded{
                            [](const Tridiag& t) -> Matrix { return gen_tridiag(t.lo, t.di, t.up, t.n); },
                            [](const Poisson5& p) -> Matrix { return gen_poisson5(p.nx, p.ny); },
                            [](const Hilbert& h) -> Matrix { return gen_hilbert(h.n); },
                            [](const MatrixMarketFile& f) -> Matrix { return read_matrix_market(f.path); },
                        },
                        spec.kind);
  const std::size_t n = a.cols();
  const auto* grid = std::get_if<Poisson5>(&spec.kind);
  Vector exact = std::visit(overloaded{
                                [&](Func1D f) {
                                  return grid ? exact_solution_2d(grid->nx, grid->ny) : exact_solution_1d(n, f);
                                },
                                [&](const SolutionOnes&) { return Vector(n, 1.0); },
                                [&](const SolutionCustom& c) {
                                  if (c.values.size() != n) throw DimensionError("custom solution length mismatch");
                                  return c.values;
                                },
                            },
                            spec.solution);
  Vector b = spmv(a, exact);
  return {std::move(a), std::move(exact), std::move(b)};
}

std::string describe(const ProblemSpec& spec) {
  std::ostringstream os;
  std::visit(overloaded{
                 [&](const Tridiag& t) { os << "tridiag(" << t.lo << "," << t.di << "," << t.up << ") n=" << t.n; },
                 [&](const Poisson5& p) { os << "poisson5 " << p.nx << "x" << p.ny; },
                 [&](const Hilbert& h) { os << "hilbert n=" << h.n; },
                 [&](const MatrixMarketFile& f) { os << "mm " << f.path; },
             },
             spec.kind);
  return os.str();
}

}  // namespace apsolve
