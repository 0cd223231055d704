// Applies a realized boost to a plane-wave solution of the space-discrete
// equation, prints the residual of the image and writes the image as CSV.

#include <fstream>
#include <iostream>

#include <fmt/format.h>

#include "jordan/lattice.hpp"

#ifndef JORDAN_CATALOG_DIR
#define JORDAN_CATALOG_DIR "data/catalog"
#endif

int main(int argc, char** argv) {
  auto cat = jordan::Catalog::load_directory(JORDAN_CATALOG_DIR);
  jordan::RealizedAlgebra ra(cat, cat.get<jordan::Realization>("real_hf"));
  jordan::DiffOp equation = ra.realize(cat.get<jordan::Casimir>("cas_hg").element);
  jordan::DiffOp boost = ra.op("cK");

  jordan::GridSpec grid;
  auto family = jordan::SolutionFamily::space_geometric(1, jordan::Rational(1, 2), grid.sigma);
  auto r = jordan::symmetry_residual(equation, boost, family, grid, jordan::Backend::Exact);
  std::cout << fmt::format("E = {}\nK = {}\n", equation.to_string(), boost.to_string());
  std::cout << fmt::format("max |E K f| = {:.3e}, exact {}\n", r.max_abs,
                           r.exact_max ? jordan::to_string(*r.exact_max) : "n/a");

  if (argc > 1) {
    std::ofstream out(argv[1]);
    jordan::write_csv(out, jordan::apply_symmetry_numeric(boost, family, grid));
  }
  return 0;
}
