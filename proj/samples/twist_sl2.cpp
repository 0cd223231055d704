// Transports the deformed sl(2) coproducts through a twist map and checks
// that the images satisfy the target bracket table.

#include <iostream>

#include "jordan/show.hpp"

#ifndef JORDAN_CATALOG_DIR
#define JORDAN_CATALOG_DIR "data/catalog"
#endif

int main(int argc, char** argv) {
  const std::string map_id = argc > 1 ? argv[1] : "map_bh";
  const int order = 3;
  auto cat = jordan::Catalog::load_directory(JORDAN_CATALOG_DIR);
  std::cout << jordan::format_rendering(jordan::render_entry(cat, map_id, order), jordan::ShowFormat::Text);

  const auto& m = cat.get<jordan::TwistMap>(map_id);
  jordan::HopfAlgebra source(cat.get<jordan::Presentation>(m.source));
  jordan::CheckReport rep = jordan::apply_twist(source, cat.get<jordan::Presentation>(m.target), m, order);
  for (const auto& r : rep.records) std::cout << jordan::to_string(r.status) << "  " << r.check_id << "\n";
  return rep.passed() ? 0 : 1;
}
