#pragma once

// Shared fixtures: the shipped catalog and small element builders.

#include <random>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "jordan/catalog.hpp"
#include "jordan/hopf.hpp"

#ifndef JORDAN_CATALOG_DIR
#define JORDAN_CATALOG_DIR "data/catalog"
#endif

namespace jordan {

inline void PrintTo(const Series& s, std::ostream* os) { *os << s.to_string(); }
inline void PrintTo(const EpsSeries& s, std::ostream* os) { *os << s.to_string(); }

}  // namespace jordan

namespace jordan::test {

inline const Catalog& shipped_catalog() {
  static const Catalog cat = Catalog::load_directory(JORDAN_CATALOG_DIR);
  return cat;
}

/// c * z^deg as a series truncated at order.
inline Series zpow(const Rational& c, int deg, int order) { return Series::monomial(c, deg, order); }

/// Word of generator names in the given order, left to right.
inline Word word_of(PbwAlgebra<Series>& alg, const std::vector<std::string>& names) {
  Word w;
  for (const auto& n : names) w.push_back(alg.index(n));
  return w;
}

/// Single PBW term; the names must already be in PBW order.
inline NC term(PbwAlgebra<Series>& alg, const std::vector<std::string>& names, const Series& c) {
  NC e(c.order());
  e.add_term(word_of(alg, names), c);
  return e;
}

/// Tensor term a ⊗ b with scalar c.
inline Tensor tensor_term(PbwAlgebra<Series>& alg, const std::vector<std::string>& left,
                          const std::vector<std::string>& right, const Series& c) {
  Tensor t(2, c.order());
  t.add_term(TensorKey{{word_of(alg, left), word_of(alg, right)}}, c);
  return t;
}

/// Deterministic random series with small rational coefficients.
inline Series random_series(std::mt19937& rng, int order, bool unit = false) {
  std::uniform_int_distribution<int> num(-5, 5), den(1, 4);
  Series s(order);
  for (int k = 0; k <= order; ++k) {
    Rational c(num(rng), den(rng));
    c.canonicalize();
    s += zpow(c, k, order);
  }
  if (unit && sgn(s[0]) == 0) s += Series::one(order);
  return s;
}

inline std::string status_line(const CheckReport& rep) {
  std::string out;
  for (const auto* f : rep.failures()) out += f->check_id + ": " + f->residual + " | " + f->detail + "\n";
  return out;
}

}  // namespace jordan::test

#include <filesystem>
#include <fstream>
#include <sstream>

namespace jordan::test {

/// Copy of the shipped catalog in a fresh directory with one literal text
/// replacement applied to one file; fails the test if the text is absent.
inline std::filesystem::path corrupted_catalog(const std::string& tag, const std::string& file, const std::string& from,
                                               const std::string& to) {
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / ("jordan_catalog_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  for (const auto& f : fs::directory_iterator(JORDAN_CATALOG_DIR)) fs::copy_file(f.path(), dir / f.path().filename());
  std::ifstream in(dir / file);
  std::stringstream ss;
  ss << in.rdbuf();
  std::string text = ss.str();
  auto pos = text.find(from);
  EXPECT_NE(pos, std::string::npos) << "'" << from << "' not in " << file;
  if (pos != std::string::npos) text.replace(pos, from.size(), to);
  std::ofstream(dir / file) << text;
  return dir;
}

}  // namespace jordan::test
