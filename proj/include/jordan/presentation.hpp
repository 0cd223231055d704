#pragma once

// In-memory forms of the algebraic catalog entries. Expressions are already
// macro-expanded.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "jordan/eval.hpp"
#include "jordan/expr.hpp"
#include "jordan/rational.hpp"
#include "jordan/series.hpp"

namespace jordan {

struct Bracket {
  std::string left;
  std::string right;
  ExprPtr rhs;
};

/// Deformed enveloping algebra with coproduct and optional R-matrix.
struct Presentation {
  std::string id;
  std::string param = "z";
  std::vector<std::string> generators;  // PBW order
  std::vector<Bracket> brackets;
  std::map<std::string, ExprPtr> coproducts;

  ExprPtr rmatrix;                  // tensor expression, optional
  ExprPtr classical_r;              // first-order part of rmatrix
  std::vector<std::string> borel;   // generators on which intertwining is required

  struct Grouplike {
    ExprPtr element;
    std::vector<Rational> exponents;
  };
  std::optional<Grouplike> grouplike;

  struct Classical {
    std::string target;
    std::map<std::string, std::string> rename;
  };
  std::optional<Classical> classical;

  BracketTable table() const {
    BracketTable t;
    for (const auto& b : brackets) t[{b.left, b.right}] = b.rhs;
    return t;
  }
  std::map<std::string, ScalarMonomial> params() const { return indeterminate(param); }
};

/// Nonlinear change of generators: each target generator is an expression
/// over the source generators.
struct TwistMap {
  std::string id;
  std::string source;
  std::string target;
  std::map<std::string, ExprPtr> assignments;
  std::map<std::string, ExprPtr> inverse;  // source generator over target generators
};

/// new = coeff · ε^eps_power · old
struct Scaling {
  std::string old_generator;
  Rational coeff = 1;
  int eps_power = 0;
};

struct Contraction {
  std::string id;
  std::string source;
  std::string target;
  std::map<std::string, Scaling> scaling;  // keyed by new generator
  ScalarMonomial old_parameter{Rational(1, 2), 1, 1};  // old parameter in terms of (new z, ε)

  struct Diagram {
    std::string contraction;  // first leg of the other path
    std::string twist;        // second leg of the other path
  };
  std::optional<Diagram> diagram;
};

struct Embedding {
  std::string id;
  std::string sub;
  std::string big;
  std::map<std::string, ExprPtr> rename;  // sub generator → big expression
  ScalarMonomial parameter{1, 1, 0};       // sub parameter in the big one
  ExprPtr classical_r;                     // big-algebra expression, optional
  std::vector<std::string> borel;
};

}  // namespace jordan
