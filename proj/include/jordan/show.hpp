#pragma once

// Canonical renderings of catalog entries, expanded at a truncation order.

#include <string>
#include <utility>
#include <vector>

#include <fmt/format.h>
#include <json.hpp>

#include "jordan/catalog.hpp"
#include "jordan/hopf.hpp"
#include "jordan/opalg.hpp"

namespace jordan {

enum class ShowFormat { Text, Latex, Json };

inline ShowFormat parse_show_format(std::string_view s) {
  if (s == "text") return ShowFormat::Text;
  if (s == "latex" || s == "latex-ish") return ShowFormat::Latex;
  if (s == "json") return ShowFormat::Json;
  throw Error(ErrorCode::ConfigError, fmt::format("unknown format '{}' (text, latex, json)", s));
}

/// Named sections of (label, canonical value) lines.
struct Rendering {
  std::string id;
  std::string kind;
  std::string label;
  int order = 0;
  std::vector<std::pair<std::string, std::vector<std::pair<std::string, std::string>>>> sections;

  std::vector<std::pair<std::string, std::string>>& section(const std::string& name) {
    for (auto& [n, lines] : sections)
      if (n == name) return lines;
    sections.emplace_back(name, std::vector<std::pair<std::string, std::string>>{});
    return sections.back().second;
  }
  std::size_t count(const std::string& name) const {
    for (const auto& [n, lines] : sections)
      if (n == name) return lines.size();
    return 0;
  }
};

inline Rendering render_entry(const Catalog& cat, const std::string& id, int order = 4, RewriteLimits limits = {}) {
  const CatalogEntry& e = cat.load(id);
  Rendering out{e.id, std::string(to_string(e.kind)), e.label, order, {}};
  switch (e.kind) {
    case EntryKind::Presentation: {
      HopfAlgebra h(e.as<Presentation>(), limits);
      const auto& p = h.presentation();
      for (const auto& b : p.brackets) {
        NC rhs = h.evaluator().element(b.rhs, order);
        out.section("brackets").emplace_back(fmt::format("[{}, {}]", b.left, b.right), render(rhs, h.names(), p.param));
      }
      // A generator absent from every listed bracket is central.
      for (const auto& g : p.generators) {
        bool listed = false;
        for (const auto& b : p.brackets) listed = listed || b.left == g || b.right == g;
        if (!listed) out.section("brackets").emplace_back(fmt::format("[{}, ·]", g), "0");
      }
      for (const auto& g : p.generators)
        out.section("coproducts")
            .emplace_back(fmt::format("Δ({})", g), render(h.coproduct(h.algebra().index(g), order), h.names(), p.param));
      if (p.rmatrix) out.section("rmatrix").emplace_back("R", render(build_rmatrix(h, order), h.names(), p.param));
      break;
    }
    case EntryKind::Twist: {
      const auto& m = e.as<TwistMap>();
      HopfAlgebra src(cat.get<Presentation>(m.source), limits);
      Evaluator<Series> ev = twist_evaluator(src, m);
      for (const auto& [g, x] : m.assignments)
        out.section("images").emplace_back(g, render(ev.binding(g, order), src.names(), src.presentation().param));
      const Presentation& tp = cat.get<Presentation>(m.target);
      for (const auto& g : tp.generators)
        if (auto it = tp.coproducts.find(g); it != tp.coproducts.end())
          out.section("transported coproducts")
              .emplace_back(fmt::format("Δ({})", g),
                            render(src.delta(ev.binding(g, order)), src.names(), src.presentation().param));
      for (const auto& [g, x] : m.inverse) out.section("inverse").emplace_back(g, to_string(*x));
      break;
    }
    case EntryKind::Contraction: {
      const auto& c = e.as<Contraction>();
      HopfAlgebra target(cat.get<Presentation>(c.target), limits);
      ContractionResult res = contract(cat.get<Presentation>(c.source), c, target.names(), order, limits);
      const auto& names = target.names();
      const std::string& param = target.presentation().param;
      for (const auto& [name, sc] : c.scaling)
        out.section("scaling").emplace_back(name, fmt::format("{}*eps^{}*{}", to_string(sc.coeff), sc.eps_power,
                                                              sc.old_generator));
      for (const auto& [ij, v] : res.brackets)
        out.section("brackets").emplace_back(fmt::format("[{}, {}]", names[ij.first], names[ij.second]),
                                             render(v, names, param));
      for (const auto& [g, v] : res.coproducts)
        out.section("coproducts").emplace_back(fmt::format("Δ({})", names[g]), render(v, names, param));
      break;
    }
    case EntryKind::Embedding: {
      const auto& m = e.as<Embedding>();
      HopfAlgebra big(cat.get<Presentation>(m.big), limits);
      const Presentation& sub = cat.get<Presentation>(m.sub);
      Evaluator<Series> ev = embedding_evaluator(big, sub, m);
      out.section("parameter").emplace_back(sub.param, to_string(m.parameter.coeff) + "*" + big.presentation().param);
      for (const auto& g : sub.generators)
        out.section("images").emplace_back(g, render(ev.binding(g, order), big.names(), big.presentation().param));
      break;
    }
    case EntryKind::Realization: {
      RealizedAlgebra ra(cat, e.as<Realization>());
      for (const auto& g : ra.presentation().generators) out.section("operators").emplace_back(g, ra.op(g).to_string());
      break;
    }
    case EntryKind::Casimir: {
      const auto& c = e.as<Casimir>();
      out.section("element").emplace_back("E", to_string(*c.element));
      for (const auto& [rid, x] : c.realized) {
        RealizedAlgebra ra(cat, cat.get<Realization>(rid));
        out.section("realized").emplace_back(rid, ra.realize(c.element).to_string());
      }
      break;
    }
    case EntryKind::SymmetryTable: {
      const auto& s = e.as<SymmetryTable>();
      RealizedAlgebra ra(cat, cat.get<Realization>(s.realization));
      for (const auto& g : ra.presentation().generators) {
        auto it = s.lambda.find(g);
        out.section("lambda").emplace_back(g, it == s.lambda.end() ? "0" : ra.operator_expr(it->second).to_string());
      }
      break;
    }
  }
  return out;
}

namespace detail {

inline std::string latexish(std::string s) {
  auto replace_all = [&](const std::string& from, const std::string& to) {
    for (std::size_t pos = 0; (pos = s.find(from, pos)) != std::string::npos; pos += to.size()) s.replace(pos, from.size(), to);
  };
  replace_all("Δ", "\\Delta");
  replace_all("⊗", " \\otimes ");
  replace_all("sigma", "\\sigma");
  replace_all("tau", "\\tau");
  replace_all("eps", "\\epsilon");
  replace_all("*", " ");
  return s;
}

}  // namespace detail

inline std::string format_rendering(const Rendering& r, ShowFormat f) {
  if (f == ShowFormat::Json) {
    nlohmann::ordered_json j;
    j["id"] = r.id;
    j["kind"] = r.kind;
    j["label"] = r.label;
    j["order"] = r.order;
    nlohmann::ordered_json secs = nlohmann::ordered_json::object();
    for (const auto& [name, lines] : r.sections) {
      nlohmann::ordered_json arr = nlohmann::ordered_json::array();
      for (const auto& [k, v] : lines) arr.push_back({{"name", k}, {"value", v}});
      secs[name] = arr;
    }
    j["sections"] = secs;
    return j.dump(2) + "\n";
  }
  std::string out = fmt::format("{} ({}) {} at order {}\n", r.id, r.kind, r.label, r.order);
  for (const auto& [name, lines] : r.sections) {
    out += name + ":\n";
    for (const auto& [k, v] : lines)
      out += f == ShowFormat::Latex ? fmt::format("  {} = {}\n", detail::latexish(k), detail::latexish(v))
                                    : fmt::format("  {} = {}\n", k, v);
  }
  return out;
}

}  // namespace jordan
