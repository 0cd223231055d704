// Command-line driver. Exit codes: 0 pass, 1 verification failure,
// 2 usage or config error, 3 internal error.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "jordan/lattice.hpp"
#include "jordan/show.hpp"
#include "jordan/suite.hpp"

#ifndef JORDAN_CATALOG_DIR
#define JORDAN_CATALOG_DIR "data/catalog"
#endif

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;
constexpr int kExitInternal = 3;

std::string default_catalog() {
  if (const char* env = std::getenv("JTWIST_CATALOG")) return env;
  return JORDAN_CATALOG_DIR;
}

std::vector<jordan::Rational> rational_list(const std::string& text) {
  std::vector<jordan::Rational> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) out.push_back(jordan::parse_rational(item));
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw jordan::Error(jordan::ErrorCode::ConfigError, "cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Verification engine for Jordanian quantum algebras, twists and lattice realizations"};
  app.require_subcommand(1);
  std::string catalog_dir = default_catalog();
  app.add_option("--catalog", catalog_dir, "catalog directory");

  // verify
  auto* verify = app.add_subcommand("verify", "run verification suites");
  std::string target = "all";
  std::vector<std::string> ids;
  std::optional<int> order, degree;
  std::optional<std::string> sigma, tau, mass, config_path, report_path;
  std::optional<double> tolerance;
  bool allow_errata = false, no_timing = false, quiet = false;
  std::vector<std::string> suite_choices{"all"};
  for (const auto& s : jordan::suite_names()) suite_choices.push_back(s);
  verify->add_option("suite", target, "suite to run")->check(CLI::IsMember(suite_choices));
  verify->add_option("ids", ids, "restrict to these catalog ids");
  verify->add_option("--order", order, "truncation order N (>= 1)");
  verify->add_option("--degree", degree, "PBW degree cap");
  verify->add_option("--sigma", sigma, "space-lattice samples p/q[,p/q...]");
  verify->add_option("--tau", tau, "time-lattice samples p/q[,p/q...]");
  verify->add_option("--m", mass, "mass samples p/q[,p/q...]");
  verify->add_option("--tolerance", tolerance, "float tolerance for lattice checks");
  verify->add_option("--report", report_path, "write the JSON report here");
  verify->add_option("--config", config_path, "YAML config file; flags override it");
  verify->add_flag("--allow-errata", allow_errata, "suspected errata do not fail the run");
  verify->add_flag("--no-timing", no_timing, "zero timing fields in the report");
  verify->add_flag("-q,--quiet", quiet, "print only the final line");

  // show
  auto* show = app.add_subcommand("show", "render a catalog entry");
  std::string show_id, format = "text";
  int show_order = 4;
  show->add_option("id", show_id, "catalog id")->required();
  show->add_option("--format", format, "text | latex | json");
  show->add_option("--order", show_order, "truncation order");

  // list
  auto* list = app.add_subcommand("list", "list catalog ids");
  std::string kind;
  list->add_option("kind", kind, "entry kind filter");

  // sample
  auto* sample = app.add_subcommand("sample", "export a solution family on the default grid as CSV");
  std::string equation = "space", k_text = "1", m_text = "1/2", csv_path;
  sample->add_option("equation", equation, "space | time");
  sample->add_option("--k", k_text, "family wave number");
  sample->add_option("--m", m_text, "mass");
  sample->add_option("--csv", csv_path, "output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*list) {
      auto cat = jordan::Catalog::load_directory(catalog_dir);
      std::optional<jordan::EntryKind> k;
      if (!kind.empty()) {
        k = jordan::parse_kind(kind);
        if (!k) throw jordan::Error(jordan::ErrorCode::ConfigError, "unknown kind '" + kind + "'");
      }
      for (const auto& id : cat.list(k))
        std::cout << fmt::format("{:<20} {:<15} {}\n", id, jordan::to_string(cat.load(id).kind), cat.load(id).label);
      return kExitPass;
    }
    if (*show) {
      if (show_order < 1) throw jordan::Error(jordan::ErrorCode::ConfigError, "--order must be >= 1");
      auto fmt_kind = jordan::parse_show_format(format);
      auto cat = jordan::Catalog::load_directory(catalog_dir);
      std::cout << jordan::format_rendering(jordan::render_entry(cat, show_id, show_order), fmt_kind);
      return kExitPass;
    }
    if (*sample) {
      jordan::Equation eq = jordan::parse_equation(equation);
      jordan::GridSpec g;
      jordan::Rational k = jordan::parse_rational(k_text), m = jordan::parse_rational(m_text);
      auto fam = eq == jordan::Equation::SpaceLattice ? jordan::SolutionFamily::space_geometric(k, m, g.sigma)
                                                      : jordan::SolutionFamily::time_geometric(k, m, g.tau);
      jordan::GridSamples s = jordan::apply_symmetry_numeric(jordan::DiffOp::one(), fam, g);
      if (csv_path.empty()) {
        jordan::write_csv(std::cout, s);
      } else {
        std::ofstream out(csv_path);
        if (!out) throw jordan::Error(jordan::ErrorCode::ConfigError, "cannot write " + csv_path);
        jordan::write_csv(out, s);
      }
      return kExitPass;
    }

    // verify
    jordan::SuiteConfig cfg;
    if (config_path) jordan::apply_config_text(cfg, read_file(*config_path), *config_path);
    if (order) cfg.order = *order;
    if (degree) cfg.degree = *degree;
    if (sigma) cfg.sigma = rational_list(*sigma);
    if (tau) cfg.tau = rational_list(*tau);
    if (mass) cfg.mass = rational_list(*mass);
    if (tolerance) cfg.lattice.tolerance = *tolerance;
    if (report_path) cfg.report_path = *report_path;
    if (allow_errata) cfg.allow_errata = true;
    if (target != "all") cfg.suites = {target};
    if (!ids.empty()) cfg.ids = ids;
    cfg.sync_lattice();
    cfg.validate();

    auto cat = jordan::Catalog::load_directory(catalog_dir);
    for (const auto& id : cfg.ids)
      if (!cat.contains(id)) throw jordan::Error(jordan::ErrorCode::UnknownEntry, "no catalog entry '" + id + "'", id);
    jordan::CheckReport rep = jordan::SuiteRunner(cat, cfg).run();
    std::string text = jordan::summary_text(rep, cfg.allow_errata);
    if (quiet) text = text.substr(text.rfind('\n', text.size() - 2) + 1);
    std::cout << text;
    if (!cfg.report_path.empty()) {
      std::ofstream out(cfg.report_path);
      if (!out) throw jordan::Error(jordan::ErrorCode::ConfigError, "cannot write " + cfg.report_path);
      out << jordan::report_json(rep, cfg, !no_timing).dump(2) << "\n";
    }
    return rep.passed(cfg.allow_errata) ? kExitPass : kExitFail;
  } catch (const jordan::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    switch (e.code()) {
      case jordan::ErrorCode::ConfigError:
      case jordan::ErrorCode::ValidationFailed:
      case jordan::ErrorCode::UnknownEntry:
      case jordan::ErrorCode::ParseError:
        return kExitUsage;
      default:
        return kExitInternal;
    }
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}
