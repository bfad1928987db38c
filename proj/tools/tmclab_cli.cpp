// Scenario-driven front end: one subcommand per audit, a JSON report on stdout
// or in --out, CSV side files, and exit codes 0/1/2/3.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "tmclab/commands.hpp"
#include "tmclab/errors.hpp"

namespace {

struct Overrides {
  std::string scenario, out, window, p_grid;
  std::optional<std::uint64_t> seed, samples;
  std::optional<std::size_t> cap;
  int jobs = 1;
};

std::pair<tmc::Index, tmc::Index> parse_window(const std::string& s) {
  const auto dots = s.find("..");
  if (dots == std::string::npos) throw tmc::Error(tmc::Errc::InvalidInput, "--window expects a..b");
  try {
    std::size_t used = 0;
    const tmc::Index lo = std::stoll(s.substr(0, dots), &used);
    if (used != dots) throw std::invalid_argument(s);
    const std::string rest = s.substr(dots + 2);
    const tmc::Index hi = std::stoll(rest, &used);
    if (used != rest.size() || lo > hi) throw std::invalid_argument(s);
    return {lo, hi};
  } catch (const std::logic_error&) {
    throw tmc::Error(tmc::Errc::InvalidInput, "--window expects integers a..b with a <= b");
  }
}

std::vector<double> parse_grid(const std::string& s) {
  std::vector<double> grid;
  std::stringstream in(s);
  for (std::string item; std::getline(in, item, ',');) {
    try {
      std::size_t used = 0;
      const double p = std::stod(item, &used);
      if (used != item.size() || !(p > 0)) throw std::invalid_argument(item);
      grid.push_back(p);
    } catch (const std::logic_error&) {
      throw tmc::Error(tmc::Errc::InvalidInput, "--p-grid expects positive numbers separated by commas");
    }
  }
  if (grid.empty()) throw tmc::Error(tmc::Errc::InvalidInput, "--p-grid is empty");
  return grid;
}

tmc::Scenario load(const Overrides& o) {
  tmc::Scenario sc = tmc::load_scenario(o.scenario);
  if (o.seed) sc.seed = *o.seed;
  if (o.samples) sc.samples = *o.samples;
  if (o.cap) {
    if (*o.cap == 0) throw tmc::Error(tmc::Errc::InvalidInput, "--cap must be positive");
    sc.basis_cap = *o.cap;
  }
  if (!o.window.empty()) std::tie(sc.window_lo, sc.window_hi) = parse_window(o.window);
  if (!o.p_grid.empty()) sc.p_grid = parse_grid(o.p_grid);
  return sc;
}

void emit(const std::string& cmd, const tmc::CommandResult& r, const std::string& out) {
  const std::string text = r.report.dump(2) + "\n";
  if (out.empty()) {
    std::cout << text;
    return;
  }
  namespace fs = std::filesystem;
  fs::create_directories(out);
  std::ofstream(fs::path(out) / (cmd + ".json"), std::ios::binary) << text;
  for (const auto& [name, contents] : r.files) std::ofstream(fs::path(out) / name, std::ios::binary) << contents;
}

int exit_code_for(tmc::Errc c) {
  switch (c) {
    case tmc::Errc::BasisCapExceeded:
    case tmc::Errc::UntrustedBlocks:
      return 3;
    case tmc::Errc::InvalidInput:
    case tmc::Errc::ZeroRowOrColumn:
    case tmc::Errc::NotIrreducible:
    case tmc::Errc::OrbitsNotDisjoint:
    case tmc::Errc::SideMismatch:
      return 2;
    default:
      return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{tmc::kToolVersion};
  app.require_subcommand(1);
  Overrides o;
  const auto add_flags = [&o](CLI::App* sub) {
    sub->add_option("--scenario", o.scenario, "scenario JSON")->required();
    sub->add_option("--out", o.out, "output directory; the report goes to stdout when absent");
    sub->add_option("--seed", o.seed, "64-bit seed");
    sub->add_option("--samples", o.samples, "sampled pairs and triples");
    sub->add_option("--window", o.window, "block window a..b");
    sub->add_option("--p-grid", o.p_grid, "comma-separated Schatten exponents");
    sub->add_option("--cap", o.cap, "homoclinic basis cap");
    sub->add_option("--jobs", o.jobs, "worker threads")->check(CLI::PositiveNumber);
  };
  const std::vector<std::string> names{"validate", "metric-audit", "auf-audit", "spectrum", "fredholm", "report-all"};
  for (const std::string& n : names) add_flags(app.add_subcommand(n, n));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  const std::string cmd = app.get_subcommands().front()->get_name();
  const auto start = std::chrono::steady_clock::now();
  try {
    const tmc::Scenario sc = load(o);
    tmc::CommandResult r;
    if (cmd == "validate") r = tmc::cmd_validate(sc);
    else if (cmd == "metric-audit") r = tmc::cmd_metric_audit(sc);
    else if (cmd == "auf-audit") r = tmc::cmd_auf_audit(sc);
    else if (cmd == "spectrum") r = tmc::cmd_spectrum(sc, o.jobs);
    else if (cmd == "fredholm") r = tmc::cmd_fredholm(sc, o.jobs);
    else r = tmc::cmd_report_all(sc, o.jobs);
    emit(cmd, r, o.out);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cerr << cmd << ": exit " << r.exit_code << " in " << secs << " s\n";
    return r.exit_code;
  } catch (const tmc::Error& e) {
    std::cerr << cmd << ": " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << cmd << ": " << e.what() << "\n";
    return 2;
  }
}
