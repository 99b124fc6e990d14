// crlab: run the verification suites from the command line.
//
//   crlab <suite> [flags]      one suite, CSV (or JSON) to stdout or --out
//   crlab all --out DIR        every suite, one CSV each plus summary.csv
//
// Exit status: 0 when every check passes, 1 when some check fails (listed on
// stderr, known defects tagged), 2 on bad flags or arguments.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "crlab/errors.hpp"
#include "crlab/suites.hpp"

namespace fs = std::filesystem;
using crlab::SuiteConfig;
using crlab::SuiteResult;

namespace {

struct Flags {
  int n = 0;
  std::vector<double> betas, lambdas;
  std::optional<double> A, tol;
  double R = 4;
  std::string seed = "0xC0FFEE";
  std::string out;
  std::string format;
  int workers = 1;
  int max_n = 8;
  std::string model = "conformal";
};

void add_flags(CLI::App* app, Flags& f) {
  app->add_option("--n", f.n, "rank n of H_n (default depends on the suite)")->check(CLI::Range(1, 8));
  app->add_option("--beta,--betas", f.betas, "comma separated beta values")->delimiter(',');
  app->add_option("--lambda,--lambdas", f.lambdas, "comma separated radii")->delimiter(',');
  app->add_option("--A", f.A, "mass coefficient");
  app->add_option("--R", f.R, "level set parameter")->check(CLI::PositiveNumber);
  app->add_option("--tol", f.tol, "override the main tolerance")->check(CLI::PositiveNumber);
  app->add_option("--seed", f.seed, "64-bit seed, decimal or 0x hex");
  app->add_option("--out", f.out, "output file (directory for all)");
  app->add_option("--format", f.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  app->add_option("--workers", f.workers, "worker threads")->check(CLI::Range(1, 256));
  app->add_option("--max-n", f.max_n, "largest n for alpha")->check(CLI::Range(1, 64));
  app->add_option("--model", f.model, "coframe model")->check(CLI::IsMember({"conformal"}));
}

SuiteConfig to_config(const Flags& f) {
  SuiteConfig c;
  c.n = f.n;
  c.betas = f.betas;
  c.lambdas = f.lambdas;
  c.A = f.A;
  c.R = f.R;
  c.tol = f.tol;
  std::size_t used = 0;
  c.seed = std::stoull(f.seed, &used, 0);
  if (used != f.seed.size()) throw std::invalid_argument("bad seed " + f.seed);
  c.workers = f.workers;
  c.max_n = f.max_n;
  c.model = f.model;
  return c;
}

void write(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path);
  os << text;
}

bool is_mass_family(const std::string& s) { return s == "mass" || s == "real-mass" || s == "pmt7"; }

int report_failures(const std::vector<SuiteResult>& results) {
  bool failed = false;
  for (const auto& r : results)
    for (const auto& c : r.checks) {
      if (c.pass) continue;
      failed = true;
      std::cerr << "FAIL " << r.name << ": " << c.id << " (" << c.detail << ")" << (c.known ? " [known]" : "") << '\n';
    }
  return failed ? 1 : 0;
}

int run(const std::string& name, const Flags& f) {
  SuiteConfig cfg = to_config(f);
  std::string format = f.format.empty() ? (is_mass_family(name) ? "json" : "csv") : f.format;

  if (name != "all") {
    SuiteResult r = crlab::run_suite(name, cfg);
    if (format == "json") {
      nlohmann::json doc{{"config", crlab::to_json(cfg)}};
      doc["config"]["subcommand"] = name;
      doc["result"] = crlab::to_json(r);
      if (is_mass_family(name)) doc["report"] = r.data["report"];
      write(f.out, doc.dump(2) + "\n");
    } else {
      write(f.out, r.csv);
    }
    return report_failures({r});
  }

  std::vector<SuiteResult> results;
  for (const auto& s : crlab::suite_names()) {
    std::cerr << "running " << s << '\n';
    results.push_back(crlab::run_suite(s, cfg));
  }
  if (format == "json") {
    nlohmann::json doc{{"config", crlab::to_json(cfg)}};
    doc["config"]["subcommand"] = "all";
    doc["results"] = nlohmann::json::array();
    for (const auto& r : results) doc["results"].push_back(crlab::to_json(r));
    write(f.out, doc.dump(2) + "\n");
  } else {
    fs::path dir = f.out.empty() ? fs::path("crlab-out") : fs::path(f.out);
    fs::create_directories(dir);
    for (const auto& r : results) write((dir / (r.name + ".csv")).string(), r.csv);
    write((dir / "summary.csv").string(), crlab::summary_csv(results));
  }
  return report_failures(results);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"CR geometry verification suites"};
  app.require_subcommand(1, 1);
  Flags flags;
  std::vector<std::string> names = crlab::suite_names();
  names.push_back("all");
  std::string chosen;
  for (const auto& name : names) {
    CLI::App* sub = app.add_subcommand(name, "run the " + name + " suite");
    add_flags(sub, flags);
    sub->callback([&chosen, name] { chosen = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return 2;
  }

  try {
    return run(chosen, flags);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n' << app.help();
    return 2;
  } catch (const crlab::DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const crlab::RankError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
