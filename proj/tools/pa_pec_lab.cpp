// Campaign runner: builds seeded random instances, runs a named suite and
// writes a machine-readable JSON report.
//
// Exit codes: 0 all checks passed (inconclusive allowed and surfaced),
// 1 at least one inequality violated, 2 usage or configuration error.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "papec/campaign.hpp"

int main(int argc, char** argv) {
  CLI::App app{"pa-pec-lab: numerical verification campaigns for hashing-based key extraction"};

  std::string suite, config_path, out_path;
  papec::campaign::CampaignConfig cfg;
  bool have_seed = false, have_trials = false, have_tol = false;
  std::uint64_t seed = 0;
  int trials = 0;
  double tol = 0;
  int n = 0, m = 0, l = 0, d_e = 0;

  app.add_option("--suite", suite, "one of: universal2 virtuality_pa theorem1 lhl_like corollary2 qkd_lemmas lemma10 end_to_end metrics_sanity");
  app.add_option("--config", config_path, "JSON config file; flags override its fields");
  app.add_option("--seed", seed, "campaign seed")->each([&](const std::string&) { have_seed = true; });
  app.add_option("--trials", trials, "number of trials")->each([&](const std::string&) { have_trials = true; });
  app.add_option("--tol", tol, "tolerance")->each([&](const std::string&) { have_tol = true; });
  app.add_option("--out", out_path, "report output path");
  app.add_option("--n", n, "input length");
  app.add_option("--m", m, "hash output length");
  app.add_option("--l", l, "verification tag length");
  app.add_option("--dE", d_e, "environment dimension");
  bool corrupt = false;
  app.add_flag("--corrupt-pec", corrupt, "test hook: inject a broken recovery channel");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw std::invalid_argument("cannot open config file " + config_path);
      nlohmann::json j;
      in >> j;
      cfg = papec::campaign::CampaignConfig::from_json(j);
    }
    if (!suite.empty()) cfg.suite = suite;
    if (have_seed) cfg.seed = seed;
    if (have_trials) cfg.trials = trials;
    if (have_tol) cfg.tol = tol;
    if (!out_path.empty()) cfg.out = out_path;
    if (n > 0) cfg.n = n;
    if (m > 0) cfg.m = m;
    if (l > 0) cfg.l = l;
    if (d_e > 0) cfg.d_e = d_e;
    if (corrupt) cfg.corrupt_pec = true;
    if (cfg.suite.empty()) throw std::invalid_argument("no suite given (use --suite or --config)");
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }

  try {
    const papec::campaign::CampaignReport rep = papec::campaign::run_campaign(cfg);
    const nlohmann::json j = rep.to_json();
    if (!cfg.out.empty()) {
      std::ofstream out(cfg.out);
      if (!out) {
        std::cerr << "cannot write report to " << cfg.out << "\n";
        return 2;
      }
      out << j.dump(2) << "\n";
    }
    std::cout << "suite=" << cfg.suite << " pass=" << rep.pass << " fail=" << rep.fail
              << " inconclusive=" << rep.inconclusive << "\n";
    if (rep.fail > 0) {
      for (const auto& rec : rep.records)
        for (const auto& row : rec.rows)
          if (row.verdict == papec::report::Verdict::kFail)
            std::cout << "violated: trial " << rec.index << " " << row.id << " lhs=" << row.lhs
                      << " rhs=" << row.rhs << "\n";
    }
    return papec::campaign::exit_code(rep);
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
