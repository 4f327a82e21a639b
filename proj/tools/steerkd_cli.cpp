// Command-line front end: closed-form rates, parameter sweeps, noise
// thresholds, protocol simulation and the verification oracles.
//
// Exit codes: 0 success, 1 usage/argument error, 2 runtime failure
// (including failed verification checks).

#include "steerkd/steerkd.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace steerkd;

// fields with commas or quotes get RFC-style quoting
std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void emit_csv(const CsvTable& table, const std::string& out_path) {
  if (out_path.empty()) {
    write_csv(table, std::cout);
    return;
  }
  std::ofstream os(out_path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open output file: " + out_path);
  write_csv(table, os);
}

void print_kv(const char* key, const std::string& value) {
  std::printf("%-22s %s\n", key, value.c_str());
}

std::string rate_column_name(RateVariant v) {
  switch (v) {
    case RateVariant::OneSidedDi: return "rate_1sdi";
    case RateVariant::OneSidedDiPs: return "rate_ps";
    case RateVariant::OneSidedDiNonPs: return "rate_nonps";
    case RateVariant::DiChsh: return "rate_di";
    case RateVariant::DeviceDependent: return "rate_dd";
  }
  return "rate";
}

const std::vector<std::string> kAllVariantNames = {"1sdi", "1sdi_ps", "1sdi_nonps",
                                                   "di_chsh", "dd"};

int cmd_rate(const std::string& variant_name_arg, std::optional<double> q,
             std::optional<double> f3, std::optional<double> b, double nu, double eta,
             const std::string& out_path) {
  const RateVariant variant = variant_from_name(variant_name_arg);
  RateReport rep{};
  switch (variant) {
    case RateVariant::OneSidedDi: {
      if (!q) throw std::invalid_argument("rate: --q is required for variant 1sdi");
      const double witness = f3 ? *f3 : kSqrt3 * (1.0 - 2.0 * *q);
      rep = rate_1sdi(*q, witness);
      break;
    }
    case RateVariant::DiChsh: {
      if (!q) throw std::invalid_argument("rate: --q is required for variant di_chsh");
      const double witness = b ? *b : kChshMax * (1.0 - 2.0 * *q);
      rep = rate_di_chsh(*q, witness);
      break;
    }
    case RateVariant::DeviceDependent:
      if (!q) throw std::invalid_argument("rate: --q is required for variant dd");
      rep = rate_dd(*q);
      break;
    case RateVariant::OneSidedDiPs:
    case RateVariant::OneSidedDiNonPs: {
      if (q) throw std::invalid_argument(
          "rate: loss variants take --nu/--eta, not --q");
      NoiseParams p(nu, eta);
      rep = variant == RateVariant::OneSidedDiPs ? rate_1sdi_ps(p) : rate_1sdi_nonps(p);
      break;
    }
  }

  print_kv("variant", variant_name(rep.variant));
  print_kv("q", format_fixed(rep.q));
  if (rep.variant == RateVariant::DiChsh)
    print_kv("chsh", format_fixed(rep.witness));
  else if (rep.variant != RateVariant::DeviceDependent)
    print_kv("f3", format_fixed(rep.witness));
  print_kv("i_ab", format_fixed(rep.i_ab));
  print_kv("chi_e", format_fixed(rep.chi_e));
  print_kv("rate", format_fixed(rep.rate));

  if (!out_path.empty()) {
    CsvTable t;
    t.header = {"variant", "q", "witness", "i_ab", "chi_e", "rate"};
    t.rows.push_back({variant_name(rep.variant), format_fixed(rep.q),
                      format_fixed(rep.witness), format_fixed(rep.i_ab),
                      format_fixed(rep.chi_e), format_fixed(rep.rate)});
    emit_csv(t, out_path);
  }
  return 0;
}

int cmd_sweep(const std::string& variable_name, double start, double stop, double step,
              double nu, double eta, std::vector<std::string> variant_names,
              const std::string& out_path) {
  SweepSpec spec;
  if (variable_name == "q")
    spec.variable = SweepVariable::Q;
  else if (variable_name == "eta")
    spec.variable = SweepVariable::Eta;
  else if (variable_name == "nu")
    spec.variable = SweepVariable::Nu;
  else
    throw std::invalid_argument("sweep: unknown variable '" + variable_name + "'");

  if (variant_names.empty()) {
    if (spec.variable == SweepVariable::Q)
      variant_names = {"dd", "1sdi", "di_chsh"};
    else
      variant_names = {"1sdi_nonps", "1sdi_ps"};
  }
  spec.start = start;
  spec.stop = stop;
  spec.step = step;
  spec.fixed = NoiseParams(nu, eta);
  for (const auto& name : variant_names) spec.variants.push_back(variant_from_name(name));

  const std::vector<SweepRow> rows = sweep(spec);

  CsvTable t;
  t.header = {variable_name};
  for (RateVariant v : spec.variants) t.header.push_back(rate_column_name(v));
  t.header.push_back(variable_name + "_pct");
  for (const auto& row : rows) {
    std::vector<std::string> cells{format_fixed(row.value)};
    for (const auto& rep : row.reports) cells.push_back(format_fixed(rep.rate));
    cells.push_back(format_fixed(100.0 * row.value));
    t.rows.push_back(std::move(cells));
  }
  emit_csv(t, out_path);
  return 0;
}

int cmd_threshold(const std::string& variant_name_arg, double nu, bool eta_vs_nu,
                  double start, double stop, double step, const std::string& out_path) {
  if (eta_vs_nu) {
    const std::vector<EtaThresholdRow> rows = critical_eta_sweep(start, stop, step);
    CsvTable t;
    t.header = {"nu", "eta_threshold_nonps", "eta_threshold_ps",
                "nu_pct", "eta_threshold_nonps_pct", "eta_threshold_ps_pct"};
    for (const auto& row : rows) {
      const auto pct = [](const std::optional<double>& v) {
        return v ? format_fixed(100.0 * *v) : std::string();
      };
      t.rows.push_back({format_fixed(row.nu), format_cell(row.eta_nonps),
                        format_cell(row.eta_ps), format_fixed(100.0 * row.nu),
                        pct(row.eta_nonps), pct(row.eta_ps)});
    }
    emit_csv(t, out_path);
    return 0;
  }

  if (variant_name_arg.empty())
    throw std::invalid_argument("threshold: --variant is required (or use --eta-vs-nu)");
  const RateVariant variant = variant_from_name(variant_name_arg);

  std::optional<ThresholdResult> res;
  if (variant == RateVariant::OneSidedDiPs || variant == RateVariant::OneSidedDiNonPs) {
    res = critical_eta(nu, variant);
    if (!res) {
      std::printf("no key possible at visibility %s for any detection efficiency\n",
                  format_fixed(nu).c_str());
      if (!out_path.empty()) {
        CsvTable t;
        t.header = {"variable", "critical", "critical_pct"};
        t.rows.push_back({"eta", "", ""});
        emit_csv(t, out_path);
      }
      return 0;
    }
  } else {
    res = critical_qber(variant);
  }

  print_kv("variable", res->variable);
  print_kv("critical", format_fixed(res->critical));
  print_kv("critical_pct", format_fixed(100.0 * res->critical));
  print_kv("bracket_lo", format_fixed(res->bracket_lo));
  print_kv("bracket_hi", format_fixed(res->bracket_hi));
  print_kv("iterations", std::to_string(res->iterations));
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6e", res->residual);
  print_kv("residual", buf);

  if (!out_path.empty()) {
    CsvTable t;
    t.header = {"variable", "critical", "critical_pct", "iterations", "residual"};
    t.rows.push_back({res->variable, format_fixed(res->critical),
                      format_fixed(100.0 * res->critical), std::to_string(res->iterations),
                      std::string(buf)});
    emit_csv(t, out_path);
  }
  return 0;
}

int cmd_simulate(std::uint64_t rounds, double nu, double eta, std::uint64_t seed,
                 bool postselect, const std::string& out_path,
                 const std::string& counts_path) {
  ProtocolConfig cfg;
  cfg.rounds = rounds;
  cfg.noise = NoiseParams(nu, eta);
  cfg.postselect = postselect;
  cfg.seed = seed;
  const SimStats s = run_protocol(cfg);

  print_kv("rounds", std::to_string(s.n_rounds));
  print_kv("postselect", s.postselected ? "1" : "0");
  print_kv("conclusive_fraction", format_fixed(s.conclusive_fraction));
  print_kv("key_fraction", format_fixed(s.key_fraction));
  print_kv("q_hat", format_fixed(s.q_hat));
  print_kv("q_stderr", format_fixed(s.q_stderr));
  print_kv("f3_hat", format_fixed(s.f3_hat));
  print_kv("f3_stderr", format_fixed(s.f3_stderr));
  for (int i = 0; i < 3; ++i) {
    const std::string key = "matched_c" + std::to_string(i + 1);
    print_kv(key.c_str(), format_fixed(s.matched_correlators[static_cast<size_t>(i)]));
  }
  print_kv("rate_hat", format_fixed(s.rate_hat));
  if (s.f3_clamped)
    std::fprintf(stderr, "warning: empirical F3 exceeded sqrt(3), clamped for the rate\n");

  if (!out_path.empty()) {
    CsvTable t;
    t.header = {"rounds", "nu", "eta", "seed", "postselect", "conclusive_fraction",
                "key_fraction", "q_hat", "q_stderr", "f3_hat", "f3_stderr", "rate_hat"};
    t.rows.push_back({std::to_string(s.n_rounds), format_fixed(nu), format_fixed(eta),
                      std::to_string(seed), s.postselected ? "1" : "0",
                      format_fixed(s.conclusive_fraction), format_fixed(s.key_fraction),
                      format_fixed(s.q_hat), format_fixed(s.q_stderr),
                      format_fixed(s.f3_hat), format_fixed(s.f3_stderr),
                      format_fixed(s.rate_hat)});
    emit_csv(t, out_path);
  }
  if (!counts_path.empty()) {
    CsvTable t;
    t.header = {"x", "y", "a", "b", "count"};
    const int a_values[3] = {1, -1, 0};
    const int b_values[2] = {1, -1};
    for (int x = 0; x < 3; ++x)
      for (int y = 0; y < 3; ++y)
        for (int a = 0; a < 3; ++a)
          for (int b = 0; b < 2; ++b)
            t.rows.push_back({std::to_string(x + 1), std::to_string(y + 1),
                              std::to_string(a_values[a]), std::to_string(b_values[b]),
                              std::to_string(s.counts[x][y][a][b])});
    emit_csv(t, counts_path);
  }
  return 0;
}

int cmd_verify(std::uint64_t trials, std::uint64_t seed, double holevo_step,
               double entropic_step, std::vector<double> f3_values, std::vector<int> dims,
               const std::string& out_path) {
  VerifyOptions opt;
  opt.trials = trials;
  opt.seed = seed;
  opt.holevo_step = holevo_step;
  opt.entropic_step = entropic_step;
  if (!f3_values.empty()) opt.f3_values = std::move(f3_values);
  if (!dims.empty()) opt.dims = std::move(dims);

  const std::vector<OracleReport> reports = run_all_checks(opt);
  bool all_pass = true;
  for (const auto& r : reports) {
    all_pass = all_pass && r.pass;
    std::printf("%s %-24s trials=%-9llu max_violation=%.6e tol=%.6e\n",
                r.pass ? "PASS" : "FAIL", r.check.c_str(),
                static_cast<unsigned long long>(r.trials), r.max_violation, r.tolerance);
    std::printf("     worst: %s\n", r.worst_case.c_str());
    if (!r.note.empty()) std::printf("     note:  %s\n", r.note.c_str());
  }
  std::printf("%s (%zu checks)\n", all_pass ? "ALL CHECKS PASSED" : "CHECK FAILURES PRESENT",
              reports.size());

  if (!out_path.empty()) {
    CsvTable t;
    t.header = {"check", "trials", "max_violation", "observed", "tolerance", "pass",
                "worst_case", "note"};
    for (const auto& r : reports) {
      char viol[32], obs[32], tol[32];
      std::snprintf(viol, sizeof(viol), "%.6e", r.max_violation);
      std::snprintf(obs, sizeof(obs), "%.6e", r.observed);
      std::snprintf(tol, sizeof(tol), "%.6e", r.tolerance);
      t.rows.push_back({csv_escape(r.check), std::to_string(r.trials), viol, obs, tol,
                        r.pass ? "1" : "0", csv_escape(r.worst_case), csv_escape(r.note)});
    }
    emit_csv(t, out_path);
  }
  return all_pass ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Key-rate analysis and protocol simulation for one-sided "
               "device-independent QKD certified by three-setting steering"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);

  // rate
  auto* rate = app.add_subcommand("rate", "Closed-form key rate at an operating point");
  std::string rate_variant;
  std::optional<double> rate_q, rate_f3, rate_b;
  double rate_nu = 1.0, rate_eta = 1.0;
  std::string rate_out;
  rate->add_option("--variant", rate_variant, "Rate variant")
      ->required()
      ->check(CLI::IsMember(kAllVariantNames));
  rate->add_option("--q", rate_q, "Key-round error rate (fraction)")
      ->check(CLI::Range(0.0, 0.5));
  rate->add_option("--f3", rate_f3, "Observed steering value (default: isotropic line)")
      ->check(CLI::Range(0.0, 1.7320508075688772));
  rate->add_option("--b", rate_b, "Observed CHSH value (default: isotropic line)")
      ->check(CLI::Range(0.0, 2.8284271247461903));
  rate->add_option("--nu", rate_nu, "Visibility, loss variants")->check(CLI::Range(0.0, 1.0));
  rate->add_option("--eta", rate_eta, "Alice detection efficiency, loss variants")
      ->check(CLI::Range(0.0, 1.0));
  rate->add_option("--out", rate_out, "Write a one-row CSV here");

  // sweep
  auto* sweep_cmd = app.add_subcommand("sweep", "Rate curves over a parameter grid (CSV)");
  std::string sweep_variable;
  double sweep_start = 0.0, sweep_stop = 0.0, sweep_step = 0.0;
  double sweep_nu = 1.0, sweep_eta = 1.0;
  std::vector<std::string> sweep_variants;
  std::string sweep_out;
  sweep_cmd->add_option("--variable", sweep_variable, "Grid variable")
      ->required()
      ->check(CLI::IsMember({"q", "eta", "nu"}));
  sweep_cmd->add_option("--start", sweep_start, "Grid start")->required();
  sweep_cmd->add_option("--stop", sweep_stop, "Grid stop (inclusive)")->required();
  sweep_cmd->add_option("--step", sweep_step, "Grid step")->required();
  sweep_cmd->add_option("--nu", sweep_nu, "Fixed visibility")->check(CLI::Range(0.0, 1.0));
  sweep_cmd->add_option("--eta", sweep_eta, "Fixed detection efficiency")
      ->check(CLI::Range(0.0, 1.0));
  sweep_cmd
      ->add_option("--variants", sweep_variants,
                   "Comma-separated rate variants (default depends on variable)")
      ->delimiter(',');
  sweep_cmd->add_option("--out", sweep_out, "CSV output path (default: stdout)");

  // threshold
  auto* thr = app.add_subcommand("threshold", "Critical QBER / detection efficiency");
  std::string thr_variant;
  double thr_nu = 1.0;
  bool thr_eta_vs_nu = false;
  double thr_start = 0.8, thr_stop = 1.0, thr_step = 0.005;
  std::string thr_out;
  thr->add_option("--variant", thr_variant,
                  "1sdi/di_chsh/dd: critical QBER; 1sdi_ps/1sdi_nonps: critical eta")
      ->check(CLI::IsMember(kAllVariantNames));
  thr->add_option("--nu", thr_nu, "Visibility for eta thresholds")->check(CLI::Range(0.0, 1.0));
  thr->add_flag("--eta-vs-nu", thr_eta_vs_nu,
                "Emit the eta-threshold-vs-visibility curve as CSV");
  thr->add_option("--start", thr_start, "Visibility grid start (with --eta-vs-nu)")
      ->check(CLI::Range(0.0, 1.0));
  thr->add_option("--stop", thr_stop, "Visibility grid stop (with --eta-vs-nu)")
      ->check(CLI::Range(0.0, 1.0));
  thr->add_option("--step", thr_step, "Visibility grid step (with --eta-vs-nu)");
  thr->add_option("--out", thr_out, "CSV output path");

  // simulate
  auto* sim = app.add_subcommand("simulate", "Round-by-round protocol simulation");
  std::uint64_t sim_rounds = 100000, sim_seed = 42;
  double sim_nu = 1.0, sim_eta = 1.0;
  bool sim_postselect = false;
  std::string sim_out, sim_counts_out;
  sim->add_option("--rounds", sim_rounds, "Number of rounds")->check(CLI::PositiveNumber);
  sim->add_option("--nu", sim_nu, "Visibility")->check(CLI::Range(0.0, 1.0));
  sim->add_option("--eta", sim_eta, "Alice detection efficiency")->check(CLI::Range(0.0, 1.0));
  sim->add_option("--seed", sim_seed, "RNG seed");
  sim->add_flag("--postselect", sim_postselect,
                "Estimate the key error on conclusive rounds only");
  sim->add_option("--out", sim_out, "Summary CSV path");
  sim->add_option("--counts-out", sim_counts_out, "Per-cell counts CSV path");

  // verify
  auto* ver = app.add_subcommand("verify", "Run the brute-force verification oracles");
  std::uint64_t ver_trials = 1000, ver_seed = 42;
  double ver_holevo_step = 0.05, ver_entropic_step = 0.02;
  std::vector<double> ver_f3;
  std::vector<int> ver_dims;
  std::string ver_out;
  ver->add_option("--trials", ver_trials, "Random trials per randomized check")
      ->check(CLI::PositiveNumber);
  ver->add_option("--seed", ver_seed, "RNG seed");
  ver->add_option("--holevo-step", ver_holevo_step, "Grid step, exact-Holevo check")
      ->check(CLI::Range(1e-3, 0.25));
  ver->add_option("--entropic-step", ver_entropic_step, "Grid step, entropy-bound check")
      ->check(CLI::Range(1e-3, 0.1));
  ver->add_option("--f3", ver_f3, "Steering values for the closed-form check")
      ->delimiter(',');
  ver->add_option("--dims", ver_dims, "Alice dimensions for the norm-bound check")
      ->delimiter(',');
  ver->add_option("--out", ver_out, "CSV report path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (rate->parsed())
      return cmd_rate(rate_variant, rate_q, rate_f3, rate_b, rate_nu, rate_eta, rate_out);
    if (sweep_cmd->parsed())
      return cmd_sweep(sweep_variable, sweep_start, sweep_stop, sweep_step, sweep_nu,
                       sweep_eta, sweep_variants, sweep_out);
    if (thr->parsed())
      return cmd_threshold(thr_variant, thr_nu, thr_eta_vs_nu, thr_start, thr_stop,
                           thr_step, thr_out);
    if (sim->parsed())
      return cmd_simulate(sim_rounds, sim_nu, sim_eta, sim_seed, sim_postselect, sim_out,
                          sim_counts_out);
    if (ver->parsed())
      return cmd_verify(ver_trials, ver_seed, ver_holevo_step, ver_entropic_step, ver_f3,
                        ver_dims, ver_out);
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
