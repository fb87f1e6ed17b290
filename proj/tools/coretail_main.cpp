// coretail: fit, evaluate and sample piecewise Pareto distributions with a
// finite core, and fit the latent-propensity contact model.
//
// Exit codes: 0 success, 2 usage error, 3 data error, 4 no valid fit.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "coretail/families.hpp"
#include "coretail/fit.hpp"
#include "coretail/santafe.hpp"
#include "coretail/text_io.hpp"

namespace {

using namespace coretail;

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitNoFit = 4;

// 17 significant digits guarantee that every emitted double round-trips.
std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string num(std::ptrdiff_t v) { return std::to_string(v); }

std::string json_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  return out;
}

std::vector<Family> parse_families(const std::string& spec) {
  if (spec == "all")
    return {kAllFamilies.begin(), kAllFamilies.end()};
  std::vector<Family> out;
  std::stringstream ss(spec);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    const auto f = family_from_name(tok);
    if (!f)
      throw CLI::ValidationError(
          "--family", "unknown family '" + tok +
                          "' (use uni|pow|forced-pow|exp|forced-exp|alg|"
                          "forced-alg|all)");
    out.push_back(*f);
  }
  if (out.empty()) throw CLI::ValidationError("--family", "no family given");
  return out;
}

struct FitRow {
  Family family;
  bool ok = false;
  FitResult result;
  std::string error;
};

int cmd_fit(const std::string& input, const std::string& family_spec,
            std::optional<double> xmin, std::optional<double> beta,
            const std::string& output) {
  const auto families = parse_families(family_spec);
  const auto sample = SortedSample::from_values(read_value_file(input));

  std::vector<FitRow> rows;
  for (Family f : families) {
    FitRow row;
    row.family = f;
    FitOptions opt;
    if (beta) {
      if (!family_has_free_beta(f))
        throw CLI::ValidationError(
            "--beta", std::string("family '") + std::string(family_name(f)) +
                          "' has no free beta to pin");
      opt.pinned_beta = beta;
    }
    try {
      row.result = xmin ? fit_fixed_xmin(f, sample, *xmin, opt)
                        : fit(f, sample, opt);
      row.ok = true;
    } catch (const NoValidFit& e) {
      row.error = e.what();
    } catch (const NoTailData& e) {
      row.error = e.what();
    }
    rows.push_back(std::move(row));
  }

  std::vector<const FitRow*> ranked;
  for (const FitRow& r : rows)
    if (r.ok) ranked.push_back(&r);
  std::sort(ranked.begin(), ranked.end(), [](const FitRow* a, const FitRow* b) {
    const double aa = aic(a->result), ab = aic(b->result);
    if (aa != ab) return aa < ab;
    return a->family < b->family;
  });

  auto out = open_out(output);
  out << "{\n  \"n\": " << sample.size() << ",\n  \"results\": [\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const FitRow& r = rows[i];
    out << "    {\"family\": \"" << family_name(r.family) << "\"";
    if (r.ok) {
      const FitResult& fr = r.result;
      out << ", \"alpha\": " << num(fr.params.alpha);
      if (fr.params.family == Family::uni)
        out << ", \"beta\": null";
      else
        out << ", \"beta\": " << num(fr.params.beta);
      out << ", \"xmin\": " << num(fr.params.x_min)
          << ", \"loglik\": " << num(fr.loglik)
          << ", \"aic\": " << num(aic(fr)) << ", \"bic\": " << num(bic(fr))
          << ", \"at_boundary\": " << (fr.at_boundary ? "true" : "false")
          << ", \"interval_index\": " << num(fr.interval_index)
          << ", \"pinned_xmin\": " << (xmin ? "true" : "false")
          << ", \"pinned_beta\": " << (beta ? "true" : "false");
      if (!fr.branch_notes.empty())
        out << ", \"notes\": \"" << json_escape(fr.branch_notes) << "\"";
    } else {
      out << ", \"error\": \"" << json_escape(r.error) << "\"";
    }
    out << "}" << (i + 1 < rows.size() ? "," : "") << "\n";
  }
  out << "  ],\n  \"ranking\": [";
  for (std::size_t i = 0; i < ranked.size(); ++i)
    out << (i ? ", " : "") << "\"" << family_name(ranked[i]->family) << "\"";
  out << "],\n  \"best_family\": ";
  if (ranked.empty())
    out << "null";
  else
    out << "\"" << family_name(ranked.front()->family) << "\"";
  out << "\n}\n";

  for (const FitRow& r : rows) {
    if (r.ok)
      std::cout << family_name(r.family) << ": alpha=" << num(r.result.params.alpha)
                << " xmin=" << num(r.result.params.x_min)
                << " loglik=" << num(r.result.loglik) << "\n";
    else
      std::cout << family_name(r.family) << ": " << r.error << "\n";
  }
  if (ranked.empty()) {
    std::cerr << "no family produced a valid fit\n";
    return kExitNoFit;
  }
  std::cout << "best: " << family_name(ranked.front()->family) << "\n";
  return 0;
}

int cmd_sample(const std::string& family_name_arg, double alpha,
               std::optional<double> beta, double xmin, std::size_t count,
               std::uint64_t seed, const std::string& output) {
  const auto f = family_from_name(family_name_arg);
  if (!f)
    throw CLI::ValidationError("--family",
                               "unknown family '" + family_name_arg + "'");
  const FamilyParams p = make_params(*f, alpha, beta, xmin);
  validate(p);
  const auto variates = sample_variates(p, count, seed);
  auto out = open_out(output);
  for (double v : variates) out << num(v) << "\n";
  return 0;
}

int cmd_tabulate(const std::string& family_name_arg, double alpha,
                 std::optional<double> beta, double xmin, double xmax,
                 std::size_t points, const std::string& spacing,
                 const std::string& output) {
  const auto f = family_from_name(family_name_arg);
  if (!f)
    throw CLI::ValidationError("--family",
                               "unknown family '" + family_name_arg + "'");
  const FamilyParams p = make_params(*f, alpha, beta, xmin);
  validate(p);
  if (points < 2) throw CLI::ValidationError("--points", "need points >= 2");
  if (!(xmax > 0)) throw CLI::ValidationError("--xmax", "need xmax > 0");

  std::vector<double> grid(points);
  if (spacing == "linear") {
    for (std::size_t i = 0; i < points; ++i)
      grid[i] = xmax * static_cast<double>(i) / static_cast<double>(points - 1);
  } else if (spacing == "log") {
    const double lo = xmin * 1e-3;
    if (!(xmax > lo))
      throw CLI::ValidationError("--xmax", "log spacing needs xmax > x_min/1000");
    const double ratio = std::pow(xmax / lo, 1.0 / static_cast<double>(points - 1));
    double v = lo;
    for (std::size_t i = 0; i < points; ++i, v *= ratio) grid[i] = v;
  } else {
    throw CLI::ValidationError("--spacing", "use 'log' or 'linear'");
  }

  auto out = open_out(output);
  out << "x,pdf,cdf\n";
  for (double x : grid)
    out << num(x) << "," << num(pdf(p, x)) << "," << num(cdf(p, x)) << "\n";
  return 0;
}

int cmd_hist(const std::string& input, int bins_per_decade,
             const std::string& output) {
  if (bins_per_decade < 1)
    throw CLI::ValidationError("--bins-per-decade", "need a positive count");
  const auto values = read_value_file(input);
  if (values.empty()) throw EmptyInput("no observations in " + input);
  for (double v : values)
    if (!(v > 0))
      throw NonPositiveValue("histogram input must be positive, got " +
                             std::to_string(v));
  const double b = bins_per_decade;
  long k_lo = std::numeric_limits<long>::max();
  long k_hi = std::numeric_limits<long>::min();
  auto bin_of = [&](double v) {
    return static_cast<long>(std::floor(std::log10(v) * b));
  };
  for (double v : values) {
    const long k = bin_of(v);
    k_lo = std::min(k_lo, k);
    k_hi = std::max(k_hi, k);
  }
  std::vector<std::size_t> counts(static_cast<std::size_t>(k_hi - k_lo + 1), 0);
  for (double v : values) counts[static_cast<std::size_t>(bin_of(v) - k_lo)]++;

  auto out = open_out(output);
  out << "bin_center,density\n";
  const double n = static_cast<double>(values.size());
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] == 0) continue;
    const double k = static_cast<double>(k_lo + static_cast<long>(i));
    const double lo = std::pow(10.0, k / b);
    const double hi = std::pow(10.0, (k + 1) / b);
    const double center = std::sqrt(lo * hi);
    out << num(center) << "," << num(static_cast<double>(counts[i]) / (n * (hi - lo)))
        << "\n";
  }
  return 0;
}

int cmd_santafe(const std::string& input, std::size_t n_system,
                const std::string& output) {
  const auto degrees = read_degree_file(input);
  const auto ds = santafe::DegreeSample::from_degrees(degrees, n_system);
  const auto fitres = santafe::fit(ds);
  auto out = open_out(output);
  out << "{\n"
      << "  \"n\": " << ds.y.size() << ",\n"
      << "  \"N\": " << n_system << ",\n"
      << "  \"t_hat\": " << num(fitres.t_hat) << ",\n"
      << "  \"rho_hat\": " << num(fitres.rho_hat) << ",\n"
      << "  \"loglik\": " << num(fitres.loglik) << ",\n"
      << "  \"loglik_t_plus\": " << num(fitres.loglik_t_plus) << ",\n"
      << "  \"loglik_t_minus\": " << num(fitres.loglik_t_minus) << ",\n"
      << "  \"sign_note\": \"" << json_escape(fitres.sign_note) << "\"\n"
      << "}\n";
  std::cout << "t_hat=" << num(fitres.t_hat) << " rho_hat=" << num(fitres.rho_hat)
            << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"piecewise Pareto distributions with finite cores: maximum-"
               "likelihood fitting, evaluation and sampling"};
  app.require_subcommand(1);

  // fit
  auto* fit_cmd = app.add_subcommand("fit", "fit families to a data file");
  std::string fit_input, fit_output, fit_family = "all";
  std::optional<double> fit_xmin, fit_beta;
  fit_cmd->add_option("--input", fit_input, "input file, one value per line")
      ->required();
  fit_cmd->add_option("--family", fit_family,
                      "uni|pow|forced-pow|exp|forced-exp|alg|forced-alg|all or "
                      "a comma list");
  fit_cmd->add_option("--xmin", fit_xmin, "pin x_min instead of scanning");
  fit_cmd->add_option("--beta", fit_beta, "pin the core shape beta");
  fit_cmd->add_option("--output", fit_output, "JSON report path")->required();

  // sample
  auto* sample_cmd = app.add_subcommand("sample", "draw random variates");
  std::string s_family, s_output;
  double s_alpha = 0, s_xmin = 0;
  std::optional<double> s_beta;
  std::size_t s_count = 0;
  std::uint64_t s_seed = 0;
  sample_cmd->add_option("--family", s_family)->required();
  sample_cmd->add_option("--alpha", s_alpha)->required();
  sample_cmd->add_option("--beta", s_beta);
  sample_cmd->add_option("--xmin", s_xmin)->required();
  sample_cmd->add_option("--count", s_count)->required();
  sample_cmd->add_option("--seed", s_seed)->required();
  sample_cmd->add_option("--output", s_output)->required();

  // tabulate
  auto* tab_cmd = app.add_subcommand("tabulate", "write a pdf/cdf table");
  std::string t_family, t_output, t_spacing = "log";
  double t_alpha = 0, t_xmin = 0, t_xmax = 0;
  std::optional<double> t_beta;
  std::size_t t_points = 0;
  tab_cmd->add_option("--family", t_family)->required();
  tab_cmd->add_option("--alpha", t_alpha)->required();
  tab_cmd->add_option("--beta", t_beta);
  tab_cmd->add_option("--xmin", t_xmin)->required();
  tab_cmd->add_option("--xmax", t_xmax)->required();
  tab_cmd->add_option("--points", t_points)->required();
  tab_cmd->add_option("--spacing", t_spacing, "log or linear");
  tab_cmd->add_option("--output", t_output)->required();

  // hist
  auto* hist_cmd =
      app.add_subcommand("hist", "logarithmically binned empirical density");
  std::string h_input, h_output;
  int h_bins = 10;
  hist_cmd->add_option("--input", h_input)->required();
  hist_cmd->add_option("--bins-per-decade", h_bins)->required();
  hist_cmd->add_option("--output", h_output)->required();

  // santafe
  auto* sf_cmd = app.add_subcommand(
      "santafe", "fit the latent-propensity contact model to degrees");
  std::string sf_input, sf_output;
  std::size_t sf_n = 0;
  sf_cmd->add_option("--input", sf_input, "degree file, one integer per line")
      ->required();
  sf_cmd->add_option("--N", sf_n, "system size N")->required();
  sf_cmd->add_option("--output", sf_output)->required();

  try {
    app.parse(argc, argv);
    if (*fit_cmd)
      return cmd_fit(fit_input, fit_family, fit_xmin, fit_beta, fit_output);
    if (*sample_cmd)
      return cmd_sample(s_family, s_alpha, s_beta, s_xmin, s_count, s_seed,
                        s_output);
    if (*tab_cmd)
      return cmd_tabulate(t_family, t_alpha, t_beta, t_xmin, t_xmax, t_points,
                          t_spacing, t_output);
    if (*hist_cmd) return cmd_hist(h_input, h_bins, h_output);
    if (*sf_cmd) return cmd_santafe(sf_input, sf_n, sf_output);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  } catch (const InvalidParams& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const NoValidFit& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNoFit;
  } catch (const Error& e) {
    // parse, io, domain and ingestion problems are data errors
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}
