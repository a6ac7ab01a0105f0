#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "binfam/commands.hpp"
#include "binfam/errors.hpp"
#include "binfam/family.hpp"
#include "binfam/params_io.hpp"
#include "binfam/sample_io.hpp"

namespace {

using binfam::ValidationError;

std::vector<int> parse_permutation(const std::string& text) {
  std::vector<int> perm;
  std::string token;
  std::istringstream ss(text);
  while (std::getline(ss, token, ',')) {
    try {
      perm.push_back(std::stoi(token) - 1);  // 1-based on the command line
    } catch (const std::exception&) {
      throw ValidationError("permutation entries must be integers");
    }
  }
  return perm;
}

void emit(const nlohmann::json& doc, const std::string& output_path) {
  if (output_path.empty()) {
    std::cout << doc.dump(2) << "\n";
    return;
  }
  std::ofstream out(output_path, std::ios::binary);
  if (!out) throw binfam::IoError("cannot open '" + output_path + "' for writing");
  out << doc.dump(2) << "\n";
}

int dispatch(int argc, char** argv) {
  CLI::App app{"binfam: fit, sample, evaluate and cross-check parametric families on {0,1}^d"};
  app.require_subcommand(1);

  // fit
  auto* fit = app.add_subcommand("fit", "fit a family to a CSV sample");
  std::string fit_family, fit_input, fit_output, fit_permute;
  binfam::FitConfig cfg;
  fit->add_option("--family", fit_family,
                  "product|linquad|expquad|logcond|gaussian_copula|poisson")
      ->required();
  fit->add_option("--input", fit_input, "sample CSV")->required();
  fit->add_option("--output", fit_output, "parameter JSON to write")->required();
  fit->add_option("--epsilon", cfg.epsilon_marginal, "extreme-mean threshold");
  fit->add_option("--delta", cfg.delta_corr, "correlation threshold for structure selection");
  fit->add_option("--penalty", cfg.penalty, "ridge penalty of the logistic regressions");
  fit->add_option("--permute", fit_permute, "comma-separated 1-based column order");

  // sample
  auto* sample = app.add_subcommand("sample", "draw rows from a parameter file");
  std::string sample_input, sample_output, sample_permute;
  std::uint64_t sample_seed = 0;
  std::size_t sample_n = 0;
  bool sample_force = false;
  sample->add_option("--input", sample_input, "parameter JSON")->required();
  sample->add_option("--output", sample_output, "CSV to write")->required();
  sample->add_option("--n", sample_n, "number of rows")->required();
  sample->add_option("--seed", sample_seed, "random seed")->required();
  sample->add_flag("--force", sample_force,
                   "clamp linquad conditionals into [0,1] instead of failing (exploratory)");
  sample->add_option("--permute", sample_permute, "proxy component order for expquad (1-based)");

  // eval
  auto* eval = app.add_subcommand("eval", "log-mass of given rows under a parameter file");
  std::string eval_input, eval_data, eval_output;
  eval->add_option("--input", eval_input, "parameter JSON")->required();
  eval->add_option("--data", eval_data, "CSV of rows to evaluate")->required();
  eval->add_option("--output", eval_output, "CSV to write")->required();

  // check
  auto* check = app.add_subcommand("check", "run the enumeration identity suite (d <= 12)");
  std::string check_input, check_family, check_output;
  std::size_t check_d = 4;
  std::uint64_t check_seed = 7;
  check->add_option("--input", check_input, "parameter JSON to check");
  check->add_option("--family", check_family, "generate random parameters for this family instead");
  check->add_option("--d", check_d, "dimension for generated parameters");
  check->add_option("--seed", check_seed, "seed for generated parameters and seeded checks");
  check->add_option("--output", check_output, "write the JSON report here instead of stdout");

  // compare
  auto* compare = app.add_subcommand("compare", "divergence report between two models or model vs sample");
  std::string cmp_a, cmp_b, cmp_sample, cmp_output;
  std::uint64_t cmp_seed = 7;
  std::size_t cmp_draws = 1000000;
  compare->add_option("--a", cmp_a, "first parameter JSON")->required();
  compare->add_option("--b", cmp_b, "second parameter JSON");
  compare->add_option("--sample", cmp_sample, "sample CSV instead of --b");
  compare->add_option("--seed", cmp_seed, "seed for empirical tables");
  compare->add_option("--draws", cmp_draws, "draws for empirical tables");
  compare->add_option("--output", cmp_output, "write the JSON report here instead of stdout");

  CLI11_PARSE(app, argc, argv);

  if (fit->parsed()) {
    binfam::SampleData data = binfam::load_sample_csv(fit_input);
    binfam::FitOptions opts;
    opts.family = fit_family;
    opts.config = cfg;
    if (!fit_permute.empty()) opts.permutation = parse_permutation(fit_permute);
    binfam::FitOutcome outcome = binfam::run_fit(data, opts);
    binfam::save_params(fit_output, outcome.params, outcome.report);
    return 0;
  }

  if (sample->parsed()) {
    const binfam::LoadedParams loaded = binfam::load_params(sample_input);
    std::optional<std::vector<int>> order;
    if (!sample_permute.empty()) {
      if (!std::holds_alternative<binfam::ExpQuParams>(loaded.params))
        throw ValidationError("--permute on sample sets the proxy component order; expquad only");
      order = parse_permutation(sample_permute);
    }
    binfam::Rng rng(sample_seed);
    const binfam::SampleBatch batch = binfam::family_sample(
        loaded.params, rng, sample_n, sample_force, order ? &*order : nullptr);
    binfam::write_sample_csv(sample_output, batch);
    return 0;
  }

  if (eval->parsed()) {
    const binfam::LoadedParams loaded = binfam::load_params(eval_input);
    if (!binfam::family_supports_eval(loaded.params))
      throw ValidationError(
          "gaussian_copula has no pointwise mass: evaluating it requires a d-dimensional "
          "orthant integral, so eval refuses this family");
    const std::vector<binfam::BinaryVector> rows = binfam::load_rows_csv(eval_data);
    std::vector<double> log_probs;
    log_probs.reserve(rows.size());
    for (const auto& row : rows)
      log_probs.push_back(binfam::family_log_eval(loaded.params, row));
    binfam::write_eval_csv(eval_output, log_probs);
    return 0;
  }

  if (check->parsed()) {
    if (check_input.empty() == check_family.empty())
      throw ValidationError("check needs exactly one of --input or --family");
    binfam::FamilyParams params =
        check_input.empty() ? binfam::random_params(check_family, check_d, check_seed)
                            : binfam::load_params(check_input).params;
    emit(binfam::run_check(params, check_seed), check_output);
    return 0;
  }

  if (compare->parsed()) {
    if (cmp_b.empty() == cmp_sample.empty())
      throw ValidationError("compare needs exactly one of --b or --sample");
    const binfam::FamilyParams a = binfam::load_params(cmp_a).params;
    nlohmann::json report;
    if (!cmp_b.empty()) {
      const binfam::FamilyParams b = binfam::load_params(cmp_b).params;
      report = binfam::run_compare(a, b, cmp_seed, cmp_draws);
    } else {
      const binfam::SampleData data = binfam::load_sample_csv(cmp_sample);
      report = binfam::run_compare_sample(a, data.sample, cmp_seed, cmp_draws);
    }
    emit(report, cmp_output);
    return 0;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return dispatch(argc, argv);
  } catch (const binfam::IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 2;
  } catch (const binfam::NegativeMassError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 4;
  } catch (const binfam::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 3;
  } catch (const binfam::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 4;
  } catch (const std::domain_error& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
