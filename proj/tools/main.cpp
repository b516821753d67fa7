#include <exception>
#include <iostream>

#include <CLI11.hpp>

#include "experiments.hpp"

namespace ex = symkor::experiments;

namespace {

void add_common(CLI::App* sub, ex::Config& cfg) {
  sub->add_option("--d", cfg.d, "Dimension (first of the range when --d-max is set)");
  sub->add_option("--d-max", cfg.d_max, "Last dimension of the range");
  sub->add_option("--n-min", cfg.n_min, "Smallest refinement level");
  sub->add_option("--n-max", cfg.n_max, "Largest refinement level");
  sub->add_option("--seed", cfg.seed, "Seed for every random draw");
  sub->add_option("--out", cfg.out, "CSV output path; <out>.json receives the report");
}

void add_numeric(CLI::App* sub, ex::Config& cfg) {
  sub->add_option("--target", cfg.target, "Built-in target function");
  sub->add_option("--delta", cfg.delta, "Smoothing parameter (default 2^-(2n+6))");
  sub->add_option("--quad", cfg.quad, "auto, tensor or low_discrepancy");
  sub->add_option("--quad-samples", cfg.quad_samples, "Low-discrepancy sample count");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Symmetric sparse-grid interpolation and squared-ReLU network experiments"};
  app.require_subcommand(1);
  ex::Config cfg;

  auto* counts = app.add_subcommand("counts", "Grid and orbit counts for V_n, X_n and the symmetric X_n");
  add_common(counts, cfg);

  auto* rates = app.add_subcommand("rates", "Energy-norm error of the interpolants and the network");
  add_common(rates, cfg);
  add_numeric(rates, cfg);

  auto* verify = app.add_subcommand("net-verify", "Architecture, support and symmetry checks of the networks");
  add_common(verify, cfg);
  add_numeric(verify, cfg);

  auto* fit = app.add_subcommand("gradient-fit", "Least-squares fit of the symmetric basis to gradient samples");
  add_common(fit, cfg);
  add_numeric(fit, cfg);
  fit->add_option("--samples", cfg.samples, "Sample-size schedule M");
  fit->add_option("--noise", cfg.noise, "Half-width of the uniform gradient noise");
  fit->add_option("--seeds", cfg.seeds, "Repetitions per sample size");
  fit->add_flag("--fit-interpolant", cfg.fit_interpolant, "Sample gradients of the symmetric interpolant");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    ex::Outcome outcome;
    if (counts->parsed()) {
      cfg.command = "counts";
      outcome = ex::run_counts(cfg);
    } else if (rates->parsed()) {
      cfg.command = "rates";
      outcome = ex::run_rates(cfg);
    } else if (verify->parsed()) {
      cfg.command = "net-verify";
      outcome = ex::run_net_verify(cfg);
    } else {
      cfg.command = "gradient-fit";
      outcome = ex::run_gradient_fit(cfg);
    }
    ex::write_outputs(cfg, outcome);
    for (const auto& f : outcome.failures) std::cerr << "FAILED: " << f << '\n';
    return outcome.ok() ? 0 : 1;
  } catch (const ex::UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid argument: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
