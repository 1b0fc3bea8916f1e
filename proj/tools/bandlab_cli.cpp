// bandlab command-line front end. Talks to the shared library exclusively
// through the C API in bandlab.h.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bandlab.h"
#include "json.hpp"

namespace {

using nlohmann::json;

struct Freed {
  char* ptr = nullptr;
  ~Freed() { bandlab_string_free(ptr); }
};

int fail(const std::string& context) {
  std::cerr << "error: " << context;
  const char* detail = bandlab_last_error();
  if (detail && *detail) std::cerr << ": " << detail;
  std::cerr << "\n";
  return 1;
}

json noise_json(const std::string& family, double alpha, double sigma, int k, double delta,
                std::uint64_t seed) {
  return json{{"family", family}, {"alpha", alpha}, {"sigma", sigma},
              {"K", k},           {"delta", delta}, {"seed", seed}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bandlab: banded heavy-tail random matrix laboratory"};
  app.require_subcommand(1);

  // ---- green ----------------------------------------------------------
  auto* green = app.add_subcommand("green", "Green-function report at a z-mesh (JSON)");
  std::string g_model = "laplacian";
  std::int64_t g_n = 64;
  std::vector<double> g_energies{0.5};
  std::vector<double> g_etas{0.1};
  std::string g_pairs = "diag";
  std::string g_noise_family;
  double g_alpha = 1.0, g_sigma = 0.0, g_delta = 0.25;
  int g_k = 0;
  std::uint64_t g_seed = 1;
  std::string g_out;
  green->add_option("--model", g_model, "laplacian | beta_limit");
  green->add_option("--N", g_n, "matrix dimension")->required();
  green->add_option("--E", g_energies, "energies (repeatable)");
  green->add_option("--eta", g_etas, "imaginary parts (repeatable)");
  green->add_option("--pairs", g_pairs, "diag | band | full");
  green->add_option("--noise-family", g_noise_family,
                    "pareto | stable_cms | truncated | heavier_moment | zero");
  green->add_option("--alpha", g_alpha, "tail exponent");
  green->add_option("--sigma", g_sigma, "scaling exponent");
  green->add_option("--K", g_k, "noise bandwidth");
  green->add_option("--delta", g_delta, "heavier-moment excess");
  green->add_option("--noise-seed", g_seed, "noise seed");
  green->add_option("--out", g_out, "write the JSON report to a file");

  // ---- spectrum --------------------------------------------------------
  auto* spectrum = app.add_subcommand("spectrum", "eigenvalue statistics (CSV + JSON)");
  std::string s_model = "laplacian";
  std::int64_t s_n = 256;
  double s_kappa = 0.5;
  int s_p = 3;
  bool s_vectors = false;
  std::string s_noise_family;
  double s_alpha = 1.0, s_sigma = 0.0, s_delta = 0.25;
  int s_k = 0;
  std::uint64_t s_seed = 1;
  std::string s_prefix = "spectrum_out";
  spectrum->add_option("--model", s_model, "laplacian | beta_limit");
  spectrum->add_option("--N", s_n, "matrix dimension (even)")->required();
  spectrum->add_option("--kappa", s_kappa, "bulk window margin");
  spectrum->add_option("--p", s_p, "removal radius exponent");
  spectrum->add_flag("--vectors", s_vectors, "compute bulk eigenvectors");
  spectrum->add_option("--noise-family", s_noise_family, "noise family");
  spectrum->add_option("--alpha", s_alpha, "tail exponent");
  spectrum->add_option("--sigma", s_sigma, "scaling exponent");
  spectrum->add_option("--K", s_k, "noise bandwidth");
  spectrum->add_option("--delta", s_delta, "heavier-moment excess");
  spectrum->add_option("--noise-seed", s_seed, "noise seed");
  spectrum->add_option("--out-prefix", s_prefix, "output path prefix");

  // ---- experiment ------------------------------------------------------
  auto* experiment = app.add_subcommand("experiment", "Monte Carlo experiment driver");
  experiment->require_subcommand(1);
  auto* exp_list = experiment->add_subcommand("list", "list available experiments");
  auto* exp_run = experiment->add_subcommand("run", "run an experiment from a JSON config");
  std::string run_name;
  std::string run_config;
  std::string run_output;
  exp_run->add_option("name", run_name, "experiment name (must match the config)")->required();
  exp_run->add_option("--config", run_config, "JSON config file")->required();
  exp_run->add_option("--output-dir", run_output, "override the config output_dir");

  // ---- selftest ---------------------------------------------------------
  auto* selftest = app.add_subcommand("selftest", "deterministic invariant suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);  // prints the usage text
    return 1;
  }

  if (green->parsed()) {
    json req{{"model", g_model}, {"N", g_n},          {"energies", g_energies},
             {"etas", g_etas},   {"pairs", g_pairs}};
    if (!g_noise_family.empty()) {
      req["noise"] = noise_json(g_noise_family, g_alpha, g_sigma, g_k, g_delta, g_seed);
    }
    Freed out;
    if (bandlab_green_report(req.dump().c_str(), &out.ptr) != BANDLAB_OK) {
      return fail("green report");
    }
    if (g_out.empty()) {
      std::cout << out.ptr << "\n";
    } else {
      std::ofstream f(g_out);
      if (!f) return fail("cannot open " + g_out);
      f << out.ptr << "\n";
      std::cout << "wrote " << g_out << "\n";
    }
    return 0;
  }

  if (spectrum->parsed()) {
    json req{{"model", s_model},   {"N", s_n},
             {"kappa", s_kappa},   {"p", s_p},
             {"eigenvectors", s_vectors}, {"output_prefix", s_prefix}};
    if (!s_noise_family.empty()) {
      req["noise"] = noise_json(s_noise_family, s_alpha, s_sigma, s_k, s_delta, s_seed);
    }
    Freed out;
    if (bandlab_spectrum_report(req.dump().c_str(), &out.ptr) != BANDLAB_OK) {
      return fail("spectrum report");
    }
    std::cout << out.ptr << "\n";
    return 0;
  }

  if (exp_list->parsed()) {
    std::cout << bandlab_experiment_list();
    return 0;
  }

  if (exp_run->parsed()) {
    std::ifstream f(run_config);
    if (!f) return fail("cannot open " + run_config);
    std::stringstream buf;
    buf << f.rdbuf();
    json config;
    try {
      config = json::parse(buf.str());
    } catch (const std::exception& e) {
      std::cerr << "error: config parse: " << e.what() << "\n";
      return 1;
    }
    if (!config.contains("experiment") || config.at("experiment") != run_name) {
      std::cerr << "error: config experiment field does not match \"" << run_name << "\"\n";
      return 1;
    }
    if (!run_output.empty()) config["output_dir"] = run_output;
    Freed out;
    if (bandlab_experiment_run(config.dump().c_str(), &out.ptr) != BANDLAB_OK) {
      return fail("experiment run");
    }
    std::cout << out.ptr << "\n";
    return 0;
  }

  if (selftest->parsed()) {
    Freed log;
    const int rc = bandlab_selftest(&log.ptr);
    if (log.ptr) std::cout << log.ptr;
    if (rc == BANDLAB_OK) {
      std::cout << "selftest: all checks passed\n";
      return 0;
    }
    std::cout << "selftest: FAILED\n";
    return 2;
  }
  return 1;
}
