#include "tayopt/commands.hpp"

#include <filesystem>
#include <fstream>
#include <ostream>

#include "json.hpp"
#include "tayopt/io_util.hpp"
#include "tayopt/problem_config.hpp"
#include "tayopt/rng.hpp"

namespace tayopt {

namespace {

namespace fs = std::filesystem;

std::ofstream open_artifact(const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  return out;
}

void write_progress_line(std::ostream& log, const IterationReport& r) {
  log << "iter " << r.iteration << " best " << io::real17(r.best_db) << " dB ei "
      << io::real17(r.global_ei) << " trust " << io::real17(r.trust_half_width) << " global "
      << (r.global_evaluated ? 1 : 0) << " local " << (r.local_evaluated ? 1 : 0) << " improved "
      << (r.improved ? 1 : 0) << (r.ei_exhausted ? " exhausted" : "") << "\n";
}

}  // namespace

void write_history_csv(std::ostream& out, const RunHistory& history, const ParameterSpace& space) {
  out << "iteration,origin";
  for (const Parameter& p : space.parameters()) out << ',' << p.name;
  out << ",objective_db\n";
  for (const HistoryEntry& entry : history.entries()) {
    out << entry.iteration << ',' << origin_name(entry.origin);
    for (const double v : entry.eval.x) out << ',' << io::real17(v);
    out << ',' << io::real17(entry.eval.objective_db) << "\n";
  }
}

void write_best_json(std::ostream& out, const RunHistory& history, const ParameterSpace& space) {
  const HistoryEntry& best = history.entry(history.best_index());
  nlohmann::json doc;
  doc["parameters"] = nlohmann::json::array();
  for (std::size_t i = 0; i < space.dimension(); ++i)
    doc["parameters"].push_back(
        {{"name", space.parameter(i).name}, {"value", best.eval.x[i]}});
  doc["objective_db"] = best.eval.objective_db;
  doc["iteration"] = best.iteration;
  doc["origin"] = origin_name(best.origin);
  doc["evaluations"] = history.size();
  doc["spectrum"] = {{"freq_ghz", best.eval.spectrum.grid.values()},
                     {"re", best.eval.spectrum.re},
                     {"im", best.eval.spectrum.im},
                     {"db", to_db(best.eval.spectrum)}};
  out << doc.dump(2) << "\n";
}

int cmd_optimize(const std::string& config_path, const std::vector<std::string>& overrides,
                 std::ostream& out, std::ostream& err) {
  try {
    const ProblemConfig config = ProblemConfig::parse_file(config_path, overrides);
    const Problem problem = materialize(config);
    const fs::path dir(problem.output_dir);
    fs::create_directories(dir);

    std::ofstream progress = open_artifact(dir / "progress.log");

    RunResult result;
    try {
      OptimizationDriver driver(problem.optimizer, problem.space, *problem.solver,
                                problem.objective);
      driver.initialize();
      progress << "init evaluations " << driver.history().size() << " best "
               << io::real17(driver.history().best().objective_db) << " dB\n";
      while (!driver.finished()) {
        const IterationReport report = driver.iterate();
        result.reports.push_back(report);
        write_progress_line(progress, report);
      }
      result.history = driver.history();
    } catch (const RunAborted& abort) {
      progress << "aborted: " << abort.what() << "\n";
      if (!abort.partial_history().empty()) {
        std::ofstream history_csv = open_artifact(dir / "history.csv");
        write_history_csv(history_csv, abort.partial_history(), problem.space);
      }
      err << "run aborted: " << abort.what() << "\n";
      return kExitSolverError;
    }

    const RunHistory& history = result.history;
    progress << "done iterations " << result.reports.size() << " evaluations " << history.size()
             << " best " << io::real17(history.best().objective_db) << " dB\n";

    {
      std::ofstream history_csv = open_artifact(dir / "history.csv");
      write_history_csv(history_csv, history, problem.space);
    }
    {
      std::ofstream best_json = open_artifact(dir / "best.json");
      write_best_json(best_json, history, problem.space);
    }
    {
      std::ofstream spectrum_csv = open_artifact(dir / "best_spectrum.csv");
      write_spectrum_csv(spectrum_csv, history.best().spectrum);
    }

    out << "best " << io::real17(history.best().objective_db) << " dB after " << history.size()
        << " evaluations; artifacts in " << dir.string() << "\n";
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const SolverError& e) {
    err << "solver error: " << e.what() << "\n";
    return kExitSolverError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfigError;
  }
}

int cmd_surface(const std::string& config_path, const std::vector<std::string>& overrides,
                int resolution, std::ostream& out, std::ostream& err) {
  try {
    const ProblemConfig config = ProblemConfig::parse_file(config_path, overrides);
    const Problem problem = materialize(config);
    if (problem.space.dimension() != 2) {
      err << "surface requires a 2-parameter problem, got " << problem.space.dimension()
          << " parameters\n";
      return kExitConfigError;
    }
    if (resolution < 2) {
      err << "surface resolution must be at least 2\n";
      return kExitConfigError;
    }

    RunHistory history;
    try {
      history = initialize(problem.optimizer, problem.space, *problem.solver, problem.objective);
    } catch (const RunAborted& abort) {
      err << "run aborted: " << abort.what() << "\n";
      return kExitSolverError;
    }

    std::vector<DesignEvaluation> anchors;
    anchors.reserve(history.size());
    for (const HistoryEntry& entry : history.entries()) anchors.push_back(entry.eval);
    const GlobalSurrogate surrogate(problem.space, anchors, problem.objective);

    const fs::path dir(problem.output_dir);
    fs::create_directories(dir);
    std::ofstream csv = open_artifact(dir / "surface.csv");
    csv << problem.space.parameter(0).name << ',' << problem.space.parameter(1).name
        << ",objective_db,sigma_db\n";
    for (int i = 0; i < resolution; ++i) {
      for (int j = 0; j < resolution; ++j) {
        const std::vector<double> u = {double(i) / double(resolution - 1),
                                       double(j) / double(resolution - 1)};
        const DesignVector x = problem.space.denormalize(u);
        const GlobalSurrogate::ScalarPrediction p = surrogate.scalar(x);
        csv << io::real17(x[0]) << ',' << io::real17(x[1]) << ',' << io::real17(p.objective)
            << ',' << io::real17(p.sigma) << "\n";
      }
    }
    out << "surface of " << history.size() << " anchors on a " << resolution << "x" << resolution
        << " grid written to " << (dir / "surface.csv").string() << "\n";
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const SolverError& e) {
    err << "solver error: " << e.what() << "\n";
    return kExitSolverError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfigError;
  }
}

int cmd_check(const std::string& config_path, const std::vector<std::string>& overrides,
              std::ostream& out, std::ostream& err) {
  try {
    const ProblemConfig config = ProblemConfig::parse_file(config_path, overrides);
    const Problem problem = materialize(config);
    if (!problem.builtin_model) {
      err << "derivative check requires a builtin solver instance; external solvers have no "
             "derivative oracle\n";
      return kExitConfigError;
    }
    const ResonatorModel& model = *problem.builtin_model;
    const ParameterSpace& space = model.space();

    constexpr int kPoints = 20;
    constexpr double kFailAbove = 1e-5;
    rng::Engine eng(rng::mix(problem.optimizer.doe_seed, 0xd41fc8ecULL));
    FdCheckResult worst;
    for (int p = 0; p < kPoints; ++p) {
      std::vector<double> u(space.dimension());
      for (double& ui : u) ui = 0.01 + 0.98 * rng::uniform01(eng);
      const FdCheckResult result = fd_check(model, space.denormalize(u));
      if (result.worst_error > worst.worst_error) worst = result;
    }

    out << "checked " << kPoints << " points on '" << model.name() << "': worst relative error "
        << io::real17(worst.worst_error) << "\n";
    if (worst.worst_error > kFailAbove) {
      err << "derivative check failed: error " << io::real17(worst.worst_error)
          << " at node " << worst.node << " parameter '" << space.parameter(worst.param).name
          << "' (" << (worst.imag_part ? "im" : "re") << "), analytic "
          << io::real17(worst.analytic) << " vs finite difference " << io::real17(worst.fd)
          << "\n";
      return kExitCheckFailed;
    }
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfigError;
  }
}

}  // namespace tayopt
