#include "tayopt/external_solver.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace tayopt {

namespace {

// POSIX single-quote escaping: close the quote, emit an escaped quote,
// reopen. Keeps arbitrary paths intact through sh -c.
std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (const char c : s) {
    if (c == '\'')
      out += "'\\''";
    else
      out += c;
  }
  out += "'";
  return out;
}

std::vector<double> read_number_array(const nlohmann::json& j, const char* field,
                                      std::size_t expected, const DesignVector& x) {
  if (!j.contains(field))
    throw SolverError(std::string("solver response is missing field '") + field + "'", x);
  const nlohmann::json& arr = j.at(field);
  if (!arr.is_array())
    throw SolverError(std::string("solver response field '") + field + "' is not an array", x);
  if (arr.size() != expected)
    throw SolverError(std::string("solver response field '") + field + "' has " +
                          std::to_string(arr.size()) + " entries, expected " +
                          std::to_string(expected),
                      x);
  std::vector<double> out;
  out.reserve(expected);
  for (const nlohmann::json& v : arr) {
    if (!v.is_number())
      throw SolverError(std::string("solver response field '") + field +
                            "' contains a non-numeric entry",
                        x);
    const double value = v.get<double>();
    if (!std::isfinite(value))
      throw SolverError(std::string("solver response field '") + field +
                            "' contains a non-finite entry",
                        x);
    out.push_back(value);
  }
  return out;
}

}  // namespace

FileProtocolSolver::FileProtocolSolver(std::string command, std::string workdir,
                                       ParameterSpace space, FrequencyGrid grid)
    : command_(std::move(command)),
      workdir_(std::move(workdir)),
      space_(std::move(space)),
      grid_(std::move(grid)) {
  if (command_.empty()) throw std::invalid_argument("solver command must not be empty");
  if (workdir_.empty()) workdir_ = ".";
}

SolverResponse FileProtocolSolver::compute(const DesignVector& x) const {
  space_.require_in_bounds(x);
  const std::size_t m = grid_.size();
  const std::size_t d = space_.dimension();

  const std::uint64_t call = call_counter_.fetch_add(1);
  const std::string request_name = "request-" + std::to_string(call) + ".json";
  const std::string response_name = "response-" + std::to_string(call) + ".json";
  const std::filesystem::path request_path = std::filesystem::path(workdir_) / request_name;
  const std::filesystem::path response_path = std::filesystem::path(workdir_) / response_name;

  nlohmann::json request;
  request["parameters"] = nlohmann::json::array();
  for (std::size_t i = 0; i < d; ++i)
    request["parameters"].push_back({{"name", space_.parameter(i).name}, {"value", x[i]}});
  request["frequencies_ghz"] = grid_.values();

  {
    std::ofstream out(request_path);
    if (!out) throw SolverError("cannot write solver request " + request_path.string(), x);
    out << request.dump(2) << '\n';
  }
  std::error_code ignored;
  std::filesystem::remove(response_path, ignored);

  const std::string shell = "cd " + shell_quote(workdir_) + " && " + command_ + " " +
                            shell_quote(request_name) + " " + shell_quote(response_name);
  const int rc = std::system(("sh -c " + shell_quote(shell)).c_str());
  if (rc != 0)
    throw SolverError("solver command failed with status " + std::to_string(rc) + ": " + command_,
                      x);

  nlohmann::json response;
  {
    std::ifstream in(response_path);
    if (!in) throw SolverError("solver wrote no response file " + response_path.string(), x);
    try {
      response = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& err) {
      throw SolverError(std::string("solver response is not valid JSON: ") + err.what(), x);
    }
  }

  SolverResponse out;
  out.spectrum.grid = grid_;
  out.spectrum.re = read_number_array(response, "re", m, x);
  out.spectrum.im = read_number_array(response, "im", m, x);
  out.deriv.nodes = m;
  out.deriv.params = d;
  out.deriv.re = read_number_array(response, "d_re", m * d, x);
  out.deriv.im = read_number_array(response, "d_im", m * d, x);

  std::filesystem::remove(request_path, ignored);
  std::filesystem::remove(response_path, ignored);
  return out;
}

}  // namespace tayopt
