#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "liou/generators.hpp"
#include "liou/spectral.hpp"
#include "liou/types.hpp"

namespace liou {

struct ObservableSpec {
  std::string name;
  Matrix op;
};

struct ModelOptions {
  double tol_cluster = -1.0;  // negative: library default
  double tol_diag = -1.0;
  double tol_zero = 1e-8;
  double tol_stab = 1e-8;
  double kraus_cutoff = -1.0;
  std::vector<std::string> outputs;  // populations | coherences | purity
  std::vector<ObservableSpec> observables;
};

// Parsed model document. Matrices are row-major nested arrays in the file;
// complex entries are [re, im] pairs (bare numbers are accepted as reals).
struct ModelSpec {
  int dim = 0;
  Matrix hamiltonian;
  std::vector<Jump> jumps;
  std::optional<Matrix> initial_state;
  std::vector<double> times;
  ModelOptions options;

  LindbladModel lindblad() const { return LindbladModel{hamiltonian, jumps}; }
};

// Parse and fully validate a model document. Throws SchemaError (with a
// JSON-pointer-style path), ShapeMismatch, or NonHermitianHamiltonian.
ModelSpec parse_model(const std::string& text);

// Read the file at path (IoError on failure) and parse it.
ModelSpec load_model(const std::string& path);

// Flat numeric table: one row per time point.
struct TrajectoryRecord {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

// Columns: t, rho_i_j_re/im (row-major), trace, purity, then one
// <name>_re/<name>_im pair per requested observable.
TrajectoryRecord build_trajectory_record(const std::vector<double>& times,
                                         const std::vector<Matrix>& states,
                                         const std::vector<ObservableSpec>& observables);
TrajectoryRecord build_trajectory_record(const Trajectory& tr,
                                         const std::vector<ObservableSpec>& observables);

// format: "csv" (full round-trip precision) or "json" (array of row objects).
// Byte-stable for identical inputs.
std::string write_trajectory(const TrajectoryRecord& rec, const std::string& format);

// Atomic write: write to <path>.tmp, then rename over path.
void write_file(const std::string& path, const std::string& contents);

// The CLI entry point: args are the argv tail (no program name). Returns the
// process exit code; structured results go to `out`, machine-parsable error
// objects to `err`.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace liou
