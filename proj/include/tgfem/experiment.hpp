#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "tgfem/analysis.hpp"
#include "tgfem/twogrid.hpp"

namespace tgfem {

enum class CouplingKind { H2, H32, Ratio };

/// How the fine mesh follows the coarse one: h = H^2, h = H^{3/2}, or a fixed
/// refinement ratio.
struct Coupling {
  CouplingKind kind = CouplingKind::H2;
  int ratio = 0;

  /// Accepts "h2", "h32" or "ratio=<int>"; throws std::invalid_argument.
  static Coupling parse(std::string_view text);
  std::string label() const;
  /// Refinement ratio H/h for a coarse mesh with H = 1/coarse_n.  Throws
  /// std::invalid_argument when coarse_n is not a perfect square under h32.
  int ratio_for(int coarse_n) const;
};

struct RunSpec {
  int dim = 2;
  std::string problem;
  Coupling coupling;
  std::vector<int> coarse_n;
  NormKind norm = NormKind::H1;
  IterationConfig iteration;
  LocalRhs local_rhs = LocalRhs::Interpolated;
  /// OpenMP threads; 0 keeps the runtime default.
  int threads = 0;
  /// CSV destination; empty writes to the provided stream.
  std::string out;
  /// Optional JSON report with per-iteration history.
  std::string json_out;
};

/// Invalid run specification.  Every issue names the offending field.
class SpecError : public std::runtime_error {
 public:
  explicit SpecError(std::vector<std::string> issues);
  const std::vector<std::string>& issues() const { return issues_; }

 private:
  std::vector<std::string> issues_;
};

/// Thrown by parse_spec for --help; carries the usage text.
class HelpRequested : public std::runtime_error {
 public:
  explicit HelpRequested(const std::string& usage) : std::runtime_error(usage) {}
};

/// Parses command-line arguments (without the program name).  A --config JSON
/// file is read first and any flag given on the command line overrides it.
RunSpec parse_spec(const std::vector<std::string>& args);

/// Runs one two-grid solve per coarse_n, in order, and measures the errors.
/// Progress lines go to `log` when it is non-null.
ConvergenceReport run(const RunSpec& spec, std::ostream* log = nullptr);

void write_csv(const ConvergenceReport& report, std::ostream& out);
void write_json(const ConvergenceReport& report, const RunSpec& spec, std::ostream& out);

std::string_view norm_name(NormKind norm);
std::string_view local_rhs_name(LocalRhs form);

/// Full command-line entry point; returns the process exit code
/// (0 success, 1 invalid specification, 2 solver failure).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tgfem
