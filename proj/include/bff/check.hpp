#ifndef BFF_CHECK_HPP
#define BFF_CHECK_HPP

#include <string>
#include <vector>

#include "bff/ast.hpp"
#include "bff/operators.hpp"
#include "bff/sct.hpp"
#include "bff/tier.hpp"

#include "json.hpp"

namespace bff {

enum class FinalVerdict { Safe0Scp, SafeScp, SafeOnly, Rejected };

const char* final_verdict_name(FinalVerdict v);

struct CheckReport {
  std::string file;
  std::vector<Diagnostic> well_formed;  // empty = OK
  SafeReport safe;
  ScpVerdict scp;
  FinalVerdict verdict = FinalVerdict::Rejected;
};

// Full analysis of a parsed program: well-formedness, normalization, simple
// typing + rank, per-procedure tier inference, SCP_S. kmax < 0 selects the
// per-procedure default.
CheckReport check_program(const std::string& file_label, const Program& prg,
                          const OperatorRegistry& registry, int kmax = -1);

nlohmann::json report_json(const CheckReport& r);
std::string report_text(const CheckReport& r);

// 0 when the verdict meets the bar (SAFE n SCP_S, or SAFE0 n SCP_S when
// require_rank0), 1 otherwise.
int report_exit_code(const CheckReport& r, bool require_rank0);

}  // namespace bff

#endif
