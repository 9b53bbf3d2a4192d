#include "bff/check.hpp"

#include <sstream>

namespace bff {

const char* final_verdict_name(FinalVerdict v) {
  switch (v) {
    case FinalVerdict::Safe0Scp: return "SAFE0+SCPS";
    case FinalVerdict::SafeScp: return "SAFE+SCPS";
    case FinalVerdict::SafeOnly: return "SAFE-only";
    case FinalVerdict::Rejected: return "rejected";
  }
  return "?";
}

CheckReport check_program(const std::string& file_label, const Program& prg,
                          const OperatorRegistry& registry, int kmax) {
  CheckReport report;
  report.file = file_label;
  report.well_formed = check_well_formed(prg);
  if (!report.well_formed.empty()) {
    report.verdict = FinalVerdict::Rejected;
    return report;
  }

  Program normal = normalize(prg);
  report.safe = check_safe(normal, registry, kmax);
  report.scp = check_scps(normal, registry);

  bool safe = report.safe.verdict != SafeVerdict::NotSafe;
  if (safe && report.scp.accepted)
    report.verdict = report.safe.verdict == SafeVerdict::Safe0
                         ? FinalVerdict::Safe0Scp
                         : FinalVerdict::SafeScp;
  else if (safe)
    report.verdict = FinalVerdict::SafeOnly;
  else
    report.verdict = FinalVerdict::Rejected;
  return report;
}

nlohmann::json report_json(const CheckReport& r) {
  nlohmann::json doc;
  doc["file"] = r.file;
  doc["verdict"] = final_verdict_name(r.verdict);

  if (!r.well_formed.empty()) {
    nlohmann::json diags = nlohmann::json::array();
    for (const auto& d : r.well_formed)
      diags.push_back({{"category", diag_category_name(d.category)},
                       {"message", d.message},
                       {"at", d.span.to_string()}});
    doc["diagnostics"] = diags;
    return doc;
  }

  doc["simpleType"] = r.safe.simple_ok
                          ? r.safe.simple_type
                          : "error: " + (r.safe.type_error
                                             ? r.safe.type_error->message
                                             : std::string("unknown"));
  doc["rank"] = r.safe.rank;

  nlohmann::json procs = nlohmann::json::array();
  for (const auto& p : r.safe.procedures) {
    nlohmann::json entry;
    entry["name"] = p.name;
    if (p.sat) {
      nlohmann::json gamma;
      for (const auto& [v, t] : p.typing.gamma) gamma[v] = t;
      entry["gamma"] = gamma;
      entry["triple"] = {p.typing.triple.k, p.typing.triple.k_in,
                         p.typing.triple.k_out};
    } else {
      entry["unsat"] = true;
      entry["reason"] = p.unsat_reason;
    }
    procs.push_back(entry);
  }
  doc["procedures"] = procs;

  nlohmann::json scp = nlohmann::json::array();
  for (const auto& loop : r.scp.loops)
    scp.push_back({{"loop", loop.proc + ":" + loop.span.to_string()},
                   {"guardVar", loop.guard_var},
                   {"accepted", loop.accepted},
                   {"reason", loop.reason}});
  doc["scp"] = scp;
  return doc;
}

std::string report_text(const CheckReport& r) {
  std::ostringstream os;
  os << r.file << ": " << final_verdict_name(r.verdict) << "\n";
  if (!r.well_formed.empty()) {
    for (const auto& d : r.well_formed)
      os << "  " << d.span.to_string() << ": ["
         << diag_category_name(d.category) << "] " << d.message << "\n";
    return os.str();
  }
  if (r.safe.simple_ok) {
    os << "  simple type: " << r.safe.simple_type << "\n";
    os << "  rank: " << r.safe.rank << (r.safe.rank0 ? " (lambda-free)" : "")
       << "\n";
  } else {
    os << "  simple typing failed: "
       << (r.safe.type_error ? r.safe.type_error->message : "unknown") << "\n";
    if (r.safe.type_error && !r.safe.type_error->lhs.empty())
      os << "    " << r.safe.type_error->lhs << " vs " << r.safe.type_error->rhs
         << " at " << r.safe.type_error->span.to_string() << "\n";
  }
  for (const auto& p : r.safe.procedures) {
    if (p.sat) {
      os << "  procedure " << p.name << ": tiers ok ["
         << while_mode_name(p.mode) << "] triple (" << p.typing.triple.k << ","
         << p.typing.triple.k_in << "," << p.typing.triple.k_out << ")";
      os << " gamma {";
      bool first = true;
      for (const auto& [v, t] : p.typing.gamma) {
        if (!first) os << ", ";
        first = false;
        os << v << ":" << t;
      }
      os << "}\n";
    } else {
      os << "  procedure " << p.name << ": tier-unsat — " << p.unsat_reason
         << "\n";
    }
  }
  for (const auto& loop : r.scp.loops) {
    os << "  loop " << loop.proc << ":" << loop.span.to_string();
    if (loop.accepted)
      os << " on " << loop.guard_var << ": down-thread ok\n";
    else
      os << ": " << loop.reason << "\n";
  }
  return os.str();
}

int report_exit_code(const CheckReport& r, bool require_rank0) {
  if (!r.well_formed.empty()) return 2;
  if (require_rank0)
    return r.verdict == FinalVerdict::Safe0Scp ? 0 : 1;
  return r.verdict == FinalVerdict::Safe0Scp ||
                 r.verdict == FinalVerdict::SafeScp
             ? 0
             : 1;
}

}  // namespace bff
