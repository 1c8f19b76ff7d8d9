#pragma once

#include <json.hpp>
#include <string>

#include "drlcheck/abstraction.hpp"
#include "drlcheck/checker.hpp"
#include "drlcheck/invariants.hpp"

// Result rendering. Machine reports are ordered JSON with no wall-clock
// content, so two identical runs produce byte-identical files; timings
// appear only in the human summaries.

namespace drlcheck {

using Json = nlohmann::ordered_json;

// Run parameters echoed into every machine report.
struct ReportContext {
    std::string command;  // subcommand name
    std::uint64_t seed = 0;
    unsigned threads = 1;
    double tau_lp = 1e-7;
    double tau_val = 1e-6;
    double delta_strict = kDeltaStrict;
};

// 0 unsat/proved, 1 sat/refuted, 2 unknown/exhausted.
int exit_code_for(Status s);
int exit_code_for(CheckOutcome o);

Json machine_report(const ReportContext& ctx, const AbstractVerdict& v);
Json machine_report(const ReportContext& ctx, const CheckResult& r,
                    const std::string& property_name);
Json machine_report(const ReportContext& ctx, const InvariantResult& r,
                    const std::string& template_name);

std::string render_text(const AbstractVerdict& v);
std::string render_text(const CheckResult& r, const std::string& property_name);
std::string render_text(const InvariantResult& r,
                        const std::string& template_name);

// dump(2) plus a trailing newline.
void write_report(const Json& report, const std::string& path);

}
