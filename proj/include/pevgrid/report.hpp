#ifndef PEVGRID_REPORT_HPP
#define PEVGRID_REPORT_HPP

#include "pevgrid/config.hpp"
#include "pevgrid/harness.hpp"

#include <string>
#include <vector>

namespace pevgrid::report {

// Writes summary.csv, per-slot plot data under timeseries/, and
// run_manifest.json into outdir. Reruns with the same inputs and seed
// reproduce every file byte for byte.
void emit_report(const harness::AssessmentReport& report, const config::Bundle& bundle,
                 const std::string& outdir);

// Benchmark-only variant (no scenario row).
void emit_benchmark_report(const harness::ChannelReport& benchmark,
                           const config::Bundle& bundle, const std::string& outdir);

// One row per penetration level for sweep runs.
void emit_sweep_summary(const std::vector<harness::AssessmentReport>& reports,
                        const harness::ChannelReport& benchmark, const config::Bundle& bundle,
                        const std::string& outdir);

// Canonical number formatting shared by all emitted files.
std::string format_value(double v);

} // namespace pevgrid::report

#endif
