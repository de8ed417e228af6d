#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "rearing/analysis/analysis.hpp"
#include "rearing/probe/probe.hpp"

namespace rearing::analysis {

struct NamedRdm {
    std::string name;
    Rdm rdm;
};

struct NamedLda {
    std::string name;
    LdaProjection proj;
    std::vector<int> labels;  // class of each projected point
};

struct ReportFiles {
    std::vector<std::filesystem::path> written;
};

// Writes the summary tables and figures for one pipeline run:
//   accuracy_per_fold.csv, accuracy_summary.csv
//   accuracy_<scheme>.svg        bar chart with chance and chick lines
//   rdm_<name>_{dissimilarity,similarity}.{csv,svg}
//   lda_<name>.{csv,svg}
// File names depend only on the inputs, and reruns with identical inputs
// produce byte-identical files. The summary gains a supervised-vs-chick
// delta column when an imported-baseline report is present.
ReportFiles emit_report(const std::vector<probe::EvalReport>& reports,
                        const std::vector<NamedRdm>& rdms, const std::vector<NamedLda>& ldas,
                        const std::filesystem::path& out_dir);

// Minimal reader for the CSVs above (no quoting; fields never hold commas).
std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path);

}  // namespace rearing::analysis
