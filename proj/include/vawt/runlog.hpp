#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vawt/genome.hpp"

namespace vawt {

struct RunLogRow {
    std::int64_t eval = 0;       // 1-based real-evaluation counter
    int generation = 0;          // 0 = initialization
    int species = 0;             // 0 for single-turbine runs
    Genotype genotype;
    double fitness_rpm = 0;
    double best_rpm = 0;         // best so far, non-decreasing
};

struct RunLog {
    std::map<std::string, std::string> config;  // resolved run configuration
    std::vector<RunLogRow> rows;
    Genotype champion;
    std::optional<Genotype> champion_partner;  // pair runs: the elite it was scored with
    double champion_rpm = 0;
};

std::string format_double(double v);  // shortest round-trip, to_chars

// CSV layout: `# key=value` header lines (sorted by key), one column header,
// then one row per real evaluation with the genotype double-quoted.
inline constexpr char kRunLogColumns[] = "eval,generation,species,genotype,fitness_rpm,best_rpm";

std::string format_runlog_row(const RunLogRow& row);

// Append-only writer so an interrupted run keeps every completed evaluation.
class RunLogWriter {
public:
    RunLogWriter() = default;  // in-memory only
    RunLogWriter(const std::filesystem::path& path,
                 const std::map<std::string, std::string>& config);
    void append(const RunLogRow& row);
    const std::vector<RunLogRow>& rows() const { return rows_; }

private:
    std::vector<RunLogRow> rows_;
    std::filesystem::path path_;
    bool to_file_ = false;
};

struct ParsedRunLog {
    std::map<std::string, std::string> config;
    std::string columns;
    std::vector<RunLogRow> rows;
};

ParsedRunLog parse_runlog_file(const std::filesystem::path& path);

}  // namespace vawt
