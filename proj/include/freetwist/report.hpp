#pragma once

// Deterministic experiment reports: tabular CSV rows plus an ordered
// key/value summary block ending in a verdict. Byte-identical output for
// identical inputs (fixed float formatting, no timestamps, no locale).

#include <string>
#include <utility>
#include <vector>

namespace freetwist::report {

enum class Status { PASS, FAIL, VACUOUS };

std::string to_string(Status s);

// Fixed-format numbers for reproducible reports ("%.6g", "-0" normalized).
std::string format_double(double v);

struct Report {
    std::string experiment;                // stable id token, e.g. "lemma31"
    std::vector<std::string> columns;      // CSV header
    std::vector<std::vector<std::string>> rows;
    std::vector<std::pair<std::string, std::string>> summary; // insertion order
    Status verdict = Status::PASS;

    void add_row(std::vector<std::string> cells);
    void add_summary(std::string key, std::string value);
    void add_summary(std::string key, double value);
    // FAIL dominates VACUOUS dominates PASS.
    void note(Status s);
    bool failed() const { return verdict == Status::FAIL; }

    std::string csv() const;           // header line + one line per row
    std::string summary_block() const; // "key = value" lines, then "verdict = X"
    std::string full_text() const;     // csv, blank line, summary block

    void write_csv(std::string const& path) const;
    void write_summary(std::string const& path) const;
};

} // namespace freetwist::report
