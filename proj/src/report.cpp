#include "freetwist/report.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace freetwist::report {

std::string to_string(Status s) {
    switch (s) {
        case Status::PASS: return "PASS";
        case Status::FAIL: return "FAIL";
        case Status::VACUOUS: return "VACUOUS";
    }
    return "?";
}

std::string format_double(double v) {
    if (v == 0.0) v = 0.0; // collapse negative zero
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

void Report::add_row(std::vector<std::string> cells) { rows.push_back(std::move(cells)); }

void Report::add_summary(std::string key, std::string value) {
    summary.emplace_back(std::move(key), std::move(value));
}

void Report::add_summary(std::string key, double value) {
    summary.emplace_back(std::move(key), format_double(value));
}

void Report::note(Status s) {
    if (s == Status::FAIL) verdict = Status::FAIL;
    else if (s == Status::VACUOUS && verdict == Status::PASS) verdict = Status::VACUOUS;
}

namespace {
std::string csv_cell(std::string const& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}
} // namespace

std::string Report::csv() const {
    std::string out;
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (i) out += ',';
        out += csv_cell(columns[i]);
    }
    out += '\n';
    for (auto const& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            out += csv_cell(row[i]);
        }
        out += '\n';
    }
    return out;
}

std::string Report::summary_block() const {
    std::string out = "experiment = " + experiment + "\n";
    for (auto const& [k, v] : summary) out += k + " = " + v + "\n";
    out += "verdict = " + to_string(verdict) + "\n";
    return out;
}

std::string Report::full_text() const { return csv() + "\n" + summary_block(); }

namespace {
void write_file(std::string const& path, std::string const& text) {
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw std::runtime_error("cannot write report file: " + path);
    os << text;
}
} // namespace

void Report::write_csv(std::string const& path) const { write_file(path, csv()); }
void Report::write_summary(std::string const& path) const { write_file(path, summary_block()); }

} // namespace freetwist::report
