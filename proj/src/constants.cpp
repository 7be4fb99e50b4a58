#include "freetwist/constants.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>

namespace freetwist::metric {

const std::vector<std::string>& ConstantsLedger::field_names() {
    static const std::vector<std::string> names = {
        "delta",        // thinness of the curve-graph model
        "bgim_M",       // uniform diameter bound for projected geodesics
        "power_N",      // twist power used for the realized generators
        "thin_C0",      // additive constant fed to local quasigeodesic checks
        "qi_K",         // multiplicative embedding constant of the orbit map
        "qi_C",         // additive embedding constant of the orbit map
        "stability_R0", // Hausdorff radius for quasigeodesic stability
        "local_P0",     // parameter gap enforcing projection monotonicity
        "edge_C1",      // projection bound across a tree edge
        "halfedge_C2",  // projection bound across a half edge
        "proj_C3",      // projection bound from a vertex to a crossed flat
        "bound_M1",     // off-orbit projection bound between vertex markings
        "A0",           // base truncation threshold
        "A1",           // intermediate truncation threshold
        "A2",           // final truncation threshold of the sum estimate
    };
    return names;
}

namespace {
bool known_field(std::string const& name) {
    auto const& names = ConstantsLedger::field_names();
    for (auto const& n : names)
        if (n == name) return true;
    return false;
}

std::string format_value(double v) {
    // Integral values print bare; everything else with fixed precision so
    // serialization is byte-stable.
    if (v == std::floor(v) && std::abs(v) < 1e15) {
        std::ostringstream os;
        os << static_cast<long long>(v);
        return os.str();
    }
    std::ostringstream os;
    os << std::fixed << std::setprecision(6) << v;
    return os.str();
}
} // namespace

void ConstantsLedger::set(std::string const& name, double value, bool estimated,
                          std::string provenance) {
    if (!known_field(name)) throw precondition_error("unknown ledger field: " + name);
    entries_[name] = LedgerEntry{value, estimated, std::move(provenance)};
}

bool ConstantsLedger::has(std::string const& name) const {
    return entries_.count(name) != 0;
}

LedgerEntry const& ConstantsLedger::get(std::string const& name) const {
    auto it = entries_.find(name);
    if (it == entries_.end()) throw precondition_error("ledger field not set: " + name);
    return it->second;
}

double ConstantsLedger::value(std::string const& name) const { return get(name).value; }

void ConstantsLedger::validate(double k_of_E, double k_of_R) const {
    auto close = [](double a, double b) { return std::abs(a - b) <= 1e-9 * (1.0 + std::abs(b)); };
    if (has("power_N") && has("bgim_M") && !(value("power_N") > value("bgim_M") + 5))
        throw precondition_error("power_N must exceed bgim_M + 5");
    if (has("thin_C0") && has("power_N") && has("delta") &&
        !close(value("thin_C0"), (value("power_N") + 1) * value("delta") + 2))
        throw precondition_error("thin_C0 must equal (power_N + 1)*delta + 2");
    if (has("local_P0") && has("qi_K") && has("qi_C") && has("stability_R0")) {
        double k = value("qi_K");
        double want = 2 * k * (value("qi_C") + 2 * value("stability_R0")) + k * k;
        if (!close(value("local_P0"), want))
            throw precondition_error("local_P0 must equal 2K(C+2R0)+K^2");
    }
    if (has("A0") && !(value("A0") > 8))
        throw precondition_error("A0 must exceed 8");
    if (has("A1")) {
        if (has("A0") && !(value("A1") > value("A0") + 4))
            throw precondition_error("A1 must exceed A0 + 4");
        if (!(value("A1") > 4 * k_of_E))
            throw precondition_error("A1 must exceed 4*k(E)");
    }
    if (has("A2") && has("A1") && !close(value("A2"), value("A1") - 2 * k_of_E))
        throw precondition_error("A2 must equal A1 - 2*k(E)");
    if (has("proj_C3") && has("local_P0") && has("edge_C1") && has("halfedge_C2") &&
        has("bgim_M")) {
        double want = value("local_P0") * value("edge_C1") + 2 * value("halfedge_C2") +
                      (2 * value("bgim_M") + k_of_R + 2);
        if (!close(value("proj_C3"), want))
            throw precondition_error("proj_C3 must equal P0*C1 + 2*C2 + (2M + k(R) + 2)");
    }
}

std::string ConstantsLedger::serialize() const {
    std::ostringstream os;
    for (auto const& name : field_names()) {
        auto it = entries_.find(name);
        if (it == entries_.end()) continue;
        os << name << " = " << format_value(it->second.value) << " # "
           << (it->second.estimated ? "ESTIMATED" : "CONFIGURED");
        if (!it->second.provenance.empty()) os << " " << it->second.provenance;
        os << "\n";
    }
    return os.str();
}

ConstantsLedger ConstantsLedger::parse(std::string const& text) {
    ConstantsLedger ledger;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        auto eq = line.find('=');
        auto hash = line.find('#');
        if (eq == std::string::npos || hash == std::string::npos || hash < eq)
            throw parse_error("bad ledger line: " + line);
        auto trim = [](std::string s) {
            auto b = s.find_first_not_of(" \t");
            auto e = s.find_last_not_of(" \t");
            return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
        };
        std::string name = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1, hash - eq - 1));
        std::string tail = trim(line.substr(hash + 1));
        std::string tag = tail.substr(0, tail.find(' '));
        std::string prov = tag.size() < tail.size() ? trim(tail.substr(tag.size())) : "";
        bool estimated;
        if (tag == "ESTIMATED")
            estimated = true;
        else if (tag == "CONFIGURED")
            estimated = false;
        else
            throw parse_error("bad ledger tag in line: " + line);
        ledger.set(name, std::stod(value), estimated, prov);
    }
    return ledger;
}

} // namespace freetwist::metric
