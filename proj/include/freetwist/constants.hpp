#pragma once
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "freetwist/errors.hpp"

namespace freetwist::metric {

// One tracked constant: its value, whether it was chosen or measured, and a
// short note on where it came from (sample description for measured values).
struct LedgerEntry {
    double value = 0.0;
    bool estimated = false;     // false = CONFIGURED, true = ESTIMATED
    std::string provenance;     // e.g. "farey ball cap 24, 500 geodesics"
};

// The named constants threaded through the whole pipeline. Serialized as one
//   name = value # CONFIGURED|ESTIMATED <provenance>
// line per field, in fixed field order.
class ConstantsLedger {
public:
    static const std::vector<std::string>& field_names();

    void set(std::string const& name, double value, bool estimated,
             std::string provenance = {});
    bool has(std::string const& name) const;
    LedgerEntry const& get(std::string const& name) const;
    double value(std::string const& name) const;

    // Derived-field consistency (throws precondition_error on violation):
    //  - thin_C0 == (power_N + 1) * delta + 2
    //  - power_N > bgim_M + 5
    //  - local_P0 == 2*qi_K*(qi_C + 2*stability_R0) + qi_K^2
    //  - A1 > A0 + 4, A1 > 4*k_of_E, A2 == A1 - 2*k_of_E, A0 > 8
    //  - proj_C3 == local_P0*edge_C1 + 2*halfedge_C2 + (2*bgim_M + k_of_R + 2)
    // Only fields that are present are checked.
    void validate(double k_of_E, double k_of_R) const;

    std::string serialize() const;
    static ConstantsLedger parse(std::string const& text);

private:
    std::map<std::string, LedgerEntry> entries_;
};

} // namespace freetwist::metric
