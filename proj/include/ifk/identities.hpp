#pragma once

#include <string>
#include <vector>

namespace ifk {

// One exact identity evaluated on an enumerable instance.
// Passing means value < bound, or value > bound for negative controls.
// Informational rows are reported and never fail.
struct IdentityCheck {
    int group = 0;
    std::string name;
    double value = 0;
    double bound = 0;
    bool control = false;
    bool info = false;
    bool pass() const;
};

// groups 1..8, in this order
std::vector<IdentityCheck> kw_duality_checks();
std::vector<IdentityCheck> high_temperature_checks();
std::vector<IdentityCheck> loop_weight_checks();
std::vector<IdentityCheck> observable_relation_checks();
std::vector<IdentityCheck> parafermion_checks();
std::vector<IdentityCheck> martingale_checks();
std::vector<IdentityCheck> h_field_checks();
std::vector<IdentityCheck> representation_checks();

std::vector<IdentityCheck> all_identity_checks();
std::string identity_group_name(int group);

}  // namespace ifk
