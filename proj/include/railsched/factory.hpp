#pragma once

#include <cstdint>

#include "railsched/network.hpp"

namespace railsched {

// Parameters for the benchmark family on the three-station corridor.
struct FamilySpec {
    int train_count = 2;     // one of {1, 2, 4, 6, 8, 10, 11, 12}
    Minutes d_max = 2;
    bool disturbed = false;  // inject delays that force rescheduling
    std::uint64_t seed = 0;  // selects which extra trains get delayed
};

// Two-train worked instance: a southbound service delayed by 5 minutes that
// shares its physical unit with the northbound return service.
Instance make_worked_example();

// Corridor family used for the scaling sweeps.  Odd trains run southbound,
// even trains northbound; trains 1, 2, 7 and 8 cover the full corridor, the
// rest shuttle inside the single-track section (a lone train always
// shuttles).  Consecutive (odd, even) index pairs share a unit at the
// southern terminus.
Instance make_family_instance(const FamilySpec& spec);

} // namespace railsched
