// Bundled desk-scale study system: 5 buses, 6 lines, 5 thermal units, one
// aggregate load shape, one utility solar unit, and a wind bus hosting the
// IES behind a limited export corridor.
#pragma once

#include "iesmarket/market.hpp"

namespace ies {

// Deterministic leap-year (8784 h) case; identical on every build.
NetworkCase desk_case();

// Default IES wind asset for the bundled case (180 MW on bus B5).
WindAsset desk_case_wind(const NetworkCase& net);

}  // namespace ies
