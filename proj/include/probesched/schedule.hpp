#pragma once

#include <array>
#include <string>
#include <vector>

#include "probesched/instance.hpp"

namespace probesched {

/// Slot value for an idle probe (tests nothing).
inline constexpr Index kIdle = -1;

enum class Provenance { RTree, KT, SetCover, Manual };

const char* to_string(Provenance p);
Provenance provenance_from_string(const std::string& name);

// A deterministic schedule: `cycle` repeated forever.
struct CyclicSchedule {
  std::vector<Index> cycle;
  Provenance provenance = Provenance::Manual;
  /// Set when the generator could not certify an exact cycle.
  bool approximate = false;

  Index length() const { return static_cast<Index>(cycle.size()); }
  friend bool operator==(const CyclicSchedule&, const CyclicSchedule&) = default;
};

// The six objectives. Element operator first, then time operator, as in
// "EeMt" = weighted sum over elements of the max over time.
enum class Objective { EeEt, MtEe, EeMt, MeEt, EtMe, MeMt };

inline constexpr std::array<Objective, 6> kAllObjectives{Objective::EeEt, Objective::MtEe, Objective::EeMt,
                                                         Objective::MeEt, Objective::EtMe, Objective::MeMt};

/// "EeEt", ...
const char* to_string(Objective o);
/// Accepts any letter case ("eemt", "EeMt").
Objective objective_from_string(const std::string& name);
/// Sum family for EeEt/MtEe/EeMt, Max family otherwise.
WeightMode family(Objective o);

}  // namespace probesched
