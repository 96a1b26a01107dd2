#include "probesched/schedule.hpp"

#include <algorithm>
#include <cctype>

#include "probesched/errors.hpp"

namespace probesched {

const char* to_string(Provenance p) {
  switch (p) {
    case Provenance::RTree: return "rtree";
    case Provenance::KT: return "kt";
    case Provenance::SetCover: return "setcover";
    case Provenance::Manual: return "manual";
  }
  return "manual";
}

Provenance provenance_from_string(const std::string& name) {
  if (name == "rtree") return Provenance::RTree;
  if (name == "kt") return Provenance::KT;
  if (name == "setcover") return Provenance::SetCover;
  if (name == "manual") return Provenance::Manual;
  throw ValidationError("unknown schedule provenance '" + name + "'");
}

const char* to_string(Objective o) {
  switch (o) {
    case Objective::EeEt: return "EeEt";
    case Objective::MtEe: return "MtEe";
    case Objective::EeMt: return "EeMt";
    case Objective::MeEt: return "MeEt";
    case Objective::EtMe: return "EtMe";
    case Objective::MeMt: return "MeMt";
  }
  return "?";
}

Objective objective_from_string(const std::string& name) {
  std::string lower = name;
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  for (Objective o : kAllObjectives) {
    std::string candidate = to_string(o);
    std::transform(candidate.begin(), candidate.end(), candidate.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    if (candidate == lower) return o;
  }
  throw ValidationError("unknown objective '" + name + "' (expected eeet, mtee, eemt, meet, etme or memt)");
}

WeightMode family(Objective o) {
  switch (o) {
    case Objective::EeEt:
    case Objective::MtEe:
    case Objective::EeMt: return WeightMode::Sum;
    default: return WeightMode::Max;
  }
}

}  // namespace probesched
