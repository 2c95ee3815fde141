#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qres/secsla.hpp"

namespace qres::scenario {

enum class WeightProfile : std::uint8_t { AllHigh, Mixed };

struct Scenario {
  std::size_t providers = 1;
  std::size_t slos = 10;
  std::size_t levels = 4;
  std::size_t keywords = 5;
  WeightProfile profile = WeightProfile::Mixed;
  std::uint64_t seed = 1;
};

struct ScenarioData {
  secsla::SecSlaDocument template_doc;              // values empty
  std::vector<secsla::SecSlaDocument> offerings;    // one per provider
  secsla::RequirementsFile requirements;
};

// Usage if any count is zero or keywords exceed slos.
ScenarioData generate(const Scenario& s);

std::string level_name(std::size_t i);  // "level1".. for i = 0..

}  // namespace qres::scenario
