#include "stagesim/demos.hpp"

#include <map>

#include "stagesim/errors.hpp"

namespace stagesim {

namespace {

// A flickering mock world shared by several demos: 2 enters at stage 1,
// 1 at stage 3, 4 at stage 5. True stages are 3 and 5. The operator's
// limit set is {0, 11}; the string 10 is enumerated for a while and then
// falsified.
constexpr const char* kMockWorld = R"({
  "halting_sets": {"h": {"events": [[1, 2], [3, 1], [5, 4]], "horizon": 8}},
  "operators": {"w": {"axioms": [
    {"string": "0", "stage": 1, "in": [2]},
    {"string": "10", "stage": 1, "out": [4]},
    {"string": "11", "stage": 1, "in": [4]}
  ]}}
})";

std::string with_world(const std::string& name, const std::string& rest) {
  std::string world(kMockWorld);
  // Merge: replace the leading '{' of `rest` with the world plus a comma.
  std::string merged = world.substr(0, world.size() - 2);  // strip "})"
  merged += ",\n  \"name\": \"" + name + "\"";
  merged += rest;  // rest starts with ",\n ..." and ends with "}"
  return merged;
}

const std::map<std::string, std::string>& demo_table() {
  static const std::map<std::string, std::string> demos = {
      {"padding_basic", with_world("padding_basic", R"(,
  "horizon": 8,
  "phi_tables": {"phi0": "0000000000000000"},
  "constructions": [
    {"kind": "canonical", "id": "q", "operator": "w", "halting_set": "h"},
    {"kind": "padding_machine", "id": "m", "approximation": "q", "stages": 4},
    {"kind": "weight_real", "id": "wr", "approximation": "q"}
  ],
  "traces": [
    {"machine": "m", "class": "TOTAL"},
    {"machine": "m", "class": "ENDS_IN_ZEROS"},
    {"machine": "m", "class": "MATCHES_PHI", "phi": "phi0"},
    {"machine": "m", "class": "IN_ML_TEST", "phi": "phi0", "stage": 2},
    {"real": "wr"}
  ]
})")},
      {"totality_basic", with_world("totality_basic", R"(,
  "horizon": 8,
  "constructions": [
    {"kind": "canonical", "id": "q", "operator": "w", "halting_set": "h"},
    {"kind": "totality_machine", "id": "t", "approximation": "q", "stages": 8}
  ],
  "traces": [
    {"machine": "t", "class": "TOTAL"},
    {"machine": "t", "class": "ENDS_IN_ZEROS"}
  ]
})")},
      {"allocator_cone", R"({
  "name": "allocator_cone",
  "horizon": 4,
  "constructions": [
    {"kind": "allocation", "id": "s1", "reserved": "00",
     "targets": ["1/2^2", "3/2^3", "3/2^3", "7/2^4"]}
  ]
})"},
      {"computable_prob", R"({
  "name": "computable_prob",
  "horizon": 4,
  "constructions": [
    {"kind": "cor34", "id": "c34", "reserved": "0",
     "targets": ["1/2^3", "3/2^4", "3/2^4"]}
  ]
})"},
      {"total_prob", R"({
  "name": "total_prob",
  "horizon": 6,
  "constructions": [
    {"kind": "cor36", "id": "c36", "reserved": "00",
     "targets": ["5/2^3", "1/2^1", "1/2^1", "1/2^1", "1/2^1"]}
  ]
})"},
      {"universal_pair", R"({
  "name": "universal_pair",
  "horizon": 6,
  "constructions": [
    {"kind": "empty_approximation", "id": "qe", "stages": 6},
    {"kind": "padding_machine", "id": "p1", "approximation": "qe", "stages": 3},
    {"kind": "totality_machine", "id": "t1", "approximation": "qe", "stages": 6},
    {"kind": "universal", "id": "u", "machines": ["p1", "t1"]}
  ]
})"},
      {"splice_basic", R"({
  "name": "splice_basic",
  "horizon": 6,
  "constructions": [
    {"kind": "empty_approximation", "id": "qe", "stages": 6},
    {"kind": "totality_machine", "id": "t2", "approximation": "qe", "stages": 6},
    {"kind": "empty_machine", "id": "o", "stages": 6},
    {"kind": "splice", "id": "sp", "exponent": 2, "inner": "t2", "outer": "o"}
  ]
})"},
      {"leftce_orchestration", R"({
  "name": "leftce_orchestration",
  "horizon": 4,
  "reals": {
    "g": {"direction": "increasing",
          "values": ["0/2^0", "1/2^4", "5/2^4", "3/2^3", "3/2^3"]}
  },
  "constructions": [
    {"kind": "universal_leftce", "id": "v", "trace": "g"}
  ]
})"},
      {"dce_orchestration", R"({
  "name": "dce_orchestration",
  "horizon": 6,
  "reals": {
    "a58": {"direction": "increasing",
            "values": ["5/2^3", "5/2^3", "5/2^3", "5/2^3", "5/2^3", "5/2^3", "5/2^3"]},
    "b0": {"direction": "increasing",
           "values": ["0/2^0", "0/2^0", "0/2^0", "0/2^0", "0/2^0", "0/2^0", "0/2^0"]}
  },
  "constructions": [
    {"kind": "empty_approximation", "id": "qe6", "stages": 6},
    {"kind": "totality_machine", "id": "t0", "approximation": "qe6", "stages": 6},
    {"kind": "cone_restrict", "id": "t0c", "machine": "t0", "reserved": "0"},
    {"kind": "totality_machine", "id": "t1", "approximation": "qe6", "stages": 6},
    {"kind": "universal_dce", "id": "z", "left": "a58", "right": "b0",
     "case_tag": "right_ce", "base": ["t0c", "t1"]}
  ]
})"},
      {"rewrite_shift", R"({
  "name": "rewrite_shift",
  "horizon": 3,
  "reals": {
    "ra": {"direction": "increasing",
           "values": ["0/2^0", "1/2^3", "3/2^4", "19/2^5"]},
    "rb": {"direction": "increasing",
           "values": ["0/2^0", "0/2^0", "1/2^3", "1/2^2"]},
    "kg": {"direction": "increasing",
           "values": ["0/2^0", "1/2^3", "1/2^3", "3/2^4"]},
    "ka": {"direction": "increasing",
           "values": ["0/2^0", "1/2^2", "1/2^2", "3/2^3"]}
  },
  "constructions": [
    {"kind": "rewrite_difference", "id": "rw", "a": "ra", "b": "rb", "q": "3/2^2"},
    {"kind": "ks_search", "id": "ks", "g": "kg", "a": "ka"},
    {"kind": "shift_common", "id": "sh", "a": "ra", "b": "rb", "g": "kg"}
  ]
})"},
  };
  return demos;
}

}  // namespace

std::vector<std::string> demo_names() {
  std::vector<std::string> names;
  for (const auto& [name, cfg] : demo_table()) names.push_back(name);
  return names;
}

std::string demo_config(const std::string& name) {
  auto it = demo_table().find(name);
  if (it == demo_table().end()) {
    throw ConfigErrorError("unknown demo \"" + name + "\"");
  }
  return it->second;
}

}  // namespace stagesim
