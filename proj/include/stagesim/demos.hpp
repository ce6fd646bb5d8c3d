#ifndef STAGESIM_DEMOS_HPP
#define STAGESIM_DEMOS_HPP

#include <string>
#include <vector>

namespace stagesim {

/// Names of the built-in demo scenarios, sorted.
std::vector<std::string> demo_names();

/// The JSON config of a demo; throws ConfigErrorError for unknown names.
std::string demo_config(const std::string& name);

}  // namespace stagesim

#endif  // STAGESIM_DEMOS_HPP
