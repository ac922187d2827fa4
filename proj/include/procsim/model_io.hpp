#pragma once

#include <filesystem>
#include <string>

#include "procsim/discovery.hpp"

namespace procsim {

// JSON document holding every part of a discovered model; the contract between
// the `discover` and `simulate` commands. Round-trips exactly.
std::string model_to_json(const Mas& mas);
Mas model_from_json(const std::string& text);

void save_model(const Mas& mas, const std::filesystem::path& path);
Mas load_model(const std::filesystem::path& path);

}  // namespace procsim
