#pragma once

#include "fluidic/game_def.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fluidic {

// Built-in grid layouts offered by the design screen.
std::vector<std::string> grid_catalog_ids();
std::optional<GridLayout> grid_from_catalog(std::string_view id);

} // namespace fluidic
