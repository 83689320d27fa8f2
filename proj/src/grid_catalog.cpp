#include "fluidic/grid_catalog.hpp"

namespace fluidic {

namespace {

// Roof-shaped peg centred at (x, y).
void add_peg(std::vector<Segment>& out, double x, double y) {
    out.push_back({{x - 0.3, y - 0.2}, {x, y}});
    out.push_back({{x, y}, {x + 0.3, y - 0.2}});
}

std::vector<Segment> build(std::string_view id) {
    std::vector<Segment> s;
    if (id == "empty") return s;
    if (id == "bins") {
        // Four dividers give five bins two balls wide. Coordinates are a
        // reconstruction of the Let It Snow screen, not measured values.
        for (double x : {1.8, 3.6, 5.4, 7.2}) s.push_back({{x, 0.0}, {x, 3.6}});
        return s;
    }
    if (id == "narrow_bins") {
        for (int i = 1; i <= 8; ++i) s.push_back({{double(i), 0.0}, {double(i), 2.5}});
        return s;
    }
    if (id == "funnel") {
        s.push_back({{0.0, 9.5}, {3.7, 6.5}});
        s.push_back({{9.0, 9.5}, {5.3, 6.5}});
        return s;
    }
    if (id == "shelves") {
        s.push_back({{0.0, 11.0}, {3.5, 10.2}});
        s.push_back({{9.0, 8.0}, {5.5, 7.2}});
        s.push_back({{0.0, 5.0}, {3.5, 4.2}});
        return s;
    }
    if (id == "pegs") {
        for (double x : {1.5, 3.5, 5.5, 7.5}) add_peg(s, x, 11.0);
        for (double x : {2.5, 4.5, 6.5}) add_peg(s, x, 9.0);
        for (double x : {1.5, 3.5, 5.5, 7.5}) add_peg(s, x, 7.0);
        return s;
    }
    if (id == "ramps") {
        s.push_back({{0.0, 12.5}, {6.5, 10.8}});
        s.push_back({{9.0, 8.5}, {2.5, 6.8}});
        return s;
    }
    return s;
}

} // namespace

std::vector<std::string> grid_catalog_ids() {
    return {"empty", "bins", "narrow_bins", "funnel", "shelves", "pegs", "ramps"};
}

std::optional<GridLayout> grid_from_catalog(std::string_view id) {
    for (const auto& known : grid_catalog_ids()) {
        if (known == id) return GridLayout{build(id), std::string(id)};
    }
    return std::nullopt;
}

} // namespace fluidic
