#include "skyflux/core/bbox.hpp"

#include "skyflux/core/error.hpp"

namespace skyflux {

std::string to_string(Category c) {
    switch (c) {
        case Category::MovingVehicle: return "MovingVehicle";
        case Category::StationaryVehicleOrFalse: return "StationaryVehicleOrFalse";
        case Category::OtherMovingOrFalse: return "OtherMovingOrFalse";
        case Category::Building: return "Building";
        case Category::Vehicle: return "Vehicle";
        case Category::GroundTruth: return "GT";
    }
    return "Vehicle";
}

Category category_from_string(const std::string& s) {
    if (s == "MovingVehicle") return Category::MovingVehicle;
    if (s == "StationaryVehicleOrFalse") return Category::StationaryVehicleOrFalse;
    if (s == "OtherMovingOrFalse") return Category::OtherMovingOrFalse;
    if (s == "Building") return Category::Building;
    if (s == "Vehicle") return Category::Vehicle;
    if (s == "GT") return Category::GroundTruth;
    throw ParseError("unknown category: " + s);
}

} // namespace skyflux
