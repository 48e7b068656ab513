#pragma once

#include <json.hpp>

#include "eikinetic/energy.hpp"
#include "eikinetic/geometry.hpp"
#include "eikinetic/kinetic.hpp"
#include "eikinetic/sphere_quad.hpp"

namespace eikinetic {

nlohmann::json to_json(const Vec& v);
Vec vec_from_json(const nlohmann::json& j);

nlohmann::json to_json(const GridSpec& g);
nlohmann::json to_json(const DirectionSet& ds, bool include_nodes = true);
DirectionSet direction_set_from_json(const nlohmann::json& j);

/// `max_entries` caps the entry list (largest |value| first); 0 keeps all.
nlohmann::json to_json(const ResidualReport& r, std::size_t max_entries = 0);
nlohmann::json to_json(const ResidualCalibration& c);
nlohmann::json to_json(const OrderingReport& r);
nlohmann::json to_json(const TraceField& t);
nlohmann::json to_json(const CharacteristicPath& p);
nlohmann::json to_json(const EntropyReport& r);
nlohmann::json to_json(const CurlSymmetryReport& r);
nlohmann::json to_json(const StreamFormReport& r);
nlohmann::json to_json(const LineFamilyClass& c);
nlohmann::json to_json(const FieldClass& c);
nlohmann::json to_json(const UmbilicReport& r);
nlohmann::json to_json(const DegreeResult& d);
nlohmann::json to_json(const EnergyBreakdown& e);

}  // namespace eikinetic
