#include "eikinetic/serialize.hpp"

#include <algorithm>
#include <numeric>

namespace eikinetic {

using nlohmann::json;

json to_json(const Vec& v) {
  json out = json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) out.push_back(v[k]);
  return out;
}

Vec vec_from_json(const json& j) {
  const auto values = j.get<std::vector<double>>();
  if (values.empty() || values.size() > kMaxDim) throw Error(ErrorKind::Parse, "vector must have 1..4 entries");
  return make_vec(std::span<const double>(values));
}

json to_json(const GridSpec& g) {
  return {{"dim", g.dim()}, {"shape", g.shape_vector()}, {"spacing", g.spacing_vector()}, {"origin", g.origin_vector()}};
}

json to_json(const DirectionSet& ds, bool include_nodes) {
  json out = {{"dim", ds.dim()}, {"count", ds.size()}, {"scheme", to_string(ds.scheme())}, {"seed", ds.seed()}};
  if (include_nodes) {
    out["nodes"] = std::vector<double>(ds.node_data().begin(), ds.node_data().end());
    out["weights"] = std::vector<double>(ds.weights().begin(), ds.weights().end());
  }
  return out;
}

DirectionSet direction_set_from_json(const json& j) {
  try {
    return DirectionSet(j.at("dim").get<int>(), j.at("nodes").get<std::vector<double>>(),
                        j.at("weights").get<std::vector<double>>(), parse_scheme(j.at("scheme").get<std::string>()),
                        j.value("seed", std::uint64_t{0}));
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Parse, std::string("direction set JSON: ") + e.what());
  }
}

json to_json(const ResidualReport& r, std::size_t max_entries) {
  std::vector<std::size_t> order(r.entries.size());
  std::iota(order.begin(), order.end(), 0);
  if (max_entries > 0 && order.size() > max_entries) {
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return std::abs(r.entries[a].value) > std::abs(r.entries[b].value);
    });
    order.resize(max_entries);
    std::sort(order.begin(), order.end());
  }
  json entries = json::array();
  for (std::size_t i : order) {
    const auto& e = r.entries[i];
    entries.push_back({{"xi_index", e.xi_index},
                       {"v_index", e.v_index},
                       {"phi_index", e.phi_index},
                       {"xi", to_json(e.xi)},
                       {"v", to_json(e.v)},
                       {"phi_center", to_json(e.phi_center)},
                       {"phi_radius", e.phi_radius},
                       {"value", e.value}});
  }
  json out = {{"max_abs", r.max_abs},
              {"tolerance", r.tolerance},
              {"verdict", to_string(r.verdict)},
              {"entry_count", r.entries.size()},
              {"entries", entries}};
  if (!r.entries.empty()) out["worst_entry"] = r.worst;
  return out;
}

json to_json(const ResidualCalibration& c) {
  return {{"tolerance", c.tolerance},
          {"constant_max", c.constant_max},
          {"vortex_max", c.vortex_max},
          {"factor", c.factor},
          {"floor", c.floor}};
}

json to_json(const OrderingReport& r) {
  return {{"pairs_tested", r.pairs_tested}, {"checks", r.checks},  {"violations", r.violations},
          {"worst_margin", r.worst_margin}, {"delta", r.delta},    {"seed", r.seed}};
}

json to_json(const TraceField& t) {
  json samples = json::array();
  for (const auto& s : t.samples) {
    json averages = json::array();
    for (const auto& a : s.averages) averages.push_back(to_json(a));
    samples.push_back({{"t", s.t},
                       {"point", to_json(s.point)},
                       {"available", s.available},
                       {"reliable", s.reliable},
                       {"value", s.available ? to_json(s.value) : json()},
                       {"averages", averages},
                       {"cauchy", s.cauchy}});
  }
  return {{"a", to_json(t.a)}, {"b", to_json(t.b)}, {"radii", t.radii},
          {"unit_tolerance", t.unit_tolerance}, {"samples", samples}};
}

json to_json(const CharacteristicPath& p) {
  json points = json::array();
  for (const auto& x : p.points) points.push_back(to_json(x));
  return {{"length", p.length}, {"chord_deviation", p.chord_deviation}, {"points", points}};
}

json to_json(const EntropyReport& r) {
  json entries = json::array();
  for (const auto& e : r.entries) {
    entries.push_back({{"phi_index", e.phi_index}, {"sharp", e.sharp}, {"smoothed", e.smoothed}});
  }
  return {{"xi", to_json(r.xi)},
          {"ks", r.ks},
          {"sharp_max", r.sharp_max},
          {"smoothed_max", r.smoothed_max},
          {"gap", r.gap},
          {"tolerance", r.tolerance},
          {"verdict", to_string(r.verdict)},
          {"entries", entries}};
}

json to_json(const CurlSymmetryReport& r) {
  return {{"max_abs", r.max_abs}, {"worst_axis", r.worst_axis}, {"evaluated_nodes", r.evaluated_nodes}};
}

json to_json(const StreamFormReport& r) {
  return {{"max_std_un", r.max_std_un},
          {"max_std_norm", r.max_std_norm},
          {"direction_defect", r.direction_defect},
          {"bins", r.bins},
          {"tolerance", r.tolerance},
          {"verdict", to_string(r.verdict)}};
}

json to_json(const LineFamilyClass& c) {
  json out = {{"tag", to_string(c.tag)}, {"residual", c.residual}, {"fit_residual", c.fit_residual}};
  if (c.point) out["point"] = to_json(*c.point);
  if (c.witness) out["witness"] = {c.witness->first, c.witness->second};
  return out;
}

json to_json(const FieldClass& c) {
  json out = {{"tag", to_string(c.tag)}, {"samples", c.samples}, {"family", to_json(c.family)}};
  if (c.tag == FieldClass::Tag::Constant) out["direction"] = to_json(c.direction);
  if (c.tag == FieldClass::Tag::Vortex) {
    out["center"] = to_json(c.center);
    out["sign"] = c.sign;
  }
  if (!c.diagnostics.empty()) out["diagnostics"] = c.diagnostics;
  return out;
}

json to_json(const UmbilicReport& r) {
  json samples = json::array();
  for (const auto& s : r.samples) {
    json e = {{"point", to_json(s.point)}, {"lambda", s.lambda}, {"deviation", s.deviation}, {"spread", s.spread}};
    if (s.center) e["center"] = to_json(*s.center);
    samples.push_back(e);
  }
  json out = {{"level", r.level},
              {"max_deviation", r.max_deviation},
              {"max_spread", r.max_spread},
              {"tolerance", r.tolerance},
              {"umbilical", r.umbilical},
              {"planar", r.planar},
              {"center_spread", r.center_spread},
              {"verdict", to_string(r.verdict)},
              {"samples", samples}};
  if (r.center_estimate) out["center_estimate"] = to_json(*r.center_estimate);
  return out;
}

json to_json(const DegreeResult& d) {
  return {{"degree", d.degree}, {"raw", d.raw}, {"integer_distance", d.integer_distance}};
}

json to_json(const EnergyBreakdown& e) {
  return {{"eps", e.eps},           {"dirichlet", e.dirichlet}, {"penalty", e.penalty},
          {"curl_term", e.curl_term}, {"total", e.total},         {"cg_iterations", e.cg_iterations}};
}

}  // namespace eikinetic
