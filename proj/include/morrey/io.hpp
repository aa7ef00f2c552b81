#pragma once

#include <iosfwd>
#include <memory>
#include <span>
#include <string>

#include "json.hpp"
#include "morrey/analysis.hpp"
#include "morrey/fields.hpp"
#include "morrey/measure.hpp"
#include "morrey/seminorm.hpp"
#include "morrey/solver.hpp"

namespace morrey {

using json = nlohmann::json;

// Measure spec: {"dim": n, "atoms": [{"y": [..], "w": ..}, ...]}
json measure_to_json(const SignedMeasure& rho);
SignedMeasure measure_from_json(const json& j);

// Similarity spec: {"scale": .., "orthogonal": [[..]], "shift": [..]}
json similarity_to_json(const Similarity& s);
Similarity similarity_from_json(const json& j);

json piecewise_linear_to_json(const PiecewiseLinear& f);
PiecewiseLinear piecewise_linear_from_json(const json& j);
json piecewise_constant_to_json(const PiecewiseConstant& f);
PiecewiseConstant piecewise_constant_from_json(const json& j);
json grid_field_to_json(const GridField& f);
GridField grid_field_from_json(const json& j);

// Dispatch on the "type" tag ("piecewise_linear" or "grid").
std::unique_ptr<ScalarField> field_from_json(const json& j);

json load_json(const std::string& path);
void save_json(const std::string& path, const json& j);

// Dense samples "x,u" over the region (plus one tail sample on each side).
void write_field_csv(std::ostream& os, const PiecewiseLinear& f, int samples);
// Grid rows "x,y[,z],u".
void write_grid_csv(std::ostream& os, const GridField& f);
// Search trace rows: scale, orthogonal entries, shift, ratio.
void write_trace_csv(std::ostream& os, std::span<const TraceEntry> trace);

}  // namespace morrey
