#include "morrey/io.hpp"

#include <fstream>
#include <ostream>

namespace morrey {

json measure_to_json(const SignedMeasure& rho) {
    json atoms = json::array();
    for (const Atom& a : rho.atoms()) {
        json y = json::array();
        for (int d = 0; d < rho.dim(); ++d) y.push_back(a.location[d]);
        atoms.push_back({{"y", y}, {"w", a.weight}});
    }
    return {{"dim", rho.dim()}, {"atoms", atoms}};
}

SignedMeasure measure_from_json(const json& j) {
    int dim = j.at("dim").get<int>();
    if (dim < 1 || dim > 3)
        throw ValidationError(ErrorCode::InvalidField, "measure dim must be 1, 2 or 3");
    std::vector<Atom> atoms;
    for (const json& a : j.at("atoms")) {
        const json& y = a.at("y");
        if (static_cast<int>(y.size()) != dim)
            throw ValidationError(ErrorCode::InvalidField, "atom location size mismatch");
        Vec loc(dim);
        for (int d = 0; d < dim; ++d) loc[d] = y.at(static_cast<std::size_t>(d)).get<double>();
        atoms.push_back({loc, a.at("w").get<double>()});
    }
    return validate_measure(std::move(atoms));
}

json similarity_to_json(const Similarity& s) {
    json rows = json::array();
    for (int i = 0; i < s.dim(); ++i) {
        json row = json::array();
        for (int j2 = 0; j2 < s.dim(); ++j2) row.push_back(s.orthogonal()(i, j2));
        rows.push_back(row);
    }
    json shift = json::array();
    for (int d = 0; d < s.dim(); ++d) shift.push_back(s.shift()[d]);
    return {{"scale", s.scale()}, {"orthogonal", rows}, {"shift", shift}};
}

Similarity similarity_from_json(const json& j) {
    const json& rows = j.at("orthogonal");
    int n = static_cast<int>(rows.size());
    Mat o(n);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k)
            o(i, k) = rows.at(static_cast<std::size_t>(i)).at(static_cast<std::size_t>(k)).get<double>();
    const json& sh = j.at("shift");
    Vec z(n);
    for (int d = 0; d < n; ++d) z[d] = sh.at(static_cast<std::size_t>(d)).get<double>();
    return Similarity(j.at("scale").get<double>(), o, z);
}

json piecewise_linear_to_json(const PiecewiseLinear& f) {
    return {{"type", "piecewise_linear"},
            {"breakpoints", f.breakpoints()},
            {"values", f.node_values()}};
}

PiecewiseLinear piecewise_linear_from_json(const json& j) {
    return PiecewiseLinear(j.at("breakpoints").get<std::vector<double>>(),
                           j.at("values").get<std::vector<double>>());
}

json piecewise_constant_to_json(const PiecewiseConstant& f) {
    return {{"type", "piecewise_constant"},
            {"breakpoints", f.breakpoints()},
            {"values", f.values()}};
}

PiecewiseConstant piecewise_constant_from_json(const json& j) {
    return PiecewiseConstant(j.at("breakpoints").get<std::vector<double>>(),
                             j.at("values").get<std::vector<double>>());
}

json grid_field_to_json(const GridField& f) {
    return {{"type", "grid"},
            {"dim", f.dim()},
            {"half_width", f.half_width()},
            {"resolution", f.resolution()},
            {"values", f.values()}};
}

GridField grid_field_from_json(const json& j) {
    return GridField(j.at("dim").get<int>(), j.at("half_width").get<double>(),
                     j.at("resolution").get<int>(), j.at("values").get<std::vector<double>>());
}

std::unique_ptr<ScalarField> field_from_json(const json& j) {
    std::string type = j.value("type", "piecewise_linear");
    if (type == "piecewise_linear")
        return std::make_unique<PiecewiseLinear>(piecewise_linear_from_json(j));
    if (type == "grid") return std::make_unique<GridField>(grid_field_from_json(j));
    throw ValidationError(ErrorCode::InvalidField, "unknown field type: " + type);
}

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    json j;
    in >> j;
    return j;
}

void save_json(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << j.dump(2) << "\n";
}

void write_field_csv(std::ostream& os, const PiecewiseLinear& f, int samples) {
    os << "x,u\n";
    const auto& bp = f.breakpoints();
    double margin = std::max(1.0, bp.back() - bp.front());
    double lo = bp.front() - 0.25 * margin, hi = bp.back() + 0.25 * margin;
    os.precision(17);
    for (int i = 0; i < samples; ++i) {
        double x = samples == 1 ? lo : lo + (hi - lo) * i / (samples - 1);
        os << x << "," << f.value(x) << "\n";
    }
}

void write_grid_csv(std::ostream& os, const GridField& f) {
    const int m = f.resolution();
    os << (f.dim() == 2 ? "x,y,u\n" : "x,y,z,u\n");
    os.precision(17);
    for (int k = 0; k < (f.dim() == 3 ? m : 1); ++k)
        for (int j = 0; j < m; ++j)
            for (int i = 0; i < m; ++i) {
                Vec x = f.node(i, j, k);
                os << x[0] << "," << x[1];
                if (f.dim() == 3) os << "," << x[2];
                os << "," << f.values()[f.index(i, j, k)] << "\n";
            }
}

void write_trace_csv(std::ostream& os, std::span<const TraceEntry> trace) {
    if (trace.empty()) {
        os << "scale,shift,ratio\n";
        return;
    }
    int n = trace.front().similarity.dim();
    os << "scale";
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) os << ",o" << i << j;
    for (int d = 0; d < n; ++d) os << ",z" << d;
    os << ",ratio\n";
    os.precision(17);
    for (const TraceEntry& t : trace) {
        os << t.similarity.scale();
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) os << "," << t.similarity.orthogonal()(i, j);
        for (int d = 0; d < n; ++d) os << "," << t.similarity.shift()[d];
        os << "," << t.ratio << "\n";
    }
}

}  // namespace morrey
