#include <sstream>

#include "doctest.h"
#include "fixtures.hpp"
#include "morrey/extremal1d.hpp"
#include "morrey/io.hpp"

using namespace morrey;
using morrey::testing::dipole_2d;
using morrey::testing::three_atom_1d;

TEST_CASE("measure JSON round trip") {
    SignedMeasure rho = three_atom_1d();
    json j = measure_to_json(rho);
    CHECK(j["dim"] == 1);
    SignedMeasure back = measure_from_json(j);
    REQUIRE(back.size() == rho.size());
    for (std::size_t i = 0; i < rho.size(); ++i) {
        CHECK(back.atoms()[i].location[0] == rho.atoms()[i].location[0]);
        CHECK(back.atoms()[i].weight == rho.atoms()[i].weight);
    }

    json bad = j;
    bad["atoms"][0]["w"] = 100.0;
    CHECK_THROWS_AS(measure_from_json(bad), ValidationError);
}

TEST_CASE("similarity JSON round trip") {
    Similarity s = Similarity::planar(2.5, 0.8, true, Vec{0.1, -0.7});
    Similarity back = similarity_from_json(similarity_to_json(s));
    CHECK(back.scale() == s.scale());
    CHECK(back.shift()[0] == s.shift()[0]);
    CHECK(back.shift()[1] == s.shift()[1]);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) CHECK(back.orthogonal()(i, j) == s.orthogonal()(i, j));
}

TEST_CASE("piecewise and grid field round trips") {
    PiecewiseLinear v = extremal_1d(three_atom_1d(), Exponent(2.0, 1));
    PiecewiseLinear vb = piecewise_linear_from_json(piecewise_linear_to_json(v));
    CHECK(vb.breakpoints() == v.breakpoints());
    CHECK(vb.node_values() == v.node_values());

    PiecewiseConstant f = distribution_function(three_atom_1d());
    PiecewiseConstant fb = piecewise_constant_from_json(piecewise_constant_to_json(f));
    CHECK(fb.breakpoints() == f.breakpoints());
    CHECK(fb.values() == f.values());

    GridField g(2, 3.0, 5);
    for (std::size_t k = 0; k < g.values().size(); ++k) g.values()[k] = 0.1 * static_cast<double>(k);
    GridField gb = grid_field_from_json(grid_field_to_json(g));
    CHECK(gb.values() == g.values());
    CHECK(gb.half_width() == g.half_width());
    CHECK(gb.resolution() == g.resolution());

    auto poly = field_from_json(piecewise_linear_to_json(v));
    CHECK(poly->dim() == 1);
    auto poly2 = field_from_json(grid_field_to_json(g));
    CHECK(poly2->dim() == 2);
    CHECK_THROWS_AS(field_from_json(json{{"type", "mystery"}}), ValidationError);
}

TEST_CASE("CSV writers emit headers and rows") {
    std::ostringstream os;
    write_field_csv(os, extremal_1d(three_atom_1d(), Exponent(2.0, 1)), 11);
    std::string text = os.str();
    CHECK(text.rfind("x,u\n", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 12);

    std::ostringstream og;
    GridField g(2, 1.0, 3);
    write_grid_csv(og, g);
    std::string grid_text = og.str();
    CHECK(grid_text.rfind("x,y,u\n", 0) == 0);
    CHECK(std::count(grid_text.begin(), grid_text.end(), '\n') == 10);
}

TEST_CASE("serialized doubles are reproducible") {
    json j = measure_to_json(dipole_2d());
    CHECK(j.dump() == measure_to_json(dipole_2d()).dump());
}
