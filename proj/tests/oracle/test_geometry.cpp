#include <algorithm>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "doctest.h"
#include "hbem/geometry.hpp"

using namespace hbem;

namespace {

std::shared_ptr<const Curve> ellipse21() { return std::make_shared<const Curve>(Curve::ellipse(2.0, 1.0)); }

std::shared_ptr<const Curve> rectangle() {
    return std::make_shared<const Curve>(Curve::polygon({{0, 0}, {1, 0}, {1, 0.2}, {0, 0.2}}));
}

double ellipse_perimeter(double a, double b) {
    boost::math::quadrature::tanh_sinh<double> ts;
    auto f = [&](double t) { return std::hypot(a * std::sin(t), b * std::cos(t)); };
    return ts.integrate(f, 0.0, 2 * pi);
}

}  // namespace

TEST_CASE("initial ellipse mesh matches the tabulated sizes") {
    const MeshPtr m = build_initial_mesh(ellipse21(), 100);
    CHECK(m->size() == 100);
    CHECK(m->h_max() == doctest::Approx(0.1256).epsilon(1e-3));
    CHECK(m->h_min() == doctest::Approx(0.0629).epsilon(1e-3));
    CHECK(m->nodes()[0] == 0.0);
    CHECK(m->nodes()[1] == doctest::Approx(2 * pi / 100));
}

TEST_CASE("initial rectangle mesh is uniform") {
    const MeshPtr m = build_initial_mesh(rectangle(), 120);
    CHECK(m->size() == 120);
    CHECK(m->h_max() == doctest::Approx(0.02).epsilon(1e-12));
    CHECK(m->h_min() == doctest::Approx(0.02).epsilon(1e-12));
}

TEST_CASE("unit circle with four elements") {
    const MeshPtr m = build_initial_mesh(std::make_shared<const Curve>(Curve::ellipse(1, 1)), 4);
    for (const auto& e : m->elements()) CHECK(e.length == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("mesh preconditions") {
    CHECK_THROWS_AS(build_initial_mesh(ellipse21(), 3), ValidationError);
    CHECK_THROWS_AS(build_initial_mesh(std::make_shared<const Curve>(Curve::polygon({{0, 0}, {1, 0}, {1, 1}, {0, 1}, {-0.5, 0.5}})), 4),
                    ValidationError);
    CHECK_THROWS_AS(Curve::polygon({{0, 0}, {0, 1}, {1, 1}, {1, 0}}), ValidationError);
    CHECK_THROWS_AS(Curve::ellipse(0, 1), ValidationError);
}

TEST_CASE("uniform refinement") {
    const MeshPtr c = build_initial_mesh(ellipse21(), 100);
    const MeshPtr f = uniform_refine(c);
    REQUIRE(f->size() == 200);
    for (std::size_t m = 0; m < c->size(); ++m) {
        const auto& p = c->element(m);
        const auto& a = f->element(2 * m);
        const auto& b = f->element(2 * m + 1);
        CHECK(a.t_start == p.t_start);
        CHECK(b.t_end == doctest::Approx(p.t_end).epsilon(1e-15));
        CHECK(a.t_end == b.t_start);
        CHECK(a.length + b.length >= p.length);
        CHECK(f->lineage()[2 * m].parent == static_cast<int>(m));
        CHECK(f->lineage()[2 * m + 1].parent == static_cast<int>(m));
    }
    const MeshPtr r = build_initial_mesh(rectangle(), 120);
    const MeshPtr rf = uniform_refine(r);
    for (std::size_t m = 0; m < r->size(); ++m) {
        CHECK(rf->element(2 * m).length == doctest::Approx(r->element(m).length / 2).epsilon(1e-12));
    }
}

TEST_CASE("selective bisection") {
    const MeshPtr c = build_initial_mesh(ellipse21(), 100);
    std::vector<std::size_t> marked;
    for (std::size_t m = 0; m < 100; m += 4) marked.push_back(m);
    CHECK(bisect_elements(c, marked)->size() == 125);

    std::vector<std::size_t> all(100);
    for (std::size_t m = 0; m < 100; ++m) all[m] = m;
    CHECK(bisect_elements(c, all)->nodes() == uniform_refine(c)->nodes());

    CHECK(bisect_elements(c, std::vector<std::size_t>{}) == c);

    const MeshPtr r = build_initial_mesh(rectangle(), 120);
    const std::vector<std::size_t> one{7};
    const MeshPtr rb = bisect_elements(r, one);
    CHECK(rb->size() == 121);
    CHECK(rb->element(7).length == doctest::Approx(0.01).epsilon(1e-12));
    CHECK(rb->element(8).length == doctest::Approx(0.01).epsilon(1e-12));
    CHECK_THROWS_AS(bisect_elements(r, std::vector<std::size_t>{500}), ValidationError);
}

TEST_CASE("element frames") {
    const MeshPtr m = build_initial_mesh(ellipse21(), 100);
    const ElementFrame& e = m->element(0);
    CHECK(e.parameter(0.0) == doctest::Approx(pi / 100));
    const Vec2 mid = m->curve().point(e.parameter(0.0));
    CHECK(mid.x == doctest::Approx(2 * std::cos(pi / 100)));
    CHECK(e.point(-1.0).x == doctest::Approx(2.0));
    CHECK(e.point(1.0).x == doctest::Approx(m->curve().point(2 * pi / 100).x));
    // Node at theta = 0: the two adjacent chord normals average to (1, 0).
    const Vec2 avg = (m->element(0).normal + m->element(99).normal) * 0.5;
    CHECK(avg.y == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(avg.x > 0.99);
    const ElementFrame f = element_frame(*m, 10);
    CHECK(f.length > 0.0);

    const MeshPtr r = build_initial_mesh(rectangle(), 120);
    CHECK(r->element(3).normal.x == doctest::Approx(0.0));
    CHECK(r->element(3).normal.y == doctest::Approx(-1.0));
}

TEST_CASE("chord length converges to the perimeter at second order") {
    const double p = ellipse_perimeter(2.0, 1.0);
    CHECK(p == doctest::Approx(9.6884).epsilon(1e-4));
    double prev = 0.0;
    for (std::size_t M : {50, 100, 200, 400}) {
        const double err = std::abs(build_initial_mesh(ellipse21(), M)->total_length() - p) / p;
        if (prev > 0.0) CHECK(prev / err == doctest::Approx(4.0).epsilon(0.05));
        prev = err;
    }
}

TEST_CASE("outward orientation and containment") {
    const MeshPtr m = build_initial_mesh(ellipse21(), 64);
    for (const auto& e : m->elements()) CHECK(e.midpoint.dot(e.normal) > 0.0);
    CHECK(m->contains({0.0, 0.0}));
    CHECK(m->contains({1.9, 0.0}));
    CHECK_FALSE(m->contains({0.0, 2.0}));
    const auto [d, k] = m->distance({0.0, 0.0});
    CHECK(d == doctest::Approx(1.0).epsilon(1e-2));
    (void)k;
    const auto [mm, xi] = m->locate(m->element(5).parameter(0.25));
    CHECK(mm == 5);
    CHECK(xi == doctest::Approx(0.25));
    CHECK(m->locate(2 * pi + 1e-3).first == 0);
}

TEST_CASE("random bisection sequences keep nesting, corners and lineage") {
    std::mt19937_64 rng(17);
    auto poly = std::make_shared<const Curve>(Curve::polygon({{0, 0}, {1, 0}, {0.3, 0.8}}));
    MeshPtr mesh = build_initial_mesh(poly, 12);
    for (int level = 0; level < 6; ++level) {
        std::vector<std::size_t> marked;
        std::bernoulli_distribution pick(0.3);
        for (std::size_t m = 0; m < mesh->size(); ++m)
            if (pick(rng)) marked.push_back(m);
        if (marked.empty()) marked.push_back(0);
        const MeshPtr next = bisect_elements(mesh, marked);
        // Nodes are nested.
        for (double t : mesh->nodes()) CHECK(std::binary_search(next->nodes().begin(), next->nodes().end(), t));
        // Corners stay nodes.
        for (double c : poly->corner_parameters())
            CHECK(std::binary_search(next->nodes().begin(), next->nodes().end(), c));
        // Lineage: every old element owns one or two contiguous children that tile it.
        std::vector<int> count(mesh->size(), 0);
        for (std::size_t e = 0; e < next->size(); ++e) {
            const int p = next->lineage()[e].parent;
            REQUIRE(p >= 0);
            ++count[p];
            CHECK(next->element(e).t_start >= mesh->element(p).t_start);
            CHECK(next->element(e).t_end <= mesh->element(p).t_end + 1e-12);
        }
        std::set<std::size_t> ms(marked.begin(), marked.end());
        for (std::size_t p = 0; p < mesh->size(); ++p) CHECK(count[p] == (ms.count(p) ? 2 : 1));
        mesh = next;
    }
}

TEST_CASE("mesh csv") {
    const MeshPtr m = build_initial_mesh(rectangle(), 120);
    std::ostringstream os;
    write_mesh_csv(os, *m);
    const std::string s = os.str();
    CHECK(s.rfind("element_id,t_start,t_end,x_start,y_start,x_end,y_end,length,nu_x,nu_y,level\n", 0) == 0);
    CHECK(std::count(s.begin(), s.end(), '\n') == 121);
}
