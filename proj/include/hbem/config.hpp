#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "hbem/field.hpp"
#include "hbem/geometry.hpp"
#include "hbem/kernels.hpp"
#include "hbem/quadrature.hpp"

namespace hbem {

struct GeometryConfig {
    Curve::Kind kind = Curve::Kind::ellipse;
    double a = 2.0;
    double b = 1.0;
    std::vector<Vec2> vertices;  // polygon, counterclockwise
};

/// A complete problem description. Text form: one `key = value` per line,
/// dotted keys, `#` comments, complex numbers written as a+bi.
struct ProblemConfig {
    std::string name = "problem";
    GeometryConfig geometry;
    MaterialPair interior{cplx(1.0, 0.02), cplx(-2.0, 0.02)};
    MaterialPair exterior;
    double k0 = 1.0;
    PointSource source{{0.0, 0.0}, cplx(-1.0), Domain::interior};
    double tau = 0.1;
    double gamma = 0.5;
    double sigma = 0.0;  // 0: run all levels
    int levels = 4;      // last level index L
    std::size_t m0 = 100;
    AdaptiveBudget quadrature{1e-8, 0.0, 12};
    std::size_t m_ref = 0;  // 0: no reference solve
    double ref_rel_tol = 1e-10;
    FieldGrid field;
    std::string output_dir = "out";

    /// Keys that were present in the parsed text; everything else is defaulted.
    std::set<std::string> explicit_keys;
    /// Keys whose line carries a comment containing "default": chosen values
    /// rather than given ones.
    std::set<std::string> chosen_keys;

    bool is_defaulted(const std::string& key) const {
        return !explicit_keys.count(key) || chosen_keys.count(key);
    }

    std::shared_ptr<const Curve> curve() const;
    KernelContext interior_context() const { return {interior, k0}; }
    KernelContext exterior_context() const { return {exterior, k0}; }

    /// Throws ValidationError naming the offending key.
    void validate() const;
};

/// All recognized keys, in serialization order.
const std::vector<std::string>& config_keys();

cplx parse_complex(std::string_view text);
std::string format_complex(cplx z);

ProblemConfig parse_config(std::string_view text);
ProblemConfig load_config(const std::filesystem::path& path);
/// Canonical text with every key.
std::string serialize_config(const ProblemConfig& cfg);

/// Default isosceles wedge (tip angle 20 degrees, base on the y axis, tip on
/// the positive x axis, perimeter 2.2).
std::vector<Vec2> default_wedge();

/// Text of example k (1..5) with comments marking values chosen here rather
/// than given by the examples themselves.
std::string example_config_text(int k);
/// Writes ex1.cfg ... ex5.cfg into dir; returns the written paths.
std::vector<std::filesystem::path> write_example_configs(const std::filesystem::path& dir);

}  // namespace hbem
