#pragma once

#include <cstddef>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hbem/types.hpp"

namespace hbem {

/// Closed, simple, positively oriented boundary curve. Ellipses are
/// parametrized by angle on [0, 2pi); polygons by arc length from the first
/// vertex.
class Curve {
public:
    enum class Kind { ellipse, polygon };

    static Curve ellipse(double a, double b);
    /// Vertices in counterclockwise order; the closing edge is implicit.
    static Curve polygon(std::vector<Vec2> vertices);

    Kind kind() const { return kind_; }
    double period() const { return period_; }
    Vec2 point(double t) const;

    double semi_axis_a() const { return a_; }
    double semi_axis_b() const { return b_; }
    const std::vector<Vec2>& vertices() const { return vertices_; }
    /// Arc-length parameter of every vertex (polygon only), first is 0.
    const std::vector<double>& corner_parameters() const { return corners_; }

    std::string describe() const;

private:
    Kind kind_ = Kind::ellipse;
    double period_ = 0.0;
    double a_ = 0.0;
    double b_ = 0.0;
    std::vector<Vec2> vertices_;
    std::vector<double> corners_;
};

/// Flat element data; the element is the chord between two curve points.
struct ElementFrame {
    Vec2 start;
    Vec2 end;
    Vec2 midpoint;
    Vec2 tangent;
    Vec2 normal;  // outward unit normal of the chord
    double length = 0.0;
    double t_start = 0.0;
    double t_end = 0.0;

    /// Affine map [-1, 1] -> chord; Jacobian length / 2.
    Vec2 point(double xi) const { return midpoint + tangent * (0.5 * length * xi); }
    double parameter(double xi) const { return 0.5 * (t_start + t_end) + 0.5 * xi * (t_end - t_start); }
};

/// Record of where an element came from in the previous mesh.
struct Lineage {
    int parent = -1;     // element index in the previous mesh, -1 at level 0
    bool split = false;  // false: carried over unchanged
};

/// Immutable snapshot of a boundary mesh. Node parameters are strictly
/// increasing, start at 0 and stay below the curve period; element m joins
/// node m to node m+1 (cyclically).
class Mesh {
public:
    Mesh(std::shared_ptr<const Curve> curve, std::vector<double> nodes, int level,
         std::vector<Lineage> lineage, std::shared_ptr<const Mesh> previous);

    const Curve& curve() const { return *curve_; }
    std::shared_ptr<const Curve> curve_ptr() const { return curve_; }
    std::size_t size() const { return frames_.size(); }
    std::size_t node_count() const { return nodes_.size(); }
    const std::vector<double>& nodes() const { return nodes_; }
    const ElementFrame& element(std::size_t m) const { return frames_[m]; }
    std::span<const ElementFrame> elements() const { return frames_; }
    int level() const { return level_; }
    const std::vector<Lineage>& lineage() const { return lineage_; }
    const std::shared_ptr<const Mesh>& previous() const { return previous_; }

    double h_max() const;
    double h_min() const;
    double total_length() const;

    /// Next node index of element m's end point.
    std::size_t end_node(std::size_t m) const { return m + 1 == size() ? 0 : m + 1; }
    /// Element containing curve parameter t and the local coordinate in
    /// [-1, 1], affine in the parameter.
    std::pair<std::size_t, double> locate(double t) const;

    /// Mesh-polygon containment (ray casting against the chords).
    bool contains(Vec2 p) const;
    /// Distance from p to the polygon of chords, and the nearest element.
    std::pair<double, std::size_t> distance(Vec2 p) const;

private:
    std::shared_ptr<const Curve> curve_;
    std::vector<double> nodes_;
    std::vector<ElementFrame> frames_;
    int level_;
    std::vector<Lineage> lineage_;
    std::shared_ptr<const Mesh> previous_;
};

using MeshPtr = std::shared_ptr<const Mesh>;

/// Ellipse: nodes at theta_m = 2 pi m / M0. Polygon: every vertex is a node,
/// nodes evenly spaced in arc length along each edge, edge counts by largest
/// remainder of M0 * edge / perimeter.
MeshPtr build_initial_mesh(std::shared_ptr<const Curve> curve, std::size_t m0);

/// Split every element at its parameter midpoint. Children of coarse element
/// m are fine elements 2m and 2m+1.
MeshPtr uniform_refine(const MeshPtr& mesh);

/// Split the marked elements at their parameter midpoints.
MeshPtr bisect_elements(const MeshPtr& mesh, std::span<const std::size_t> marked);

ElementFrame element_frame(const Mesh& mesh, std::size_t m);

/// CSV: element_id,t_start,t_end,x_start,y_start,x_end,y_end,length,nu_x,nu_y,level
void write_mesh_csv(std::ostream& os, const Mesh& mesh);

}  // namespace hbem
