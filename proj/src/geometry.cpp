#include "hbem/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>

#include "hbem/io.hpp"

namespace hbem {

Curve Curve::ellipse(double a, double b) {
    if (!(a > 0.0) || !(b > 0.0)) {
        throw ValidationError("ellipse semi-axes must be positive");
    }
    Curve c;
    c.kind_ = Kind::ellipse;
    c.a_ = a;
    c.b_ = b;
    c.period_ = 2.0 * pi;
    return c;
}

Curve Curve::polygon(std::vector<Vec2> vertices) {
    if (vertices.size() < 3) {
        throw ValidationError("polygon needs at least three vertices");
    }
    double area2 = 0.0;
    for (std::size_t k = 0; k < vertices.size(); ++k) {
        const Vec2 p = vertices[k];
        const Vec2 q = vertices[(k + 1) % vertices.size()];
        area2 += p.x * q.y - q.x * p.y;
    }
    if (!(area2 > 0.0)) {
        throw ValidationError("polygon vertices must be in counterclockwise order");
    }
    Curve c;
    c.kind_ = Kind::polygon;
    c.vertices_ = std::move(vertices);
    double s = 0.0;
    for (std::size_t k = 0; k < c.vertices_.size(); ++k) {
        c.corners_.push_back(s);
        const double len = (c.vertices_[(k + 1) % c.vertices_.size()] - c.vertices_[k]).norm();
        if (!(len > 0.0)) {
            throw ValidationError("polygon has a degenerate edge");
        }
        s += len;
    }
    c.period_ = s;
    return c;
}

Vec2 Curve::point(double t) const {
    t = std::fmod(t, period_);
    if (t < 0.0) {
        t += period_;
    }
    if (kind_ == Kind::ellipse) {
        return {a_ * std::cos(t), b_ * std::sin(t)};
    }
    auto it = std::upper_bound(corners_.begin(), corners_.end(), t);
    const std::size_t k = static_cast<std::size_t>(std::distance(corners_.begin(), it)) - 1;
    const Vec2 p = vertices_[k];
    const Vec2 q = vertices_[(k + 1) % vertices_.size()];
    const double len = (k + 1 < corners_.size() ? corners_[k + 1] : period_) - corners_[k];
    return p + (q - p) * ((t - corners_[k]) / len);
}

std::string Curve::describe() const {
    std::ostringstream os;
    if (kind_ == Kind::ellipse) {
        os << "ellipse(a=" << io::num(a_) << ", b=" << io::num(b_) << ")";
    } else {
        os << "polygon(";
        for (std::size_t k = 0; k < vertices_.size(); ++k) {
            os << (k ? "; " : "") << io::num(vertices_[k].x) << ' ' << io::num(vertices_[k].y);
        }
        os << ")";
    }
    return os.str();
}

Mesh::Mesh(std::shared_ptr<const Curve> curve, std::vector<double> nodes, int level,
           std::vector<Lineage> lineage, std::shared_ptr<const Mesh> previous)
    : curve_(std::move(curve)),
      nodes_(std::move(nodes)),
      level_(level),
      lineage_(std::move(lineage)),
      previous_(std::move(previous)) {
    const std::size_t n = nodes_.size();
    if (n < 3) {
        throw ValidationError("mesh needs at least three elements");
    }
    if (lineage_.empty()) {
        lineage_.assign(n, Lineage{});
    }
    frames_.resize(n);
    const double period = curve_->period();
    std::vector<Vec2> pts(n);
    for (std::size_t k = 0; k < n; ++k) {
        pts[k] = curve_->point(nodes_[k]);
    }
    for (std::size_t m = 0; m < n; ++m) {
        ElementFrame& f = frames_[m];
        f.t_start = nodes_[m];
        f.t_end = m + 1 < n ? nodes_[m + 1] : nodes_[0] + period;
        if (!(f.t_end > f.t_start)) {
            throw ValidationError("mesh nodes must be strictly increasing");
        }
        f.start = pts[m];
        f.end = pts[(m + 1) % n];
        const Vec2 d = f.end - f.start;
        f.length = d.norm();
        if (!(f.length > 0.0)) {
            throw ValidationError("mesh has a zero-length element");
        }
        f.tangent = d * (1.0 / f.length);
        f.normal = {f.tangent.y, -f.tangent.x};
        f.midpoint = (f.start + f.end) * 0.5;
    }
}

double Mesh::h_max() const {
    double h = 0.0;
    for (const auto& f : frames_) h = std::max(h, f.length);
    return h;
}

double Mesh::h_min() const {
    double h = frames_.front().length;
    for (const auto& f : frames_) h = std::min(h, f.length);
    return h;
}

double Mesh::total_length() const {
    double s = 0.0;
    for (const auto& f : frames_) s += f.length;
    return s;
}

std::pair<std::size_t, double> Mesh::locate(double t) const {
    const double period = curve_->period();
    t = std::fmod(t - nodes_.front(), period);
    if (t < 0.0) {
        t += period;
    }
    t += nodes_.front();
    auto it = std::upper_bound(nodes_.begin(), nodes_.end(), t);
    std::size_t m = it == nodes_.begin() ? 0 : static_cast<std::size_t>(std::distance(nodes_.begin(), it)) - 1;
    const ElementFrame& f = frames_[m];
    const double xi = 2.0 * (t - f.t_start) / (f.t_end - f.t_start) - 1.0;
    return {m, std::clamp(xi, -1.0, 1.0)};
}

bool Mesh::contains(Vec2 p) const {
    bool inside = false;
    for (const auto& f : frames_) {
        const Vec2 a = f.start;
        const Vec2 b = f.end;
        if ((a.y > p.y) != (b.y > p.y)) {
            const double x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if (p.x < x) inside = !inside;
        }
    }
    return inside;
}

std::pair<double, std::size_t> Mesh::distance(Vec2 p) const {
    double best = std::numeric_limits<double>::infinity();
    std::size_t arg = 0;
    for (std::size_t m = 0; m < frames_.size(); ++m) {
        const ElementFrame& f = frames_[m];
        const double s = std::clamp((p - f.start).dot(f.tangent), 0.0, f.length);
        const double d = (p - (f.start + f.tangent * s)).norm();
        if (d < best) {
            best = d;
            arg = m;
        }
    }
    return {best, arg};
}

MeshPtr build_initial_mesh(std::shared_ptr<const Curve> curve, std::size_t m0) {
    if (m0 < 4) {
        throw ValidationError("initial mesh needs at least 4 elements");
    }
    std::vector<double> nodes;
    nodes.reserve(m0);
    if (curve->kind() == Curve::Kind::ellipse) {
        for (std::size_t m = 0; m < m0; ++m) {
            nodes.push_back(2.0 * pi * static_cast<double>(m) / static_cast<double>(m0));
        }
    } else {
        const auto& corners = curve->corner_parameters();
        const std::size_t edges = corners.size();
        if (m0 < edges) {
            throw ValidationError("initial mesh too coarse to place a node at every polygon corner");
        }
        std::vector<double> lengths(edges);
        for (std::size_t k = 0; k < edges; ++k) {
            lengths[k] = (k + 1 < edges ? corners[k + 1] : curve->period()) - corners[k];
        }
        std::vector<std::size_t> counts(edges);
        std::vector<double> remainder(edges);
        std::size_t assigned = 0;
        for (std::size_t k = 0; k < edges; ++k) {
            const double share = static_cast<double>(m0) * lengths[k] / curve->period();
            counts[k] = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(share)));
            remainder[k] = share - std::floor(share);
            assigned += counts[k];
        }
        std::vector<std::size_t> order(edges);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t i, std::size_t j) { return remainder[i] > remainder[j]; });
        for (std::size_t k = 0; assigned < m0; k = (k + 1) % edges) {
            ++counts[order[k]];
            ++assigned;
        }
        while (assigned > m0) {
            // Only reachable when the max(1, .) floor overshoots; trim the longest-per-element edge.
            std::size_t best = edges;
            for (std::size_t k = 0; k < edges; ++k) {
                if (counts[k] > 1 && (best == edges || counts[k] > counts[best])) best = k;
            }
            if (best == edges) {
                throw ValidationError("initial mesh too coarse to place a node at every polygon corner");
            }
            --counts[best];
            --assigned;
        }
        for (std::size_t k = 0; k < edges; ++k) {
            for (std::size_t j = 0; j < counts[k]; ++j) {
                nodes.push_back(corners[k] + lengths[k] * static_cast<double>(j) / static_cast<double>(counts[k]));
            }
        }
    }
    return std::make_shared<const Mesh>(std::move(curve), std::move(nodes), 0, std::vector<Lineage>{}, nullptr);
}

MeshPtr uniform_refine(const MeshPtr& mesh) {
    std::vector<std::size_t> all(mesh->size());
    std::iota(all.begin(), all.end(), 0);
    return bisect_elements(mesh, all);
}

MeshPtr bisect_elements(const MeshPtr& mesh, std::span<const std::size_t> marked) {
    if (marked.empty()) {
        return mesh;
    }
    std::vector<char> flag(mesh->size(), 0);
    for (std::size_t m : marked) {
        if (m >= mesh->size()) {
            throw ValidationError("bisect_elements: element id out of range");
        }
        flag[m] = 1;
    }
    std::vector<double> nodes;
    std::vector<Lineage> lineage;
    nodes.reserve(mesh->size() + marked.size());
    lineage.reserve(mesh->size() + marked.size());
    for (std::size_t m = 0; m < mesh->size(); ++m) {
        const ElementFrame& f = mesh->element(m);
        nodes.push_back(f.t_start);
        if (flag[m]) {
            nodes.push_back(0.5 * (f.t_start + f.t_end));
            lineage.push_back({static_cast<int>(m), true});
            lineage.push_back({static_cast<int>(m), true});
        } else {
            lineage.push_back({static_cast<int>(m), false});
        }
    }
    return std::make_shared<const Mesh>(mesh->curve_ptr(), std::move(nodes), mesh->level() + 1, std::move(lineage), mesh);
}

ElementFrame element_frame(const Mesh& mesh, std::size_t m) { return mesh.element(m); }

void write_mesh_csv(std::ostream& os, const Mesh& mesh) {
    os << "element_id,t_start,t_end,x_start,y_start,x_end,y_end,length,nu_x,nu_y,level\n";
    for (std::size_t m = 0; m < mesh.size(); ++m) {
        const ElementFrame& f = mesh.element(m);
        os << m << ',' << io::num(f.t_start) << ',' << io::num(f.t_end) << ',' << io::num(f.start.x) << ','
           << io::num(f.start.y) << ',' << io::num(f.end.x) << ',' << io::num(f.end.y) << ','
           << io::num(f.length) << ',' << io::num(f.normal.x) << ',' << io::num(f.normal.y) << ','
           << mesh.level() << '\n';
    }
}

}  // namespace hbem
