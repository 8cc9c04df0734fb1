#include "hbem/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "hbem/io.hpp"

namespace hbem {

namespace {

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

bool parse_double(std::string_view s, double& out) {
    s = trim(s);
    if (s.empty()) return false;
    if (s.front() == '+') s.remove_prefix(1);
    const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
    return res.ec == std::errc() && res.ptr == s.data() + s.size() && std::isfinite(out);
}

double number(std::string_view key, std::string_view v) {
    double x = 0.0;
    if (!parse_double(v, x)) throw ValidationError(std::string(key) + ": not a number: '" + std::string(v) + "'");
    return x;
}

long integer(std::string_view key, std::string_view v) {
    const double x = number(key, v);
    if (x != std::floor(x) || std::abs(x) > 1e12) {
        throw ValidationError(std::string(key) + ": not an integer: '" + std::string(v) + "'");
    }
    return static_cast<long>(x);
}

std::size_t count(std::string_view key, std::string_view v) {
    const long x = integer(key, v);
    if (x < 0) throw ValidationError(std::string(key) + ": must not be negative");
    return static_cast<std::size_t>(x);
}

std::vector<Vec2> parse_vertices(std::string_view v) {
    std::vector<Vec2> out;
    v = trim(v);
    while (!v.empty()) {
        const auto semi = v.find(';');
        const std::string_view item = trim(v.substr(0, semi));
        v = semi == std::string_view::npos ? std::string_view{} : trim(v.substr(semi + 1));
        if (item.empty()) continue;
        const auto sp = item.find_first_of(" \t,");
        if (sp == std::string_view::npos) throw ValidationError("geometry.vertices: expected 'x y' pairs");
        out.push_back({number("geometry.vertices", item.substr(0, sp)), number("geometry.vertices", item.substr(sp + 1))});
    }
    return out;
}

std::string format_vertices(const std::vector<Vec2>& vs) {
    std::string s;
    for (std::size_t k = 0; k < vs.size(); ++k) {
        if (k) s += "; ";
        s += io::num(vs[k].x) + " " + io::num(vs[k].y);
    }
    return s;
}

Domain parse_domain(std::string_view v) {
    if (v == "interior") return Domain::interior;
    if (v == "exterior") return Domain::exterior;
    throw ValidationError("source.domain: expected interior or exterior, got '" + std::string(v) + "'");
}

// Signed distance-free containment for the exact curve; also reports how
// close the point is to it.
struct Placement {
    bool inside;
    double distance;
};

double segment_distance(Vec2 p, Vec2 a, Vec2 b) {
    const Vec2 ab = b - a;
    const double t = std::clamp((p - a).dot(ab) / ab.dot(ab), 0.0, 1.0);
    return (p - (a + ab * t)).norm();
}

Placement place(const GeometryConfig& g, Vec2 p) {
    if (g.kind == Curve::Kind::ellipse) {
        const double r = std::hypot(p.x / g.a, p.y / g.b);
        // Distance to the ellipse by dense sampling; only used to reject sources
        // sitting on the boundary.
        double d = std::numeric_limits<double>::infinity();
        constexpr int samples = 4096;
        for (int k = 0; k < samples; ++k) {
            const double t = 2.0 * pi * k / samples;
            d = std::min(d, std::hypot(p.x - g.a * std::cos(t), p.y - g.b * std::sin(t)));
        }
        return {r < 1.0, std::abs(r - 1.0) < 1e-12 ? 0.0 : d};
    }
    bool inside = false;
    double d = std::numeric_limits<double>::infinity();
    const auto& v = g.vertices;
    for (std::size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) {
        if ((v[i].y > p.y) != (v[j].y > p.y) && p.x < (v[j].x - v[i].x) * (p.y - v[i].y) / (v[j].y - v[i].y) + v[i].x) {
            inside = !inside;
        }
        d = std::min(d, segment_distance(p, v[j], v[i]));
    }
    return {inside, d};
}

}  // namespace

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys{
        "name",           "geometry.kind",      "geometry.a",         "geometry.b",     "geometry.vertices",
        "interior.eps1",  "interior.eps2",      "exterior.eps1",      "exterior.eps2",  "k0",
        "source.domain",  "source.x",           "source.y",           "source.amplitude", "adapt.tau",
        "adapt.gamma",    "adapt.sigma",        "adapt.levels",       "mesh.m0",        "quadrature.rel_tol",
        "quadrature.max_depth", "reference.m_ref", "reference.rel_tol", "field.nx",     "field.ny",
        "field.x_min",    "field.x_max",        "field.y_min",        "field.y_max",    "output.dir"};
    return keys;
}

cplx parse_complex(std::string_view text) {
    const std::string_view s = trim(text);
    auto fail = [&] { return ValidationError("not a complex number: '" + std::string(text) + "'"); };
    if (s.empty()) throw fail();
    if (s.back() != 'i') {
        double re = 0.0;
        if (!parse_double(s, re)) throw fail();
        return re;
    }
    const std::string_view body = s.substr(0, s.size() - 1);
    // Split before the last sign that is not a leading sign or an exponent sign.
    std::size_t split = std::string_view::npos;
    for (std::size_t k = body.size(); k-- > 1;) {
        if ((body[k] == '+' || body[k] == '-') && body[k - 1] != 'e' && body[k - 1] != 'E') {
            split = k;
            break;
        }
    }
    double re = 0.0;
    std::string_view im_text = body;
    if (split != std::string_view::npos) {
        if (!parse_double(body.substr(0, split), re)) throw fail();
        im_text = body.substr(split);
    }
    double im = 0.0;
    if (im_text.empty() || im_text == "+") {
        im = 1.0;
    } else if (im_text == "-") {
        im = -1.0;
    } else if (!parse_double(im_text, im)) {
        throw fail();
    }
    return {re, im};
}

std::string format_complex(cplx z) {
    if (z.imag() == 0.0) return io::num(z.real());
    const std::string im = io::num(std::abs(z.imag())) + "i";
    if (z.real() == 0.0) return (z.imag() < 0.0 ? "-" : "") + im;
    return io::num(z.real()) + (z.imag() < 0.0 ? "-" : "+") + im;
}

std::shared_ptr<const Curve> ProblemConfig::curve() const {
    if (geometry.kind == Curve::Kind::ellipse) return std::make_shared<const Curve>(Curve::ellipse(geometry.a, geometry.b));
    return std::make_shared<const Curve>(Curve::polygon(geometry.vertices));
}

void ProblemConfig::validate() const {
    auto require = [](bool ok, const std::string& msg) {
        if (!ok) throw ValidationError(msg);
    };
    if (geometry.kind == Curve::Kind::ellipse) {
        require(geometry.a > 0.0 && geometry.b > 0.0, "geometry: ellipse semi-axes must be positive");
    } else {
        curve();  // vertex count, orientation, degenerate edges
    }
    for (const auto& [label, m] : {std::pair{"interior", &interior}, std::pair{"exterior", &exterior}}) {
        require(m->eps1().imag() >= 0.0 && m->eps2().imag() >= 0.0,
                std::string(label) + ": permittivities must have nonnegative imaginary parts");
        require(m->eps1() != cplx(0.0) && m->eps2() != cplx(0.0), std::string(label) + ": permittivities must be nonzero");
    }
    require(k0 >= 0.0, "k0: must be nonnegative");
    require(tau > 0.0, "adapt.tau: must be positive");
    require(gamma > 0.0 && gamma < 1.0, "adapt.gamma: must lie in (0, 1)");
    require(sigma >= 0.0, "adapt.sigma: must be nonnegative");
    require(levels >= 0, "adapt.levels: must be nonnegative");
    require(m0 >= 4, "mesh.m0: needs at least 4 elements");
    require(quadrature.rel_tol > 0.0, "quadrature.rel_tol: must be positive");
    require(quadrature.max_depth >= 1, "quadrature.max_depth: must be at least 1");
    require(m_ref == 0 || m_ref >= 4, "reference.m_ref: needs at least 4 elements");
    require(ref_rel_tol > 0.0, "reference.rel_tol: must be positive");
    require(field.nx == 0 || field.ny == 0 || (field.x_min < field.x_max && field.y_min < field.y_max),
            "field: empty window");
    const Placement p = place(geometry, source.location);
    const double scale = geometry.kind == Curve::Kind::ellipse ? std::max(geometry.a, geometry.b) : 1.0;
    require(p.distance > 1e-9 * scale, "source: lies on the boundary");
    require(p.inside == (source.domain == Domain::interior),
            std::string("source: location is not in the ") +
                (source.domain == Domain::interior ? "interior" : "exterior") + " domain");
}

ProblemConfig parse_config(std::string_view text) {
    ProblemConfig cfg;
    std::map<std::string, std::pair<std::string, int>> values;
    std::size_t pos = 0;
    int line_no = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        const auto hash = line.find('#');
        bool chosen = false;
        if (hash != std::string_view::npos) {
            chosen = line.substr(hash).find("default") != std::string_view::npos;
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ValidationError("line " + std::to_string(line_no) + ": expected key = value");
        }
        const std::string key(trim(line.substr(0, eq)));
        const std::string value(trim(line.substr(eq + 1)));
        const auto& keys = config_keys();
        if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
            throw ValidationError("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
        }
        if (!values.emplace(key, std::pair{value, line_no}).second) {
            throw ValidationError("line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
        }
        if (chosen) cfg.chosen_keys.insert(key);
    }
    cplx eps[4] = {cfg.interior.eps1(), cfg.interior.eps2(), cfg.exterior.eps1(), cfg.exterior.eps2()};
    for (const auto& [key, entry] : values) {
        const std::string& v = entry.first;
        try {
            if (key == "name") cfg.name = v;
            else if (key == "geometry.kind") {
                if (v == "ellipse") cfg.geometry.kind = Curve::Kind::ellipse;
                else if (v == "polygon") cfg.geometry.kind = Curve::Kind::polygon;
                else throw ValidationError("expected ellipse or polygon, got '" + v + "'");
            } else if (key == "geometry.a") cfg.geometry.a = number(key, v);
            else if (key == "geometry.b") cfg.geometry.b = number(key, v);
            else if (key == "geometry.vertices") cfg.geometry.vertices = parse_vertices(v);
            else if (key == "interior.eps1") eps[0] = parse_complex(v);
            else if (key == "interior.eps2") eps[1] = parse_complex(v);
            else if (key == "exterior.eps1") eps[2] = parse_complex(v);
            else if (key == "exterior.eps2") eps[3] = parse_complex(v);
            else if (key == "k0") cfg.k0 = number(key, v);
            else if (key == "source.domain") cfg.source.domain = parse_domain(v);
            else if (key == "source.x") cfg.source.location.x = number(key, v);
            else if (key == "source.y") cfg.source.location.y = number(key, v);
            else if (key == "source.amplitude") cfg.source.amplitude = parse_complex(v);
            else if (key == "adapt.tau") cfg.tau = number(key, v);
            else if (key == "adapt.gamma") cfg.gamma = number(key, v);
            else if (key == "adapt.sigma") cfg.sigma = number(key, v);
            else if (key == "adapt.levels") cfg.levels = static_cast<int>(integer(key, v));
            else if (key == "mesh.m0") cfg.m0 = count(key, v);
            else if (key == "quadrature.rel_tol") cfg.quadrature.rel_tol = number(key, v);
            else if (key == "quadrature.max_depth") cfg.quadrature.max_depth = static_cast<int>(integer(key, v));
            else if (key == "reference.m_ref") cfg.m_ref = count(key, v);
            else if (key == "reference.rel_tol") cfg.ref_rel_tol = number(key, v);
            else if (key == "field.nx") cfg.field.nx = count(key, v);
            else if (key == "field.ny") cfg.field.ny = count(key, v);
            else if (key == "field.x_min") cfg.field.x_min = number(key, v);
            else if (key == "field.x_max") cfg.field.x_max = number(key, v);
            else if (key == "field.y_min") cfg.field.y_min = number(key, v);
            else if (key == "field.y_max") cfg.field.y_max = number(key, v);
            else if (key == "output.dir") cfg.output_dir = v;
        } catch (const ValidationError& e) {
            const std::string msg = e.what();
            throw ValidationError("line " + std::to_string(entry.second) + ": " +
                                  (msg.rfind(key, 0) == 0 ? msg : key + ": " + msg));
        }
        cfg.explicit_keys.insert(key);
    }
    try {
        cfg.interior = MaterialPair(eps[0], eps[1]);
    } catch (const ValidationError& e) {
        throw ValidationError(std::string("interior: ") + e.what());
    }
    try {
        cfg.exterior = MaterialPair(eps[2], eps[3]);
    } catch (const ValidationError& e) {
        throw ValidationError(std::string("exterior: ") + e.what());
    }
    return cfg;
}

ProblemConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot read config file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string serialize_config(const ProblemConfig& c) {
    std::ostringstream os;
    auto kv = [&](const char* k, const std::string& v) { os << k << " = " << v << '\n'; };
    kv("name", c.name);
    kv("geometry.kind", c.geometry.kind == Curve::Kind::ellipse ? "ellipse" : "polygon");
    kv("geometry.a", io::num(c.geometry.a));
    kv("geometry.b", io::num(c.geometry.b));
    kv("geometry.vertices", format_vertices(c.geometry.vertices));
    kv("interior.eps1", format_complex(c.interior.eps1()));
    kv("interior.eps2", format_complex(c.interior.eps2()));
    kv("exterior.eps1", format_complex(c.exterior.eps1()));
    kv("exterior.eps2", format_complex(c.exterior.eps2()));
    kv("k0", io::num(c.k0));
    kv("source.domain", c.source.domain == Domain::interior ? "interior" : "exterior");
    kv("source.x", io::num(c.source.location.x));
    kv("source.y", io::num(c.source.location.y));
    kv("source.amplitude", format_complex(c.source.amplitude));
    kv("adapt.tau", io::num(c.tau));
    kv("adapt.gamma", io::num(c.gamma));
    kv("adapt.sigma", io::num(c.sigma));
    kv("adapt.levels", std::to_string(c.levels));
    kv("mesh.m0", std::to_string(c.m0));
    kv("quadrature.rel_tol", io::num(c.quadrature.rel_tol));
    kv("quadrature.max_depth", std::to_string(c.quadrature.max_depth));
    kv("reference.m_ref", std::to_string(c.m_ref));
    kv("reference.rel_tol", io::num(c.ref_rel_tol));
    kv("field.nx", std::to_string(c.field.nx));
    kv("field.ny", std::to_string(c.field.ny));
    kv("field.x_min", io::num(c.field.x_min));
    kv("field.x_max", io::num(c.field.x_max));
    kv("field.y_min", io::num(c.field.y_min));
    kv("field.y_max", io::num(c.field.y_max));
    kv("output.dir", c.output_dir);
    return os.str();
}

std::vector<Vec2> default_wedge() {
    // Two long sides of length s and a base 2 s sin(10 deg), perimeter 2.2.
    const double half = 10.0 * pi / 180.0;
    const double s = 2.2 / (2.0 + 2.0 * std::sin(half));
    const double w = s * std::sin(half);
    const double h = s * std::cos(half);
    return {{0.0, -w}, {h, 0.0}, {0.0, w}};
}

std::string example_config_text(int k) {
    std::ostringstream os;
    const std::string common_defaults =
        "adapt.tau = 0.1\n"
        "adapt.gamma = 0.5            # default: marking fraction\n"
        "adapt.sigma = 0              # default: 0 runs every level\n"
        "quadrature.rel_tol = 1e-08   # default\n"
        "quadrature.max_depth = 12    # default\n"
        "reference.rel_tol = 1e-10    # default\n";
    switch (k) {
        case 1:
            os << "# Hyperbolic ellipse in vacuum, point source at the centre.\n"
                  "name = ex1\n"
                  "geometry.kind = ellipse\ngeometry.a = 2\ngeometry.b = 1\n"
                  "interior.eps1 = 1+0.02i\ninterior.eps2 = -2+0.02i\n"
                  "exterior.eps1 = 1\nexterior.eps2 = 1\n"
                  "k0 = 1\n"
                  "source.domain = interior\nsource.x = 0\nsource.y = 0\nsource.amplitude = -1\n"
                  "adapt.levels = 4\nmesh.m0 = 100\n"
               << common_defaults
               << "reference.m_ref = 1400\n"
                  "field.nx = 81                # default\nfield.ny = 41                # default\n"
                  "field.x_min = -3             # default\nfield.x_max = 3              # default\n"
                  "field.y_min = -2             # default\nfield.y_max = 2              # default\n"
                  "output.dir = out/ex1\n";
            break;
        case 2:
            os << "# Ellipse with hyperbolic media on both sides, source above the ellipse.\n"
                  "name = ex2\n"
                  "geometry.kind = ellipse\ngeometry.a = 2\ngeometry.b = 1\n"
                  "interior.eps1 = -1+0.02i\ninterior.eps2 = 1+0.02i\n"
                  "exterior.eps1 = -4+0.05i\nexterior.eps2 = 1+0.05i\n"
                  "k0 = 1\n"
                  "source.domain = exterior\nsource.x = 0\nsource.y = 2\nsource.amplitude = -1\n"
                  "adapt.levels = 4\nmesh.m0 = 100\n"
               << common_defaults
               << "reference.m_ref = 1400        # default\n"
                  "field.nx = 81                # default\nfield.ny = 51                # default\n"
                  "field.x_min = -3             # default\nfield.x_max = 3              # default\n"
                  "field.y_min = -2.5           # default\nfield.y_max = 2.5            # default\n"
                  "output.dir = out/ex2\n";
            break;
        case 3:
            os << "# Hyperbolic rectangle (0,1)x(0,0.2) in vacuum.\n"
                  "name = ex3\n"
                  "geometry.kind = polygon\ngeometry.vertices = 0 0; 1 0; 1 0.2; 0 0.2\n"
                  "interior.eps1 = 1+0.02i\ninterior.eps2 = -3+0.1i\n"
                  "exterior.eps1 = 1\nexterior.eps2 = 1\n"
                  "k0 = 1\n"
                  "source.domain = interior\nsource.x = 0.3\nsource.y = 0.1\nsource.amplitude = -1\n"
                  "adapt.levels = 3\nmesh.m0 = 120\n"
               << common_defaults
               << "reference.m_ref = 1200        # default\n"
                  "field.nx = 85                # default\nfield.ny = 49                # default\n"
                  "field.x_min = -0.2           # default\nfield.x_max = 1.2            # default\n"
                  "field.y_min = -0.3           # default\nfield.y_max = 0.5            # default\n"
                  "output.dir = out/ex3\n";
            break;
        case 4:
            os << "# Rectangle with hyperbolic media on both sides, k0 = 2 pi.\n"
                  "name = ex4\n"
                  "geometry.kind = polygon\ngeometry.vertices = 0 0; 1 0; 1 0.2; 0 0.2\n"
                  "interior.eps1 = -1+0.02i\ninterior.eps2 = 1+0.02i\n"
                  "exterior.eps1 = -4+0.05i\nexterior.eps2 = 1+0.05i\n"
                  "k0 = 6.2831853071795862\n"
                  "source.domain = exterior\nsource.x = 0.5\nsource.y = 0.3\nsource.amplitude = -1\n"
                  "adapt.levels = 4\nmesh.m0 = 120\n"
               << common_defaults
               << "reference.m_ref = 1920\n"
                  "field.nx = 85                # default\nfield.ny = 49                # default\n"
                  "field.x_min = -0.2           # default\nfield.x_max = 1.2            # default\n"
                  "field.y_min = -0.3           # default\nfield.y_max = 0.5            # default\n"
                  "output.dir = out/ex4\n";
            break;
        case 5: {
            os << "# Hyperbolic wedge in vacuum. The wedge outline is a default: isosceles,\n"
                  "# tip angle 20 degrees, base on the y axis, perimeter 2.2.\n"
                  "name = ex5\n"
                  "geometry.kind = polygon\ngeometry.vertices = "
               << format_vertices(default_wedge())
               << "   # default\n"
                  "interior.eps1 = 2\ninterior.eps2 = -3+0.03i\n"
                  "exterior.eps1 = 1\nexterior.eps2 = 1\n"
                  "k0 = 1\n"
                  "source.domain = interior\nsource.x = 0.1\nsource.y = 0.1\nsource.amplitude = -1\n"
                  "adapt.levels = 3\nmesh.m0 = 220\n"
               << common_defaults
               << "reference.m_ref = 1760        # default\n"
                  "field.nx = 81                # default\nfield.ny = 33                # default\n"
                  "field.x_min = -0.1           # default\nfield.x_max = 1.0            # default\n"
                  "field.y_min = -0.3           # default\nfield.y_max = 0.3            # default\n"
                  "output.dir = out/ex5\n";
            break;
        }
        default:
            throw ValidationError("examples are numbered 1 to 5");
    }
    return os.str();
}

std::vector<std::filesystem::path> write_example_configs(const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    std::vector<std::filesystem::path> out;
    for (int k = 1; k <= 5; ++k) {
        const auto path = dir / ("ex" + std::to_string(k) + ".cfg");
        std::ofstream f(path, std::ios::binary);
        f << example_config_text(k);
        if (!f) throw std::runtime_error("cannot write " + path.string());
        out.push_back(path);
    }
    return out;
}

}  // namespace hbem
