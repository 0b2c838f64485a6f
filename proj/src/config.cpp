#include "robinlab/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "robinlab/errors.hpp"

namespace robinlab {

namespace {

using nlohmann::json;

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
    if (!j.is_object()) throw InvalidArgument(where + ": expected an object");
    for (const auto& [key, value] : j.items())
        if (!allowed.count(key)) throw InvalidArgument(where + ": unknown field '" + key + "'");
}

template <class T>
T get_field(const json& j, const std::string& key, const std::string& where) {
    if (!j.contains(key)) throw InvalidArgument(where + ": missing field '" + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw InvalidArgument(where + "." + key + ": " + e.what());
    }
}

template <class T>
T get_or(const json& j, const std::string& key, T fallback, const std::string& where) {
    return j.contains(key) ? get_field<T>(j, key, where) : fallback;
}

double finite(double v, const std::string& where) {
    if (!std::isfinite(v)) throw InvalidArgument(where + ": value must be finite");
    return v;
}

FunctionConfig parse_function(const json& j, const std::string& where) {
    check_keys(j, {"kind", "k", "scale"}, where);
    FunctionConfig f;
    f.kind = get_field<std::string>(j, "kind", where);
    static const std::set<std::string> kinds{"constant", "cos", "sin", "x", "y"};
    if (!kinds.count(f.kind)) throw InvalidArgument(where + ": unknown function kind '" + f.kind + "'");
    f.k = get_or<int>(j, "k", 1, where);
    f.scale = finite(get_or<double>(j, "scale", 1.0, where), where + ".scale");
    return f;
}

json function_to_json(const FunctionConfig& f) {
    json j{{"kind", f.kind}, {"scale", f.scale}};
    if (f.kind == "cos" || f.kind == "sin") j["k"] = f.k;
    return j;
}

BoundaryFunction make_function(const FunctionConfig& f) {
    const double s = f.scale;
    const int k = f.k;
    if (f.kind == "constant") return [s](const Point&) { return s; };
    if (f.kind == "cos") return [s, k](const Point& p) { return s * std::cos(k * std::atan2(p[1], p[0])); };
    if (f.kind == "sin") return [s, k](const Point& p) { return s * std::sin(k * std::atan2(p[1], p[0])); };
    if (f.kind == "x") return [s](const Point& p) { return s * p[0]; };
    if (f.kind == "y") return [s](const Point& p) { return s * p[1]; };
    throw InvalidArgument("unknown function kind '" + f.kind + "'");
}

int parse_mode(const std::string& key, const std::string& where) {
    std::size_t used = 0;
    int k = 0;
    try {
        k = std::stoi(key, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != key.size() || key.empty()) throw InvalidArgument(where + ": mode key '" + key + "' is not an integer");
    return k;
}

BoundaryConfig parse_boundary(const json& j) {
    const std::string where = "boundary_operator";
    if (!j.is_object()) throw InvalidArgument(where + ": expected an object");
    BoundaryConfig b;
    b.type = get_field<std::string>(j, "type", where);
    if (b.type == "zero") {
        check_keys(j, {"type"}, where);
    } else if (b.type == "multiplication") {
        check_keys(j, {"type", "beta"}, where);
        b.function = parse_function(get_field<json>(j, "beta", where), where + ".beta");
    } else if (b.type == "rank_one") {
        check_keys(j, {"type", "v"}, where);
        b.function = parse_function(get_field<json>(j, "v", where), where + ".v");
    } else if (b.type == "kernel") {
        check_keys(j, {"type", "kernel"}, where);
        const json k = get_field<json>(j, "kernel", where);
        check_keys(k, {"kind", "width", "scale"}, where + ".kernel");
        b.kernel.kind = get_field<std::string>(k, "kind", where + ".kernel");
        if (b.kernel.kind != "gaussian" && b.kernel.kind != "constant")
            throw InvalidArgument(where + ".kernel: unknown kind '" + b.kernel.kind + "'");
        b.kernel.width = finite(get_or<double>(k, "width", 1.0, where), where + ".kernel.width");
        b.kernel.scale = finite(get_or<double>(k, "scale", 1.0, where), where + ".kernel.scale");
        if (!(b.kernel.width > 0.0)) throw InvalidArgument(where + ".kernel.width must be positive");
    } else if (b.type == "rotation_commutator") {
        check_keys(j, {"type", "angle"}, where);
        b.angle = finite(get_field<double>(j, "angle", where), where + ".angle");
    } else if (b.type == "convolution") {
        check_keys(j, {"type", "q_hat"}, where);
        const json q = get_field<json>(j, "q_hat", where);
        if (!q.is_object()) throw InvalidArgument(where + ".q_hat: expected an object of mode -> value");
        for (const auto& [key, value] : q.items()) {
            if (!value.is_number()) throw InvalidArgument(where + ".q_hat." + key + ": expected a number");
            b.q_hat[parse_mode(key, where + ".q_hat")] = finite(value.get<double>(), where + ".q_hat." + key);
        }
    } else if (b.type == "explicit_matrix") {
        check_keys(j, {"type", "entries"}, where);
        b.entries = get_field<std::vector<std::vector<double>>>(j, "entries", where);
        for (const auto& row : b.entries) {
            if (row.size() != b.entries.size()) throw InvalidArgument(where + ".entries: matrix must be square");
            for (double v : row) finite(v, where + ".entries");
        }
        if (b.entries.empty()) throw InvalidArgument(where + ".entries: empty matrix");
    } else {
        throw InvalidArgument(where + ": unknown type '" + b.type + "'");
    }
    return b;
}

json boundary_to_json(const BoundaryConfig& b) {
    json j{{"type", b.type}};
    if (b.type == "multiplication") j["beta"] = function_to_json(b.function);
    if (b.type == "rank_one") j["v"] = function_to_json(b.function);
    if (b.type == "kernel") j["kernel"] = {{"kind", b.kernel.kind}, {"width", b.kernel.width}, {"scale", b.kernel.scale}};
    if (b.type == "rotation_commutator") j["angle"] = b.angle;
    if (b.type == "convolution") {
        json q = json::object();
        for (const auto& [k, v] : b.q_hat) q[std::to_string(k)] = v;
        j["q_hat"] = q;
    }
    if (b.type == "explicit_matrix") j["entries"] = b.entries;
    return j;
}

void dump_into(std::ostringstream& os, const json& j, int indent) {
    const std::string pad(static_cast<std::size_t>(indent + 2), ' ');
    const std::string close(static_cast<std::size_t>(indent), ' ');
    switch (j.type()) {
        case json::value_t::object: {
            if (j.empty()) {
                os << "{}";
                return;
            }
            os << "{\n";
            bool first = true;
            for (const auto& [key, value] : j.items()) {
                if (!first) os << ",\n";
                first = false;
                os << pad << json(key).dump() << ": ";
                dump_into(os, value, indent + 2);
            }
            os << "\n" << close << "}";
            return;
        }
        case json::value_t::array: {
            if (j.empty()) {
                os << "[]";
                return;
            }
            // Arrays of scalars stay on one line.
            const bool flat = std::all_of(j.begin(), j.end(), [](const json& e) { return e.is_primitive(); });
            os << "[";
            bool first = true;
            for (const auto& value : j) {
                if (!first) os << ",";
                first = false;
                if (!flat) os << "\n" << pad;
                dump_into(os, value, indent + 2);
            }
            if (!flat) os << "\n" << close;
            os << "]";
            return;
        }
        case json::value_t::number_float: {
            const double v = j.get<double>();
            if (!std::isfinite(v)) {
                os << "null";
                return;
            }
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.17g", v);
            os << buf;
            return;
        }
        default:
            os << j.dump();
    }
}

}  // namespace

ProblemConfig parse_config(const json& j) {
    check_keys(j, {"domain", "coefficient", "boundary_operator", "seed", "output_dir"}, "config");
    ProblemConfig c;

    const json d = get_field<json>(j, "domain", "config");
    if (!d.is_object() || d.size() != 1) throw InvalidArgument("domain: expected exactly one of 'interval' or 'disk'");
    if (d.contains("interval")) {
        const json& i = d.at("interval");
        check_keys(i, {"a", "b", "n"}, "domain.interval");
        IntervalDomain dom;
        dom.a = finite(get_field<double>(i, "a", "domain.interval"), "domain.interval.a");
        dom.b = finite(get_field<double>(i, "b", "domain.interval"), "domain.interval.b");
        dom.n = get_field<int>(i, "n", "domain.interval");
        c.domain = dom;
    } else if (d.contains("disk")) {
        const json& k = d.at("disk");
        check_keys(k, {"n_r", "n_theta", "triangulation"}, "domain.disk");
        DiskDomain dom;
        dom.n_r = get_field<int>(k, "n_r", "domain.disk");
        dom.n_theta = get_field<int>(k, "n_theta", "domain.disk");
        dom.triangulation = get_or<std::string>(k, "triangulation", "rotational", "domain.disk");
        if (dom.triangulation != "rotational" && dom.triangulation != "alternating")
            throw InvalidArgument("domain.disk.triangulation: expected 'rotational' or 'alternating'");
        c.domain = dom;
    } else {
        throw InvalidArgument("domain: unknown kind '" + d.begin().key() + "'");
    }

    if (j.contains("coefficient")) {
        const json& a = j.at("coefficient");
        if (!a.is_object() || a.size() != 1) throw InvalidArgument("coefficient: expected exactly one of 'constant' or 'radial'");
        if (a.contains("constant")) {
            c.coefficient.kind = "constant";
            c.coefficient.value = finite(get_field<double>(a, "constant", "coefficient"), "coefficient.constant");
            if (!(c.coefficient.value > 0.0)) throw InvalidArgument("coefficient.constant must be positive");
        } else if (a.contains("radial")) {
            c.coefficient.kind = "radial";
            c.coefficient.id = get_field<std::string>(a, "radial", "coefficient");
            if (c.coefficient.id != "one_plus_r2" && c.coefficient.id != "two_minus_r2")
                throw InvalidArgument("coefficient.radial: unknown id '" + c.coefficient.id + "'");
        } else {
            throw InvalidArgument("coefficient: unknown kind '" + a.begin().key() + "'");
        }
    }

    c.boundary_operator = parse_boundary(get_field<json>(j, "boundary_operator", "config"));
    c.seed = get_or<std::uint64_t>(j, "seed", 0, "config");
    c.output_dir = get_or<std::string>(j, "output_dir", ".", "config");
    return c;
}

ProblemConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open config file " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw InvalidArgument("malformed JSON in " + path.string() + ": " + e.what());
    }
    return parse_config(j);
}

json config_to_json(const ProblemConfig& c) {
    json j;
    if (const auto* i = std::get_if<IntervalDomain>(&c.domain))
        j["domain"] = {{"interval", {{"a", i->a}, {"b", i->b}, {"n", i->n}}}};
    else {
        const auto& d = std::get<DiskDomain>(c.domain);
        j["domain"] = {{"disk", {{"n_r", d.n_r}, {"n_theta", d.n_theta}, {"triangulation", d.triangulation}}}};
    }
    if (c.coefficient.kind == "constant")
        j["coefficient"] = {{"constant", c.coefficient.value}};
    else
        j["coefficient"] = {{"radial", c.coefficient.id}};
    j["boundary_operator"] = boundary_to_json(c.boundary_operator);
    j["seed"] = c.seed;
    j["output_dir"] = c.output_dir;
    return j;
}

std::string config_hash(const ProblemConfig& c) {
    const std::string text = dump_json(config_to_json(c));
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

Mesh build_mesh(const ProblemConfig& c) {
    if (const auto* i = std::get_if<IntervalDomain>(&c.domain)) return build_interval_mesh(i->a, i->b, i->n);
    const auto& d = std::get<DiskDomain>(c.domain);
    return build_disk_mesh(d.n_r, d.n_theta,
                           d.triangulation == "alternating" ? DiskTriangulation::Alternating : DiskTriangulation::Rotational);
}

CoefficientField build_coefficient(const ProblemConfig& c) {
    if (c.coefficient.kind == "constant") return CoefficientField::constant(c.coefficient.value);
    CoefficientField a;
    a.declared_alpha = 1.0;
    if (c.coefficient.id == "one_plus_r2")
        a.evaluator = [](const Point& x) -> Eigen::Matrix2d {
            return (1.0 + x[0] * x[0] + x[1] * x[1]) * Eigen::Matrix2d::Identity();
        };
    else
        a.evaluator = [](const Point& x) -> Eigen::Matrix2d {
            return (2.0 - x[0] * x[0] - x[1] * x[1]) * Eigen::Matrix2d::Identity();
        };
    return a;
}

BoundaryOperatorSpec build_boundary_spec(const ProblemConfig& c) {
    const BoundaryConfig& b = c.boundary_operator;
    if (b.type == "zero") return spec::Zero{};
    if (b.type == "multiplication") return spec::Multiplication{make_function(b.function)};
    if (b.type == "rank_one") return spec::RankOne{make_function(b.function)};
    if (b.type == "kernel") {
        const double s = b.kernel.scale;
        const double w = b.kernel.width;
        if (b.kernel.kind == "constant") return spec::Kernel{[s](const Point&, const Point&) { return s; }};
        return spec::Kernel{[s, w](const Point& x, const Point& y) {
            const double dx = x[0] - y[0], dy = x[1] - y[1];
            return s * std::exp(-(dx * dx + dy * dy) / (w * w));
        }};
    }
    if (b.type == "rotation_commutator") return spec::RotationCommutator{b.angle};
    if (b.type == "convolution") return spec::Convolution{b.q_hat};
    Eigen::MatrixXd e(b.entries.size(), b.entries.size());
    for (std::size_t i = 0; i < b.entries.size(); ++i)
        for (std::size_t j = 0; j < b.entries.size(); ++j)
            e(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = b.entries[i][j];
    return spec::ExplicitMatrix{e};
}

AssembledProblem build_problem(const ProblemConfig& c, AssemblyOptions options) {
    const Mesh mesh = build_mesh(c);
    const auto b = discretize_boundary_operator(build_boundary_spec(c), mesh);
    return assemble(mesh, build_coefficient(c), b, options);
}

std::string dump_json(const json& j) {
    std::ostringstream os;
    dump_into(os, j, 0);
    os << "\n";
    return os.str();
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw InvalidArgument("cannot write " + tmp.string());
        out << content;
        if (!out) throw InvalidArgument("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace robinlab
