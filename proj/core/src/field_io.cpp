#include "linfest/field_io.hpp"

#include <bit>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "linfest/error.hpp"

namespace linfest::geom {

namespace {

static_assert(std::endian::native == std::endian::little, "field container assumes little endian");

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void write_header(std::ostream& os, const Mesh& mesh, const char* kind, int components,
                  bool uniform, std::int64_t values) {
    os << "LINFEST-FIELD 1\n";
    os << "kind " << kind << "\n";
    os << "geometry " << (mesh.is_torus() ? "torus" : "ball") << "\n";
    os << "n " << mesh.n() << "\n";
    os << "m " << mesh.m() << "\n";
    os << "spacing " << fmt(mesh.spacing()) << "\n";
    if (mesh.is_torus()) {
        os << "period " << fmt(mesh.period()) << "\n";
    } else {
        os << "radius " << fmt(mesh.radius()) << "\n";
        os << "center";
        for (double c : mesh.center()) os << " " << fmt(c);
        os << "\n";
    }
    os << "components " << components << "\n";
    os << "uniform " << (uniform ? 1 : 0) << "\n";
    os << "values " << values << "\n";
    os << "end\n";
}

struct Header {
    std::map<std::string, std::string> kv;
    MeshPtr mesh;
    int components = 1;
    bool uniform = false;
    std::int64_t values = 0;
};

Header read_header(std::istream& is, const std::string& path) {
    Header h;
    std::string line;
    if (!std::getline(is, line) || line != "LINFEST-FIELD 1")
        throw ParameterError(path + ": not a field container");
    while (std::getline(is, line)) {
        if (line == "end") break;
        const auto sp = line.find(' ');
        if (sp == std::string::npos) throw ParameterError(path + ": malformed header line");
        h.kv[line.substr(0, sp)] = line.substr(sp + 1);
    }
    if (line != "end") throw ParameterError(path + ": header not terminated");
    auto get = [&](const std::string& k) {
        auto it = h.kv.find(k);
        if (it == h.kv.end()) throw ParameterError(path + ": header lacks '" + k + "'");
        return it->second;
    };
    const int n = std::stoi(get("n"));
    const int m = std::stoi(get("m"));
    if (get("geometry") == "torus") {
        h.mesh = Mesh::torus(n, m, std::stod(get("period")));
    } else if (get("geometry") == "ball") {
        std::istringstream cs(get("center"));
        std::vector<double> c;
        double x;
        while (cs >> x) c.push_back(x);
        h.mesh = Mesh::ball(n, m, std::stod(get("radius")), c);
    } else {
        throw ParameterError(path + ": unknown geometry");
    }
    if (std::stod(get("spacing")) != h.mesh->spacing())
        throw ParameterError(path + ": spacing inconsistent with geometry");
    h.components = std::stoi(get("components"));
    h.uniform = std::stoi(get("uniform")) != 0;
    h.values = std::stoll(get("values"));
    return h;
}

void write_payload(std::ostream& os, const std::vector<double>& v) {
    os.write(reinterpret_cast<const char*>(v.data()),
             static_cast<std::streamsize>(v.size() * sizeof(double)));
}

void read_payload(std::istream& is, std::vector<double>& v, const std::string& path) {
    is.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(double)));
    if (!is) throw ParameterError(path + ": truncated payload");
}

std::ofstream open_out(const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ParameterError("cannot write " + path);
    return os;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ParameterError("cannot read " + path);
    return is;
}

const char* kind_name(NodeKind k) {
    switch (k) {
        case NodeKind::Interior: return "interior";
        case NodeKind::Boundary: return "boundary";
        default: return "exterior";
    }
}

void csv_prefix(std::ostream& os, const Mesh& mesh, std::int64_t i, std::vector<double>& x) {
    mesh.coordinates(i, x.data());
    os << i;
    for (double c : x) os << "," << fmt(c);
    os << "," << kind_name(mesh.kind(i));
}

void csv_head(std::ostream& os, const Mesh& mesh) {
    os << "index";
    for (int j = 0; j < mesh.n(); ++j) os << ",x" << j + 1 << ",y" << j + 1;
    os << ",kind";
}

}  // namespace

void write_field(const std::string& path, const ScalarField& f) {
    auto os = open_out(path);
    write_header(os, *f.mesh, "scalar", 1, false, f.size());
    write_payload(os, f.data);
}

void write_field(const std::string& path, const HermitianField& f) {
    auto os = open_out(path);
    write_header(os, *f.mesh(), "hermitian", f.n() * f.n(), f.uniform(),
                 static_cast<std::int64_t>(f.raw().size()));
    write_payload(os, f.raw());
}

std::string peek_field_kind(const std::string& path) {
    auto is = open_in(path);
    Header h = read_header(is, path);
    return h.kv["kind"];
}

ScalarField read_scalar_field(const std::string& path) {
    auto is = open_in(path);
    Header h = read_header(is, path);
    if (h.kv["kind"] != "scalar") throw ParameterError(path + ": not a scalar field");
    if (h.values != h.mesh->size()) throw ParameterError(path + ": value count mismatch");
    ScalarField f(h.mesh);
    read_payload(is, f.data, path);
    return f;
}

HermitianField read_hermitian_field(const std::string& path) {
    auto is = open_in(path);
    Header h = read_header(is, path);
    if (h.kv["kind"] != "hermitian") throw ParameterError(path + ": not a hermitian field");
    HermitianField f(h.mesh, h.uniform);
    if (h.components != f.n() * f.n() ||
        h.values != static_cast<std::int64_t>(f.raw().size()))
        throw ParameterError(path + ": value count mismatch");
    read_payload(is, f.raw(), path);
    return f;
}

void write_csv(std::ostream& os, const ScalarField& f) {
    const Mesh& mesh = *f.mesh;
    std::vector<double> x(mesh.dim());
    csv_head(os, mesh);
    os << ",value\n";
    for (std::int64_t i = 0; i < mesh.size(); ++i) {
        if (mesh.kind(i) == NodeKind::Exterior) continue;
        csv_prefix(os, mesh, i, x);
        os << "," << fmt(f.data[i]) << "\n";
    }
}

void write_csv(std::ostream& os, const HermitianField& f) {
    const Mesh& mesh = *f.mesh();
    const int n = f.n();
    std::vector<double> x(mesh.dim());
    csv_head(os, mesh);
    for (int j = 0; j < n; ++j) os << ",g" << j + 1 << j + 1;
    for (int j = 0; j < n; ++j)
        for (int k = j + 1; k < n; ++k) os << ",re_g" << j + 1 << k + 1 << ",im_g" << j + 1 << k + 1;
    os << "\n";
    for (std::int64_t i = 0; i < mesh.size(); ++i) {
        if (mesh.kind(i) == NodeKind::Exterior) continue;
        csv_prefix(os, mesh, i, x);
        const double* p = f.packed(i);
        for (int j = 0; j < n * n; ++j) os << "," << fmt(p[j]);
        os << "\n";
    }
}

}  // namespace linfest::geom
