#include "rearing/chamber/obj_io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace rearing::chamber {

void export_obj(const ObjectSpec& obj, std::ostream& os) {
    os << "# rearing mesh, object " << obj.object_id << "\n";
    char buf[128];
    for (const auto& t : obj.mesh)
        for (const Vec3* v : {&t.a, &t.b, &t.c}) {
            std::snprintf(buf, sizeof(buf), "v %.9g %.9g %.9g\n", v->x, v->y, v->z);
            os << buf;
        }
    for (std::size_t i = 0; i < obj.mesh.size(); ++i)
        os << "f " << 3 * i + 1 << " " << 3 * i + 2 << " " << 3 * i + 3 << "\n";
}

void export_obj_file(const ObjectSpec& obj, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("export_obj: cannot open " + path);
    export_obj(obj, f);
}

namespace {

int parse_index(const std::string& tok, std::size_t nverts) {
    // "7", "7/1", "7//3" all reference vertex 7.
    const std::size_t slash = tok.find('/');
    const std::string head = slash == std::string::npos ? tok : tok.substr(0, slash);
    int idx = std::stoi(head);
    if (idx < 0) idx = static_cast<int>(nverts) + 1 + idx;  // negative = relative
    if (idx < 1 || static_cast<std::size_t>(idx) > nverts)
        throw std::runtime_error("import_obj: face index out of range: " + tok);
    return idx - 1;
}

}  // namespace

ObjectSpec import_obj(std::istream& is, int object_id, const std::array<double, 3>& albedo) {
    std::vector<Vec3> verts;
    std::vector<Triangle> tris;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        std::istringstream ss(line);
        std::string tag;
        if (!(ss >> tag) || tag[0] == '#') continue;
        if (tag == "v") {
            Vec3 v;
            if (!(ss >> v.x >> v.y >> v.z))
                throw std::runtime_error("import_obj: bad vertex at line " + std::to_string(lineno));
            verts.push_back(v);
        } else if (tag == "f") {
            std::vector<std::string> toks;
            std::string t;
            while (ss >> t) toks.push_back(t);
            if (toks.size() != 3)
                throw std::runtime_error("import_obj: only triangular faces supported, line " +
                                         std::to_string(lineno));
            Triangle tri;
            tri.a = verts[parse_index(toks[0], verts.size())];
            tri.b = verts[parse_index(toks[1], verts.size())];
            tri.c = verts[parse_index(toks[2], verts.size())];
            tri.albedo = albedo;
            tris.push_back(tri);
        }
        // other records (vn, vt, usemtl, o, g, s) ignored
    }
    if (tris.empty()) throw std::runtime_error("import_obj: no faces found");
    ObjectSpec obj;
    obj.object_id = object_id;
    obj.mesh = std::move(tris);
    obj.centroid = mesh_centroid(obj.mesh);
    obj.validate();
    return obj;
}

ObjectSpec import_obj_file(const std::string& path, int object_id, const std::array<double, 3>& albedo) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("import_obj: cannot open " + path);
    return import_obj(f, object_id, albedo);
}

}  // namespace rearing::chamber
