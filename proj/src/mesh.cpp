#include "bifrac/mesh.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace bifrac {

double Mesh::triangle_area(int t) const {
    const auto& tri = triangles[t];
    const Vec2 a = nodes[tri.n[0]], b = nodes[tri.n[1]], c = nodes[tri.n[2]];
    return 0.5 * (b - a).cross(c - a);
}

double Mesh::total_area() const {
    double sum = 0.0;
    for (int t = 0; t < static_cast<int>(triangles.size()); ++t) sum += triangle_area(t);
    return sum;
}

const Mesh::CurveGroup* Mesh::find_curve(const std::string& tag) const {
    for (const auto& c : curves)
        if (c.name == tag) return &c;
    return nullptr;
}

bool Mesh::is_split(const std::string& tag) const {
    return std::find(interface_names.begin(), interface_names.end(), tag) != interface_names.end();
}

int Mesh::subdomain_index(const std::string& name) const {
    for (int i = 0; i < static_cast<int>(subdomain_names.size()); ++i)
        if (subdomain_names[i] == name) return i;
    return -1;
}

void Mesh::validate() const {
    const int nn = static_cast<int>(nodes.size());
    for (int t = 0; t < static_cast<int>(triangles.size()); ++t) {
        const auto& tri = triangles[t];
        for (int k = 0; k < 3; ++k)
            if (tri.n[k] < 0 || tri.n[k] >= nn)
                throw MeshError("triangle " + std::to_string(t) + " references missing node");
        if (!(triangle_area(t) > 0.0))
            throw MeshError("triangle " + std::to_string(t) + " has nonpositive area");
        if (tri.subdomain < 0 || tri.subdomain >= static_cast<int>(subdomain_names.size()))
            throw MeshError("triangle " + std::to_string(t) + " has no subdomain tag");
    }
    for (const auto& c : curves)
        for (const auto& s : c.segments)
            for (int k = 0; k < 2; ++k)
                if (s[k] < 0 || s[k] >= nn)
                    throw MeshError("curve '" + c.name + "' references missing node");
    const double tol = 1e-12 * h;
    for (const auto& seg : interface_segments) {
        for (int k = 0; k < 2; ++k) {
            if (seg.side_a[k] < 0 || seg.side_a[k] >= nn || seg.side_b[k] < 0 || seg.side_b[k] >= nn)
                throw MeshError("interface segment references missing node");
            if ((nodes[seg.side_a[k]] - nodes[seg.side_b[k]]).norm() > tol)
                throw MeshError("interface segment sides are not coincident");
        }
        const auto& f = seg.frame;
        if (!(f.length > 0.0)) throw MeshError("interface segment has nonpositive length");
        if (std::abs(f.normal.dot(f.tangent)) > 1e-12 || std::abs(f.normal.norm() - 1.0) > 1e-12 ||
            std::abs(f.tangent.norm() - 1.0) > 1e-12)
            throw MeshError("interface frame is not orthonormal");
        // right-handed: rotating the tangent by +90 degrees gives the normal
        const Vec2 rot(-f.tangent.y, f.tangent.x);
        if ((rot - f.normal).norm() > 1e-12)
            throw MeshError("interface frame is not right-handed");
    }
}

namespace {

struct PhysicalName {
    int dim;
    int id;
    std::string name;
};

std::string next_content_line(std::istream& in, const std::string& origin) {
    std::string line;
    while (std::getline(in, line)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
        if (!line.empty()) return line;
    }
    throw MeshError(origin + ": unexpected end of file");
}

}  // namespace

Mesh parse_gmsh(std::istream& in, const std::string& origin) {
    Mesh mesh;
    std::vector<PhysicalName> names;
    std::map<long, int> node_index;
    bool have_nodes = false, have_elements = false;

    struct RawElement {
        int type;
        int phys;
        std::vector<long> nodes;
    };
    std::vector<RawElement> raw;

    std::string line;
    while (std::getline(in, line)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
        if (line.empty()) continue;
        if (line[0] != '$') throw MeshError(origin + ": malformed section header: '" + line + "'");
        const std::string section = line.substr(1);
        if (section == "MeshFormat") {
            std::istringstream ls(next_content_line(in, origin));
            std::string version;
            int file_type = -1, data_size = 0;
            ls >> version >> file_type >> data_size;
            if (version != "2.2" || file_type != 0)
                throw MeshError(origin + ": unsupported mesh format (need ASCII v2.2), got version '" +
                                version + "'");
            if (next_content_line(in, origin) != "$EndMeshFormat")
                throw MeshError(origin + ": missing $EndMeshFormat");
        } else if (section == "PhysicalNames") {
            std::istringstream hs(next_content_line(in, origin));
            int count = 0;
            if (!(hs >> count)) throw MeshError(origin + ": malformed $PhysicalNames count");
            for (int i = 0; i < count; ++i) {
                std::istringstream ls(next_content_line(in, origin));
                PhysicalName pn;
                std::string quoted;
                if (!(ls >> pn.dim >> pn.id)) throw MeshError(origin + ": malformed physical name line");
                std::getline(ls, quoted);
                const auto q0 = quoted.find('"');
                const auto q1 = quoted.rfind('"');
                if (q0 == std::string::npos || q1 <= q0)
                    throw MeshError(origin + ": physical name must be quoted");
                pn.name = quoted.substr(q0 + 1, q1 - q0 - 1);
                names.push_back(pn);
            }
            if (next_content_line(in, origin) != "$EndPhysicalNames")
                throw MeshError(origin + ": missing $EndPhysicalNames");
        } else if (section == "Nodes") {
            std::istringstream hs(next_content_line(in, origin));
            long count = 0;
            if (!(hs >> count)) throw MeshError(origin + ": malformed $Nodes count");
            for (long i = 0; i < count; ++i) {
                std::istringstream ls(next_content_line(in, origin));
                long id;
                double x, y, z;
                if (!(ls >> id >> x >> y >> z)) throw MeshError(origin + ": malformed node line");
                node_index[id] = static_cast<int>(mesh.nodes.size());
                mesh.nodes.push_back(Vec2(x, y));
            }
            if (next_content_line(in, origin) != "$EndNodes")
                throw MeshError(origin + ": missing $EndNodes");
            have_nodes = true;
        } else if (section == "Elements") {
            std::istringstream hs(next_content_line(in, origin));
            long count = 0;
            if (!(hs >> count)) throw MeshError(origin + ": malformed $Elements count");
            for (long i = 0; i < count; ++i) {
                std::istringstream ls(next_content_line(in, origin));
                long id;
                int type, ntags;
                if (!(ls >> id >> type >> ntags)) throw MeshError(origin + ": malformed element line");
                RawElement el;
                el.type = type;
                el.phys = 0;
                for (int k = 0; k < ntags; ++k) {
                    int tag;
                    if (!(ls >> tag)) throw MeshError(origin + ": malformed element tags");
                    if (k == 0) el.phys = tag;
                }
                int nn = 0;
                if (type == 1)
                    nn = 2;
                else if (type == 2)
                    nn = 3;
                else
                    throw MeshError(origin + ": unsupported element type " + std::to_string(type) +
                                    " (only 2-node lines and 3-node triangles)");
                for (int k = 0; k < nn; ++k) {
                    long n;
                    if (!(ls >> n)) throw MeshError(origin + ": element with missing nodes");
                    el.nodes.push_back(n);
                }
                raw.push_back(std::move(el));
            }
            if (next_content_line(in, origin) != "$EndElements")
                throw MeshError(origin + ": missing $EndElements");
            have_elements = true;
        } else {
            // skip unknown sections
            const std::string terminator = "$End" + section;
            for (;;) {
                if (next_content_line(in, origin) == terminator) break;
            }
        }
    }
    if (!have_nodes || !have_elements)
        throw MeshError(origin + ": missing $Nodes or $Elements section");

    std::map<int, int> surface_index;       // physical id -> subdomain index
    std::map<int, std::string> curve_name;  // physical id -> name
    for (const auto& pn : names)
        if (pn.dim == 1) curve_name[pn.id] = pn.name;
    // deterministic subdomain indices: sorted by name
    {
        std::vector<std::pair<std::string, int>> surf;
        for (const auto& pn : names)
            if (pn.dim == 2) surf.push_back({pn.name, pn.id});
        std::sort(surf.begin(), surf.end());
        for (const auto& [name, id] : surf) {
            surface_index[id] = static_cast<int>(mesh.subdomain_names.size());
            mesh.subdomain_names.push_back(name);
        }
    }

    std::map<std::string, Mesh::CurveGroup> curve_groups;
    auto lookup = [&](long id) {
        const auto it = node_index.find(id);
        if (it == node_index.end()) throw MeshError(origin + ": element references missing node");
        return it->second;
    };

    for (const auto& el : raw) {
        if (el.type == 2) {
            const auto it = surface_index.find(el.phys);
            if (el.phys == 0 || it == surface_index.end())
                throw MeshError(origin + ": triangle without a named physical surface (tag " +
                                std::to_string(el.phys) + ")");
            Triangle tri;
            tri.n = {lookup(el.nodes[0]), lookup(el.nodes[1]), lookup(el.nodes[2])};
            tri.subdomain = it->second;
            mesh.triangles.push_back(tri);
        } else {
            const auto it = curve_name.find(el.phys);
            if (el.phys == 0 || it == curve_name.end())
                throw MeshError(origin + ": line element without a named physical curve (tag " +
                                std::to_string(el.phys) + ")");
            auto& group = curve_groups[it->second];
            group.name = it->second;
            group.segments.push_back({lookup(el.nodes[0]), lookup(el.nodes[1])});
        }
    }
    for (auto& [name, group] : curve_groups) mesh.curves.push_back(std::move(group));

    for (const auto& c : mesh.curves) {
        std::set<int> node_set;
        for (const auto& s : c.segments) {
            node_set.insert(s[0]);
            node_set.insert(s[1]);
        }
        mesh.boundary_groups[c.name] = std::vector<int>(node_set.begin(), node_set.end());
    }

    // characteristic size: mean triangle edge length
    double edge_sum = 0.0;
    long edge_count = 0;
    for (const auto& tri : mesh.triangles) {
        for (int k = 0; k < 3; ++k) {
            edge_sum += (mesh.nodes[tri.n[k]] - mesh.nodes[tri.n[(k + 1) % 3]]).norm();
            ++edge_count;
        }
    }
    mesh.h = edge_count ? edge_sum / static_cast<double>(edge_count) : 0.0;

    mesh.validate();
    return mesh;
}

Mesh load_gmsh(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open mesh file: " + path);
    return parse_gmsh(in, path);
}

Mesh split_interface(const Mesh& input, const std::string& tag) {
    if (input.is_split(tag)) throw MeshError("interface '" + tag + "' is already split");
    const Mesh::CurveGroup* curve = input.find_curve(tag);
    if (!curve) throw MeshError("unknown interface tag '" + tag + "'");
    if (curve->segments.empty()) throw MeshError("interface '" + tag + "' has no segments");

    Mesh mesh = input;

    // edge -> adjacent triangles
    std::map<std::pair<int, int>, std::vector<int>> edge_tris;
    for (int t = 0; t < static_cast<int>(mesh.triangles.size()); ++t) {
        const auto& tri = mesh.triangles[t];
        for (int k = 0; k < 3; ++k) {
            const int a = tri.n[k], b = tri.n[(k + 1) % 3];
            edge_tris[{std::min(a, b), std::max(a, b)}].push_back(t);
        }
    }

    // the two subdomains the curve separates
    int sub_a = -1, sub_b = -1;
    std::vector<int> seg_tri_a(curve->segments.size(), -1);
    for (size_t s = 0; s < curve->segments.size(); ++s) {
        const auto& seg = curve->segments[s];
        const auto it = edge_tris.find({std::min(seg[0], seg[1]), std::max(seg[0], seg[1])});
        if (it == edge_tris.end() || it->second.size() != 2)
            throw MeshError("interface '" + tag + "': curve edge not shared by two triangles");
        const int t0 = it->second[0], t1 = it->second[1];
        int s0 = mesh.triangles[t0].subdomain, s1 = mesh.triangles[t1].subdomain;
        if (s0 == s1)
            throw MeshError("interface '" + tag + "': curve edge interior to one subdomain");
        // side A: lexicographically smaller subdomain name
        if (mesh.subdomain_names[s1] < mesh.subdomain_names[s0]) std::swap(s0, s1);
        if (sub_a < 0) {
            sub_a = s0;
            sub_b = s1;
        } else if (sub_a != s0 || sub_b != s1) {
            throw MeshError("interface '" + tag + "': curve borders more than two subdomains");
        }
        seg_tri_a[s] = (mesh.triangles[t0].subdomain == sub_a) ? t0 : t1;
    }

    // node -> subdomains of adjacent triangles (manifold check)
    std::set<int> curve_nodes;
    for (const auto& seg : curve->segments) {
        curve_nodes.insert(seg[0]);
        curve_nodes.insert(seg[1]);
    }
    std::map<int, std::set<int>> node_subs;
    for (const auto& tri : mesh.triangles)
        for (int k = 0; k < 3; ++k)
            if (curve_nodes.count(tri.n[k])) node_subs[tri.n[k]].insert(tri.subdomain);
    for (const int n : curve_nodes) {
        const auto& subs = node_subs[n];
        if (!subs.count(sub_a) || !subs.count(sub_b))
            throw MeshError("interface '" + tag + "': curve node " + std::to_string(n) +
                            " adjacent to triangles of only one subdomain");
    }

    // duplicate curve nodes (deterministic order)
    std::map<int, int> dup;
    for (const int n : curve_nodes) {
        dup[n] = static_cast<int>(mesh.nodes.size());
        mesh.nodes.push_back(mesh.nodes[n]);
    }

    // re-point side-B triangles
    for (auto& tri : mesh.triangles) {
        if (tri.subdomain != sub_b) continue;
        for (int k = 0; k < 3; ++k) {
            const auto it = dup.find(tri.n[k]);
            if (it != dup.end()) tri.n[k] = it->second;
        }
    }

    // duplicates inherit boundary-group membership
    for (auto& [name, group] : mesh.boundary_groups) {
        std::vector<int> extra;
        for (const int n : group) {
            const auto it = dup.find(n);
            if (it != dup.end()) extra.push_back(it->second);
        }
        group.insert(group.end(), extra.begin(), extra.end());
        std::sort(group.begin(), group.end());
    }

    const int iface_index = static_cast<int>(mesh.interface_names.size());
    mesh.interface_names.push_back(tag);

    // chain the segments for arc-length coordinates: node -> incident segments
    std::map<int, std::vector<int>> incident;
    for (size_t s = 0; s < curve->segments.size(); ++s) {
        incident[curve->segments[s][0]].push_back(static_cast<int>(s));
        incident[curve->segments[s][1]].push_back(static_cast<int>(s));
    }
    for (const auto& [n, segs] : incident)
        if (segs.size() > 2)
            throw MeshError("interface '" + tag + "': branching curve at node " + std::to_string(n));

    // endpoints have one incident segment; closed curves have none
    std::vector<int> endpoints;
    for (const auto& [n, segs] : incident)
        if (segs.size() == 1) endpoints.push_back(n);
    std::sort(endpoints.begin(), endpoints.end());

    std::vector<char> seg_done(curve->segments.size(), 0);
    std::vector<std::vector<int>> chains;      // ordered node lists
    std::vector<std::vector<int>> chain_segs;  // matching segment ids
    auto walk = [&](int start) {
        std::vector<int> chain{start};
        std::vector<int> segs;
        int current = start;
        for (;;) {
            int next_seg = -1;
            for (const int s : incident[current])
                if (!seg_done[s]) {
                    next_seg = s;
                    break;
                }
            if (next_seg < 0) break;
            seg_done[next_seg] = 1;
            const auto& seg = curve->segments[next_seg];
            current = (seg[0] == current) ? seg[1] : seg[0];
            chain.push_back(current);
            segs.push_back(next_seg);
        }
        chains.push_back(std::move(chain));
        chain_segs.push_back(std::move(segs));
    };
    for (const int e : endpoints) {
        if (!incident[e].empty() && !seg_done[incident[e][0]]) walk(e);
    }
    for (const auto& [n, segs] : incident) {  // remaining closed loops, smallest node first
        bool fresh = false;
        for (const int s : segs)
            if (!seg_done[s]) fresh = true;
        if (fresh) walk(n);
    }

    // pairs in chain order
    std::map<int, int> pair_of_node;
    const int first_pair = static_cast<int>(mesh.interface_pairs.size());
    for (size_t c = 0; c < chains.size(); ++c) {
        double arc = 0.0;
        for (size_t i = 0; i < chains[c].size(); ++i) {
            const int n = chains[c][i];
            if (i > 0) {
                const auto& seg = curve->segments[chain_segs[c][i - 1]];
                arc += (mesh.nodes[seg[0]] - mesh.nodes[seg[1]]).norm();
            }
            if (pair_of_node.count(n)) continue;  // closed chain revisits its start
            InterfacePair pair;
            pair.node_a = n;
            pair.node_b = dup.at(n);
            pair.interface = iface_index;
            pair.lumped_length = 0.0;
            pair.arc_coord = arc;
            pair_of_node[n] = static_cast<int>(mesh.interface_pairs.size());
            mesh.interface_pairs.push_back(pair);
        }
    }

    // segments with frames; accumulate lumped lengths and node normals
    std::map<int, Vec2> normal_sum;
    for (size_t s = 0; s < curve->segments.size(); ++s) {
        const auto& seg = curve->segments[s];
        InterfaceSegment out;
        out.side_a = {seg[0], seg[1]};
        out.side_b = {dup.at(seg[0]), dup.at(seg[1])};
        out.interface = iface_index;
        out.pair = {pair_of_node.at(seg[0]), pair_of_node.at(seg[1])};

        const Vec2 d = mesh.nodes[seg[1]] - mesh.nodes[seg[0]];
        const double length = d.norm();
        if (!(length > 0.0)) throw MeshError("interface '" + tag + "': zero-length segment");
        Vec2 t = d * (1.0 / length);
        Vec2 n(-t.y, t.x);
        // orient the normal from side B toward side A
        const auto& tri_a = mesh.triangles[seg_tri_a[s]];
        const Vec2 centroid =
            (mesh.nodes[tri_a.n[0]] + mesh.nodes[tri_a.n[1]] + mesh.nodes[tri_a.n[2]]) * (1.0 / 3.0);
        const Vec2 mid = (mesh.nodes[seg[0]] + mesh.nodes[seg[1]]) * 0.5;
        if (n.dot(centroid - mid) < 0.0) {
            n = n * -1.0;
            t = t * -1.0;  // keep the frame right-handed
        }
        out.frame.normal = n;
        out.frame.tangent = t;
        out.frame.length = length;
        mesh.interface_segments.push_back(out);

        for (const int end : {seg[0], seg[1]}) {
            const int p = pair_of_node.at(end);
            mesh.interface_pairs[p].lumped_length += 0.5 * length;
            if (normal_sum.count(p))
                normal_sum[p] = normal_sum[p] + n;
            else
                normal_sum[p] = n;
        }
    }
    for (int p = first_pair; p < static_cast<int>(mesh.interface_pairs.size()); ++p)
        mesh.interface_pairs[p].normal = normal_sum.at(p).normalized();

    mesh.validate();
    return mesh;
}

std::string mesh_info(const Mesh& mesh) {
    std::ostringstream out;
    out << "nodes: " << mesh.nodes.size() << "\n";
    out << "triangles: " << mesh.triangles.size() << "\n";
    out << "total area: " << mesh.total_area() << " m^2\n";
    out << "characteristic size h: " << mesh.h << " m\n";
    out << "subdomains:";
    for (size_t s = 0; s < mesh.subdomain_names.size(); ++s) {
        double area = 0.0;
        int count = 0;
        for (int t = 0; t < static_cast<int>(mesh.triangles.size()); ++t)
            if (mesh.triangles[t].subdomain == static_cast<int>(s)) {
                area += mesh.triangle_area(t);
                ++count;
            }
        out << "\n  " << mesh.subdomain_names[s] << ": " << count << " triangles, area " << area;
    }
    out << "\ncurve groups:";
    for (const auto& c : mesh.curves)
        out << "\n  " << c.name << ": " << c.segments.size() << " segments, "
            << mesh.boundary_groups.at(c.name).size() << " nodes";
    if (!mesh.interface_names.empty()) {
        out << "\nsplit interfaces:";
        for (size_t i = 0; i < mesh.interface_names.size(); ++i) {
            int segs = 0, pairs = 0;
            for (const auto& s : mesh.interface_segments)
                if (s.interface == static_cast<int>(i)) ++segs;
            for (const auto& p : mesh.interface_pairs)
                if (p.interface == static_cast<int>(i)) ++pairs;
            out << "\n  " << mesh.interface_names[i] << ": " << segs << " segments, " << pairs
                << " node pairs";
        }
    }
    out << "\n";
    return out.str();
}

}  // namespace bifrac
