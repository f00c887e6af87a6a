#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "bifrac/common.hpp"

namespace bifrac {

/// Per-segment local frame. The normal points from side B toward side A
/// (the outward normal of subdomain B), so the jump convention is
/// w = u^A - u^B and w_n = w . n.
struct InterfaceFrame {
    Vec2 normal;
    Vec2 tangent;  // rotating the tangent by +90 degrees gives the normal
    double length = 0.0;
};

struct Triangle {
    std::array<int, 3> n;  // node indices, positive orientation
    int subdomain;         // index into Mesh::subdomain_names
};

/// Zero-thickness interface element: coincident node duples on both sides.
struct InterfaceSegment {
    std::array<int, 2> side_a;  // original nodes (subdomain A keeps them)
    std::array<int, 2> side_b;  // duplicated nodes (subdomain B re-pointed)
    int interface;              // index into Mesh::interface_names
    std::array<int, 2> pair;    // indices into Mesh::interface_pairs per end
    InterfaceFrame frame;
};

/// One duplicated interface node: the A-side original and its B-side twin.
struct InterfacePair {
    int node_a;
    int node_b;
    int interface;
    double lumped_length;  // half-lengths of adjacent segments
    Vec2 normal;           // normalized mean of adjacent segment normals
    double arc_coord;      // arc-length along the interface chain
};

/// Triangulated 2D domain with subdomain tags, named 1D groups, and (after
/// splitting) explicit zero-thickness interface elements. Immutable once
/// built; splitting produces a new mesh.
class Mesh {
  public:
    std::vector<Vec2> nodes;
    std::vector<Triangle> triangles;
    std::vector<std::string> subdomain_names;

    // 1D physical groups as loaded (segment lists, file order)
    struct CurveGroup {
        std::string name;
        std::vector<std::array<int, 2>> segments;
    };
    std::vector<CurveGroup> curves;

    // node sets per 1D physical group (sorted); duplicates created by
    // splitting join the groups of their originals
    std::map<std::string, std::vector<int>> boundary_groups;

    std::vector<std::string> interface_names;  // tags already split
    std::vector<InterfaceSegment> interface_segments;
    std::vector<InterfacePair> interface_pairs;

    double h = 0.0;  // characteristic size: mean triangle edge length

    void validate() const;  // throws MeshError on invariant violations
    double total_area() const;
    double triangle_area(int t) const;
    const CurveGroup* find_curve(const std::string& tag) const;
    bool is_split(const std::string& tag) const;
    int subdomain_index(const std::string& name) const;  // -1 if unknown
};

/// Reads a GMSH ASCII v2.2 file. Physical surfaces become subdomain tags,
/// physical curves become curve groups and boundary groups. Only element
/// types 1 (2-node line) and 2 (3-node triangle) are accepted.
Mesh load_gmsh(const std::string& path);
Mesh parse_gmsh(std::istream& in, const std::string& origin);

/// Duplicates every node on the tagged curve, re-points side-B triangles to
/// the duplicates, and records interface segments with their frames. Side A
/// is the adjacent subdomain whose name sorts first. Throws MeshError for an
/// unknown tag, a tag already split, or a non-manifold curve.
Mesh split_interface(const Mesh& mesh, const std::string& tag);

/// Human-readable validation report (node/element/group counts, area, h).
std::string mesh_info(const Mesh& mesh);

}  // namespace bifrac
