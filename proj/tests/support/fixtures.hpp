#pragma once

#include <sstream>
#include <string>

#include "bifrac/mesh.hpp"

namespace fixtures {

// unit square, two triangles, one subdomain, bottom edge group
inline const char* unit_square_msh = R"($MeshFormat
2.2 0 8
$EndMeshFormat
$PhysicalNames
2
2 1 "block"
1 2 "bottom"
$EndPhysicalNames
$Nodes
4
1 0 0 0
2 1 0 0
3 1 1 0
4 0 1 0
$EndNodes
$Elements
4
1 2 2 1 1 1 2 3
2 2 2 1 1 1 3 4
3 1 2 2 2 1 2
4 1 2 2 2 2 3
$EndElements
)";

// [0,2]^2 square with an interior closed diamond interface "iface"
// (4 segments through the edge midpoints), subdomains "inner" and "outer",
// plus a bottom boundary group crossing the diamond vertex at (1,0)
inline const char* diamond_msh = R"($MeshFormat
2.2 0 8
$EndMeshFormat
$PhysicalNames
4
2 1 "inner"
2 2 "outer"
1 3 "iface"
1 4 "bottom"
$EndPhysicalNames
$Nodes
9
1 0 0 0
2 1 0 0
3 2 0 0
4 0 1 0
5 1 1 0
6 2 1 0
7 0 2 0
8 1 2 0
9 2 2 0
$EndNodes
$Elements
14
1 2 2 1 1 2 6 5
2 2 2 1 1 6 8 5
3 2 2 1 1 8 4 5
4 2 2 1 1 4 2 5
5 2 2 2 2 1 2 4
6 2 2 2 2 2 3 6
7 2 2 2 2 6 9 8
8 2 2 2 2 8 7 4
9 1 2 3 3 2 6
10 1 2 3 3 6 8
11 1 2 3 3 8 4
12 1 2 3 3 4 2
13 1 2 4 4 1 2
14 1 2 4 4 2 3
$EndElements
)";

// [0,2]^2 square split by the horizontal midline "midline" into subdomains
// "lower" and "upper"; the left edge group contains the midline endpoint
inline const char* midline_msh = R"($MeshFormat
2.2 0 8
$EndMeshFormat
$PhysicalNames
5
2 1 "lower"
2 2 "upper"
1 3 "midline"
1 4 "left"
1 5 "top"
$EndPhysicalNames
$Nodes
9
1 0 0 0
2 1 0 0
3 2 0 0
4 0 1 0
5 1 1 0
6 2 1 0
7 0 2 0
8 1 2 0
9 2 2 0
$EndNodes
$Elements
14
1 2 2 1 1 1 2 5
2 2 2 1 1 1 5 4
3 2 2 1 1 2 3 6
4 2 2 1 1 2 6 5
5 2 2 2 2 4 5 8
6 2 2 2 2 4 8 7
7 2 2 2 2 5 6 9
8 2 2 2 2 5 9 8
9 1 2 3 3 4 5
10 1 2 3 3 5 6
11 1 2 4 4 1 4
12 1 2 4 4 4 7
13 1 2 5 5 7 8
14 1 2 5 5 8 9
$EndElements
)";

inline const char* quad_element_msh = R"($MeshFormat
2.2 0 8
$EndMeshFormat
$PhysicalNames
1
2 1 "block"
$EndPhysicalNames
$Nodes
4
1 0 0 0
2 1 0 0
3 1 1 0
4 0 1 0
$EndNodes
$Elements
1
1 3 2 1 1 1 2 3 4
$EndElements
)";

inline bifrac::Mesh parse(const char* text, const std::string& name = "<fixture>") {
    std::istringstream in(text);
    return bifrac::parse_gmsh(in, name);
}

}  // namespace fixtures
