#ifndef ROMAEH_MESH_IO_HPP
#define ROMAEH_MESH_IO_HPP

#include <iosfwd>
#include <string>

#include "romaeh/mesh.hpp"

namespace romaeh {

// Line-oriented text mesh format, units mm, ids 1-based:
//   NODES     <count>    followed by "id x y"
//   ELEMENTS  <count>    followed by "id n1 n2 n3 n4"
//   PHASE                followed by "elem fiber|matrix"
//   PARTITION            followed by "elem beta"
//   PERIODIC             followed by "master slave dx dy"
// '#' starts a comment.  PARTITION and PERIODIC sections are optional.
void write_mesh(const RveMesh& mesh, std::ostream& out);
void write_mesh(const RveMesh& mesh, const std::string& path);
RveMesh read_mesh(std::istream& in, const std::string& origin = "<stream>");
RveMesh read_mesh(const std::string& path);

}  // namespace romaeh

#endif
