#pragma once

#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "fvgp/error.hpp"
#include "fvgp/format.hpp"
#include "fvgp/mesh.hpp"

namespace fvgp {

namespace detail {

class MshReader {
 public:
  explicit MshReader(std::istream& is) : is_(is) {}

  bool next_line(std::string& line) {
    while (std::getline(is_, line)) {
      ++lineno_;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.find_first_not_of(" \t") != std::string::npos) return true;
    }
    return false;
  }

  std::string expect_line(const char* what) {
    std::string line;
    if (!next_line(line)) throw error(std::string("unexpected end of file, expected ") + what);
    return line;
  }

  void expect_keyword(const std::string& keyword) {
    const auto line = trim(expect_line(keyword.c_str()));
    if (line != keyword) throw error("expected " + keyword + ", got '" + line + "'");
  }

  InputError error(const std::string& msg) const {
    return InputError("msh line " + std::to_string(lineno_) + ": " + msg);
  }

  static std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    const auto e = s.find_last_not_of(" \t");
    return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
  }

  std::vector<std::string> tokens(const std::string& line) const {
    std::istringstream ls(line);
    std::vector<std::string> out;
    for (std::string t; ls >> t;) out.push_back(t);
    return out;
  }

  long long integer(const std::string& t) const {
    std::size_t pos = 0;
    long long v = 0;
    try {
      v = std::stoll(t, &pos);
    } catch (const std::logic_error&) {
      throw error("invalid integer '" + t + "'");
    }
    if (pos != t.size()) throw error("invalid integer '" + t + "'");
    return v;
  }

  double real(const std::string& t) const {
    try {
      return parse_double(t);
    } catch (const InputError&) {
      throw error("invalid number '" + t + "'");
    }
  }

 private:
  std::istream& is_;
  std::size_t lineno_ = 0;
};

}  // namespace detail

/// Reads the MSH 2.2 ASCII subset: 2-node lines (type 1) become boundary
/// edges, 3-node triangles (type 2) become cells, points (type 15) are
/// skipped. z coordinates and element tags are ignored; unknown sections are
/// skipped.
inline Triangulation parse_gmsh(std::istream& is) {
  detail::MshReader in(is);
  Triangulation tri;
  std::unordered_map<long long, std::size_t> node_index;
  bool seen_format = false, seen_nodes = false, seen_elements = false;

  std::string line;
  while (in.next_line(line)) {
    const auto section = detail::MshReader::trim(line);
    if (section.empty() || section[0] != '$') throw in.error("expected a section header, got '" + section + "'");

    if (section == "$MeshFormat") {
      const auto tok = in.tokens(in.expect_line("format line"));
      if (tok.size() < 3) throw in.error("malformed $MeshFormat line");
      if (tok[0].rfind("2.", 0) != 0) throw in.error("unsupported MSH version " + tok[0] + " (need 2.2)");
      if (tok[1] != "0") throw in.error("binary MSH files are not supported");
      in.expect_keyword("$EndMeshFormat");
      seen_format = true;
    } else if (section == "$Nodes") {
      if (!seen_format) throw in.error("$Nodes before $MeshFormat");
      const auto count = in.integer(detail::MshReader::trim(in.expect_line("node count")));
      if (count < 0) throw in.error("negative node count");
      tri.nodes.reserve(static_cast<std::size_t>(count));
      for (long long i = 0; i < count; ++i) {
        const auto tok = in.tokens(in.expect_line("node record"));
        if (tok.size() != 4) throw in.error("malformed node record");
        const auto id = in.integer(tok[0]);
        if (!node_index.emplace(id, tri.nodes.size()).second) throw in.error("duplicate node id " + tok[0]);
        tri.nodes.push_back({in.real(tok[1]), in.real(tok[2])});
      }
      in.expect_keyword("$EndNodes");
      seen_nodes = true;
    } else if (section == "$Elements") {
      if (!seen_nodes) throw in.error("$Elements before $Nodes");
      const auto count = in.integer(detail::MshReader::trim(in.expect_line("element count")));
      if (count < 0) throw in.error("negative element count");
      for (long long i = 0; i < count; ++i) {
        const auto tok = in.tokens(in.expect_line("element record"));
        if (tok.size() < 3) throw in.error("malformed element record");
        const auto type = in.integer(tok[1]);
        const auto ntags = in.integer(tok[2]);
        if (ntags < 0) throw in.error("negative tag count");
        const std::size_t first = 3 + static_cast<std::size_t>(ntags);
        std::size_t nnodes = 0;
        switch (type) {
          case 1: nnodes = 2; break;
          case 2: nnodes = 3; break;
          case 15: nnodes = 1; break;
          default: throw in.error("unsupported element type " + tok[1]);
        }
        if (tok.size() != first + nnodes) throw in.error("wrong node count for element type " + tok[1]);
        if (type == 15) continue;
        std::array<std::size_t, 3> ids{};
        for (std::size_t j = 0; j < nnodes; ++j) {
          const auto it = node_index.find(in.integer(tok[first + j]));
          if (it == node_index.end()) throw in.error("element references unknown node " + tok[first + j]);
          ids[j] = it->second;
        }
        if (type == 1) {
          tri.boundary_edges.push_back({ids[0], ids[1]});
        } else {
          if (signed_area(tri.nodes[ids[0]], tri.nodes[ids[1]], tri.nodes[ids[2]]) < 0.0) std::swap(ids[1], ids[2]);
          tri.triangles.push_back(ids);
        }
      }
      in.expect_keyword("$EndElements");
      seen_elements = true;
    } else {
      // skip unknown sections such as $PhysicalNames
      const auto end = "$End" + section.substr(1);
      for (;;) {
        if (!in.next_line(line)) throw in.error("unterminated section " + section);
        if (detail::MshReader::trim(line) == end) break;
      }
    }
  }
  if (!seen_format) throw in.error("missing $MeshFormat section");
  if (!seen_nodes) throw in.error("missing $Nodes section");
  if (!seen_elements) throw in.error("missing $Elements section");
  return tri;
}

inline Triangulation read_gmsh_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw InputError("cannot open mesh file " + path);
  return parse_gmsh(is);
}

}  // namespace fvgp
