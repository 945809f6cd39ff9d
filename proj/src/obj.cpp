// Copyright 2026 The Cubify Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cubify/obj.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

#include "cubify/error.hpp"

namespace cubify {
namespace {

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

double parse_double(std::string_view tok, std::size_t line) {
  double value = 0.0;
  const char* begin = tok.data();
  if (!tok.empty() && tok.front() == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, tok.data() + tok.size(), value);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    throw ParseError(line, "invalid number '" + std::string(tok) + "'");
  }
  return value;
}

long parse_int(std::string_view tok, std::size_t line) {
  long value = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    throw ParseError(line, "invalid index '" + std::string(tok) + "'");
  }
  return value;
}

// Resolves a 1-based (or negative, relative) OBJ index against `count`.
int resolve_index(long raw, long count, std::size_t line, const char* what) {
  long idx = raw > 0 ? raw - 1 : count + raw;
  if (raw == 0 || idx < 0 || idx >= count) {
    throw ParseError(line, std::string(what) + " index " + std::to_string(raw) +
                               " out of range (have " + std::to_string(count) +
                               ")");
  }
  return static_cast<int>(idx);
}

struct Corner {
  long v = 0;
  long vt = 0;  // 0 = absent
};

struct PendingFace {
  std::vector<Corner> corners;
  std::size_t line;
  long vertex_count;  // vertices seen when the face was read
  long uv_count;
};

void append_double(std::string& out, double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, ptr);
}

void append_vertex(std::string& out, const Eigen::RowVector3d& p) {
  out += "v ";
  append_double(out, p[0]);
  out += ' ';
  append_double(out, p[1]);
  out += ' ';
  append_double(out, p[2]);
}

}  // namespace

TriangleMesh make_mesh(Positions positions, Faces faces) {
  TriangleMesh mesh;
  mesh.positions = std::move(positions);
  mesh.faces = std::move(faces);
  return mesh;
}

double bbox_diagonal(const Positions& positions) {
  if (positions.rows() == 0) return 0.0;
  return (positions.colwise().maxCoeff() - positions.colwise().minCoeff())
      .norm();
}

TriangleMesh load_obj(std::string_view text) {
  auto source = std::make_shared<ObjSource>();
  std::vector<Vec3> verts;
  std::vector<Eigen::Vector2d> uvs;
  std::vector<PendingFace> pending;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    auto toks = split_ws(line);
    if (toks.empty() || toks[0].front() == '#') {
      source->lines.push_back({ObjSource::Kind::kVerbatim, std::string(line)});
      continue;
    }
    const std::string_view key = toks[0];
    if (key == "v") {
      if (toks.size() < 4) throw ParseError(line_no, "vertex needs 3 coordinates");
      verts.emplace_back(parse_double(toks[1], line_no),
                         parse_double(toks[2], line_no),
                         parse_double(toks[3], line_no));
      // Keep anything after z (w or vertex colours) for the round trip.
      std::string tail;
      if (toks.size() > 4) {
        std::size_t start = static_cast<std::size_t>(toks[4].data() - line.data());
        tail = std::string(line.substr(start));
      }
      source->lines.push_back({ObjSource::Kind::kVertex, std::move(tail)});
    } else if (key == "vt") {
      if (toks.size() < 2) throw ParseError(line_no, "texture coordinate needs a value");
      double u = parse_double(toks[1], line_no);
      double v = toks.size() > 2 ? parse_double(toks[2], line_no) : 0.0;
      uvs.emplace_back(u, v);
      source->lines.push_back({ObjSource::Kind::kVerbatim, std::string(line)});
    } else if (key == "f") {
      if (toks.size() < 4) throw ParseError(line_no, "face needs at least 3 corners");
      PendingFace face{{}, line_no, static_cast<long>(verts.size()),
                       static_cast<long>(uvs.size())};
      for (std::size_t t = 1; t < toks.size(); ++t) {
        std::string_view c = toks[t];
        Corner corner;
        std::size_t slash = c.find('/');
        corner.v = parse_int(c.substr(0, slash), line_no);
        if (slash != std::string_view::npos) {
          std::string_view rest = c.substr(slash + 1);
          std::size_t slash2 = rest.find('/');
          std::string_view vt = rest.substr(0, slash2);
          if (!vt.empty()) corner.vt = parse_int(vt, line_no);
        }
        face.corners.push_back(corner);
      }
      pending.push_back(std::move(face));
      source->lines.push_back({ObjSource::Kind::kVerbatim, std::string(line)});
    } else {
      source->lines.push_back({ObjSource::Kind::kVerbatim, std::string(line)});
    }
  }
  // A trailing newline yields an empty final line that save_obj re-adds.
  if (!text.empty() && text.back() == '\n' && !source->lines.empty() &&
      source->lines.back().kind == ObjSource::Kind::kVerbatim &&
      source->lines.back().text.empty()) {
    source->lines.pop_back();
  }

  if (pending.empty() || verts.empty()) throw ParseError(0, "empty mesh");

  const long nv = static_cast<long>(verts.size());
  const long nt = static_cast<long>(uvs.size());
  std::vector<Eigen::Vector3i> tris;
  std::vector<Eigen::Vector3i> uv_tris;
  bool any_uv = false;
  for (const PendingFace& f : pending) {
    std::vector<int> vi, ti;
    for (const Corner& c : f.corners) {
      // Negative indices are relative to the records seen so far.
      long count_v = c.v < 0 ? f.vertex_count : nv;
      vi.push_back(resolve_index(c.v, count_v, f.line, "vertex"));
      if (c.vt != 0) {
        long count_t = c.vt < 0 ? f.uv_count : nt;
        ti.push_back(resolve_index(c.vt, count_t, f.line, "texture"));
        any_uv = true;
      } else {
        ti.push_back(-1);
      }
    }
    for (std::size_t a = 0; a < vi.size(); ++a) {
      for (std::size_t b = a + 1; b < vi.size(); ++b) {
        if (vi[a] == vi[b]) throw ParseError(f.line, "face repeats a vertex");
      }
    }
    for (std::size_t k = 1; k + 1 < vi.size(); ++k) {
      tris.emplace_back(vi[0], vi[k], vi[k + 1]);
      uv_tris.emplace_back(ti[0], ti[k], ti[k + 1]);
    }
  }

  TriangleMesh mesh;
  mesh.positions.resize(nv, 3);
  for (long i = 0; i < nv; ++i) mesh.positions.row(i) = verts[i].transpose();
  mesh.faces.resize(static_cast<Eigen::Index>(tris.size()), 3);
  for (std::size_t f = 0; f < tris.size(); ++f) mesh.faces.row(f) = tris[f].transpose();
  mesh.uvs.resize(nt, 2);
  for (long i = 0; i < nt; ++i) mesh.uvs.row(i) = uvs[i].transpose();
  if (any_uv) {
    mesh.uv_faces.resize(static_cast<Eigen::Index>(uv_tris.size()), 3);
    for (std::size_t f = 0; f < uv_tris.size(); ++f) {
      mesh.uv_faces.row(f) = uv_tris[f].transpose();
    }
  }
  source->vertex_count = static_cast<int>(nv);
  mesh.source = std::move(source);
  return mesh;
}

TriangleMesh load_obj_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_obj(ss.str());
}

std::string save_obj(const TriangleMesh& mesh, const Positions* positions_override) {
  if (positions_override && positions_override->rows() != mesh.positions.rows()) {
    throw InvalidArgument("position override has " +
                          std::to_string(positions_override->rows()) +
                          " rows, mesh has " +
                          std::to_string(mesh.positions.rows()) + " vertices");
  }
  const Positions& pos = positions_override ? *positions_override : mesh.positions;
  std::string out;
  out.reserve(static_cast<std::size_t>(pos.rows()) * 40 +
              static_cast<std::size_t>(mesh.faces.rows()) * 20);

  if (mesh.source && mesh.source->vertex_count == mesh.num_vertices()) {
    Eigen::Index v = 0;
    for (const ObjSource::Line& line : mesh.source->lines) {
      if (line.kind == ObjSource::Kind::kVertex) {
        append_vertex(out, pos.row(v++));
        if (!line.text.empty()) {
          out += ' ';
          out += line.text;
        }
      } else {
        out += line.text;
      }
      out += '\n';
    }
    return out;
  }

  for (Eigen::Index v = 0; v < pos.rows(); ++v) {
    append_vertex(out, pos.row(v));
    out += '\n';
  }
  for (Eigen::Index f = 0; f < mesh.faces.rows(); ++f) {
    out += "f " + std::to_string(mesh.faces(f, 0) + 1) + ' ' +
           std::to_string(mesh.faces(f, 1) + 1) + ' ' +
           std::to_string(mesh.faces(f, 2) + 1) + '\n';
  }
  return out;
}

void save_obj_file(const std::string& path, const TriangleMesh& mesh,
                   const Positions* positions_override) {
  std::string text = save_obj(mesh, positions_override);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  out << text;
}

}  // namespace cubify
