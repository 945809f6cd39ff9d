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

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include "cubify/error.hpp"
#include "cubify/progressive.hpp"

namespace cubify {
namespace {

constexpr char kMagic[4] = {'C', 'P', 'M', 'C'};
constexpr std::uint32_t kVersion = 1;

class Writer {
 public:
  void raw(const char* p, size_t n) { out_.append(p, n); }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
  void i32(int v) { u32(static_cast<std::uint32_t>(v)); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void vec3(const Vec3& v) {
    for (int c = 0; c < 3; ++c) f64(v[c]);
  }
  void triple(const Eigen::Vector3i& t) {
    for (int c = 0; c < 3; ++c) i32(t[c]);
  }
  std::string take() { return std::move(out_); }

 private:
  std::string out_;
};

class Reader {
 public:
  explicit Reader(const std::string& in) : in_(in) {}
  void raw(char* p, size_t n) {
    need(n);
    std::memcpy(p, in_.data() + pos_, n);
    pos_ += n;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= std::uint64_t(static_cast<unsigned char>(in_[pos_ + i])) << (8 * i);
    pos_ += 8;
    return v;
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::uint32_t(static_cast<unsigned char>(in_[pos_ + i])) << (8 * i);
    pos_ += 4;
    return v;
  }
  int i32() { return static_cast<int>(u32()); }
  int count() {
    const int n = i32();
    if (n < 0 || static_cast<size_t>(n) > in_.size()) throw Error("corrupt collapse log: bad count");
    return n;
  }
  double f64() { return std::bit_cast<double>(u64()); }
  Vec3 vec3() {
    Vec3 v;
    for (int c = 0; c < 3; ++c) v[c] = f64();
    return v;
  }
  Eigen::Vector3i triple() {
    Eigen::Vector3i t;
    for (int c = 0; c < 3; ++c) t[c] = i32();
    return t;
  }
  bool done() const { return pos_ == in_.size(); }

 private:
  void need(size_t n) const {
    if (pos_ + n > in_.size()) throw Error("corrupt collapse log: truncated");
  }
  const std::string& in_;
  size_t pos_ = 0;
};

void write_patches(Writer& w, const std::vector<CollapseRecord::FacePatch>& patches) {
  w.i32(static_cast<int>(patches.size()));
  for (const auto& [slot, t] : patches) {
    w.i32(slot);
    w.triple(t);
  }
}

std::vector<CollapseRecord::FacePatch> read_patches(Reader& r) {
  std::vector<CollapseRecord::FacePatch> out(r.count());
  for (auto& p : out) {
    p.first = r.i32();
    p.second = r.triple();
  }
  return out;
}

}  // namespace

std::string serialize_log(const CollapseLog& log) {
  Writer w;
  w.raw(kMagic, 4);
  w.u32(kVersion);
  w.u64(log.fingerprint);
  w.i32(log.original_vertices);
  w.i32(log.original_faces);
  w.i32(static_cast<int>(log.records.size()));
  w.i32(static_cast<int>(log.coarse_ids.size()));
  w.i32(static_cast<int>(log.coarse_slots.size()));
  for (size_t c = 0; c < log.coarse_ids.size(); ++c) {
    w.i32(log.coarse_ids[c]);
    w.vec3(log.coarse.positions.row(c).transpose());
  }
  for (size_t f = 0; f < log.coarse_slots.size(); ++f) {
    w.i32(log.coarse_slots[f]);
    w.triple(log.coarse.faces.row(f).transpose());
  }
  for (const CollapseRecord& r : log.records) {
    w.i32(r.inserted);
    w.i32(r.removed[0]);
    w.i32(r.removed[1]);
    w.vec3(r.offset[0]);
    w.vec3(r.offset[1]);
    w.i32(r.regularized ? 1 : 0);
    w.i32(static_cast<int>(r.ring.size()));
    for (size_t c = 0; c < r.ring.size(); ++c) {
      w.i32(r.ring[c]);
      w.vec3(r.affine.col(c));
    }
    write_patches(w, r.removed_faces);
    write_patches(w, r.rewired_faces);
  }
  return w.take();
}

CollapseLog deserialize_log(const std::string& bytes) {
  Reader r(bytes);
  char magic[4];
  r.raw(magic, 4);
  if (std::memcmp(magic, kMagic, 4) != 0) throw Error("not a collapse log");
  const std::uint32_t version = r.u32();
  if (version != kVersion) throw Error("unsupported collapse log version " + std::to_string(version));
  CollapseLog log;
  log.fingerprint = r.u64();
  log.original_vertices = r.count();
  log.original_faces = r.count();
  const int records = r.count();
  const int nv = r.count();
  const int nf = r.count();
  Positions p(nv, 3);
  log.coarse_ids.resize(nv);
  for (int c = 0; c < nv; ++c) {
    log.coarse_ids[c] = r.i32();
    p.row(c) = r.vec3().transpose();
  }
  Faces f(nf, 3);
  log.coarse_slots.resize(nf);
  for (int k = 0; k < nf; ++k) {
    log.coarse_slots[k] = r.i32();
    f.row(k) = r.triple().transpose();
  }
  log.coarse = make_mesh(std::move(p), std::move(f));
  log.records.resize(records);
  for (CollapseRecord& rec : log.records) {
    rec.inserted = r.i32();
    rec.removed[0] = r.i32();
    rec.removed[1] = r.i32();
    rec.offset[0] = r.vec3();
    rec.offset[1] = r.vec3();
    rec.regularized = r.i32() != 0;
    const int ring = r.count();
    rec.ring.resize(ring);
    rec.affine.resize(3, ring);
    for (int c = 0; c < ring; ++c) {
      rec.ring[c] = r.i32();
      rec.affine.col(c) = r.vec3();
    }
    rec.removed_faces = read_patches(r);
    rec.rewired_faces = read_patches(r);
  }
  if (!r.done()) throw Error("corrupt collapse log: trailing bytes");
  return log;
}

void save_log(const CollapseLog& log, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  const std::string bytes = serialize_log(log);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("cannot write " + path);
}

CollapseLog load_log(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path);
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return deserialize_log(bytes);
}

}  // namespace cubify
