// Copyright 2026 The IDRL Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "idrl/nn/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "idrl/errors.hpp"

namespace idrl::nn {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes little-endian");

namespace {

constexpr char kMagic[8] = {'I', 'D', 'R', 'L', 'Q', 'N', 'E', 'T'};

void write_u32(std::ostream& out, std::uint32_t v) { out.write(reinterpret_cast<const char*>(&v), 4); }

void write_string(std::ostream& out, const std::string& s) {
  write_u32(out, static_cast<std::uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::uint32_t read_u32(std::istream& in) {
  std::uint32_t v = 0;
  if (!in.read(reinterpret_cast<char*>(&v), 4)) throw FormatError("checkpoint truncated");
  return v;
}

std::string read_string(std::istream& in) {
  const std::uint32_t n = read_u32(in);
  if (n > (1u << 20)) throw FormatError("checkpoint string too long");
  std::string s(n, '\0');
  if (!in.read(s.data(), n)) throw FormatError("checkpoint truncated");
  return s;
}

}  // namespace

template <typename T>
void save_checkpoint(const BasicQNetwork<T>& net, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write checkpoint " + path.string());
  out.write(kMagic, sizeof kMagic);
  write_u32(out, kCheckpointVersion);
  write_string(out, net.architecture());
  const auto params = net.parameters();
  write_u32(out, static_cast<std::uint32_t>(params.size()));
  for (const Param<T>* p : params) {
    write_string(out, p->name);
    write_u32(out, static_cast<std::uint32_t>(p->dims.size()));
    for (int d : p->dims) write_u32(out, static_cast<std::uint32_t>(d));
    for (T v : p->value) {
      const double d = static_cast<double>(v);
      out.write(reinterpret_cast<const char*>(&d), sizeof d);
    }
  }
  if (!out) throw Error("short write to checkpoint " + path.string());
}

template <typename T>
BasicQNetwork<T> load_checkpoint(const std::filesystem::path& path,
                                 const std::optional<std::string>& expected_architecture) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open checkpoint " + path.string());
  char magic[8];
  if (!in.read(magic, 8) || std::memcmp(magic, kMagic, 8) != 0) {
    throw FormatError(path.string() + ": not a network checkpoint");
  }
  const std::uint32_t version = read_u32(in);
  if (version != kCheckpointVersion) {
    throw FormatError(path.string() + ": unsupported checkpoint version " + std::to_string(version));
  }
  const std::string arch = read_string(in);
  if (expected_architecture && *expected_architecture != arch) {
    throw FormatError("checkpoint architecture '" + arch + "' does not match expected '" +
                      *expected_architecture + "'");
  }
  BasicQNetwork<T> net(NetworkConfig::parse_architecture(arch), 0);
  auto params = net.parameters();
  if (read_u32(in) != params.size()) throw FormatError("checkpoint tensor count mismatch");
  for (Param<T>* p : params) {
    if (read_string(in) != p->name) throw FormatError("checkpoint tensor name mismatch");
    const std::uint32_t rank = read_u32(in);
    if (rank != p->dims.size()) throw FormatError("checkpoint tensor rank mismatch");
    for (int d : p->dims) {
      if (read_u32(in) != static_cast<std::uint32_t>(d)) throw FormatError("checkpoint tensor shape mismatch");
    }
    for (T& v : p->value) {
      double d = 0;
      if (!in.read(reinterpret_cast<char*>(&d), sizeof d)) throw FormatError("checkpoint truncated");
      v = static_cast<T>(d);
    }
  }
  return net;
}

template void save_checkpoint(const BasicQNetwork<float>&, const std::filesystem::path&);
template void save_checkpoint(const BasicQNetwork<double>&, const std::filesystem::path&);
template BasicQNetwork<float> load_checkpoint(const std::filesystem::path&, const std::optional<std::string>&);
template BasicQNetwork<double> load_checkpoint(const std::filesystem::path&, const std::optional<std::string>&);

}  // namespace idrl::nn
