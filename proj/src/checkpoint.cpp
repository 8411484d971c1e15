/* Copyright 2026 The KGPL Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "kgpl/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>

namespace kgpl {

namespace {

constexpr char kMagic[5] = {'K', 'G', 'P', 'L', '1'};

template <typename U>
void put_le(std::ostream& out, U v) {
  unsigned char bytes[sizeof(U)];
  for (std::size_t k = 0; k < sizeof(U); ++k) bytes[k] = static_cast<unsigned char>(v >> (8 * k));
  out.write(reinterpret_cast<const char*>(bytes), sizeof(U));
}

template <typename U>
U get_le(std::istream& in, const std::filesystem::path& path) {
  unsigned char bytes[sizeof(U)];
  if (!in.read(reinterpret_cast<char*>(bytes), sizeof(U))) {
    throw DataError("truncated checkpoint " + path.string());
  }
  U v = 0;
  for (std::size_t k = 0; k < sizeof(U); ++k) v |= static_cast<U>(bytes[k]) << (8 * k);
  return v;
}

void put_tensors(std::ostream& out, const ModelParams& p) {
  for (const Matrix* m : p.tensors())
    for (double v : m->flat()) put_le(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
}

void get_tensors(std::istream& in, ModelParams& p, const std::filesystem::path& path) {
  for (Matrix* m : p.tensors())
    for (double& v : m->flat()) v = std::bit_cast<float>(get_le<std::uint32_t>(in, path));
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const ModelParams& params,
                     const AdamState& optimizer) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write checkpoint " + path.string());
  out.write(kMagic, sizeof(kMagic));
  const auto& d = params.dims;
  for (std::size_t v : {d.num_users, d.num_entities, d.num_relations, d.dim, d.layers}) {
    put_le(out, static_cast<std::uint32_t>(v));
  }
  put_tensors(out, params);
  put_le(out, optimizer.step);
  if (optimizer.first.dims == params.dims) {
    put_tensors(out, optimizer.first);
    put_tensors(out, optimizer.second);
  } else {
    const auto zero = ModelParams::zeros(params.dims);
    put_tensors(out, zero);
    put_tensors(out, zero);
  }
  if (!out) throw DataError("failed writing checkpoint " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path,
                           const std::optional<ModelDims>& expected) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint " + path.string());
  char magic[sizeof(kMagic)];
  if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw DataError(path.string() + " is not a KGPL1 checkpoint");
  }
  ModelDims dims;
  dims.num_users = get_le<std::uint32_t>(in, path);
  dims.num_entities = get_le<std::uint32_t>(in, path);
  dims.num_relations = get_le<std::uint32_t>(in, path);
  dims.dim = get_le<std::uint32_t>(in, path);
  dims.layers = get_le<std::uint32_t>(in, path);
  if (dims.dim == 0 || dims.layers == 0) throw DataError("checkpoint has zero dim or layers");
  if (expected && !(*expected == dims)) {
    throw DataError("checkpoint dimensions do not match the dataset/config: " + path.string());
  }
  Checkpoint ck{ModelParams::zeros(dims), AdamState::zeros(dims)};
  get_tensors(in, ck.params, path);
  ck.optimizer.step = get_le<std::uint64_t>(in, path);
  get_tensors(in, ck.optimizer.first, path);
  get_tensors(in, ck.optimizer.second, path);
  return ck;
}

}  // namespace kgpl
