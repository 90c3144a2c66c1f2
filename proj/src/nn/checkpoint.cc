/*
 * Copyright 2026 The mabr-sim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "nn/checkpoint.h"

#include <cstdint>
#include <fstream>

#include "common/error.h"

namespace mabr::nn {
namespace {

constexpr char kMagic[8] = {'M', 'B', 'R', 'C', 'K', 'P', 'T', '1'};

template <typename T>
void WritePod(std::ofstream& out, const T& value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
void ReadPod(std::ifstream& in, T* value) {
  in.read(reinterpret_cast<char*>(value), sizeof(T));
  if (!in) throw ParseError("checkpoint truncated");
}

void WriteString(std::ofstream& out, const std::string& s) {
  WritePod(out, static_cast<uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string ReadString(std::ifstream& in) {
  uint32_t len = 0;
  ReadPod(in, &len);
  if (len > 4096) throw ParseError("checkpoint: implausible string length");
  std::string s(len, '\0');
  in.read(s.data(), len);
  if (!in) throw ParseError("checkpoint truncated");
  return s;
}

}  // namespace

void SaveCheckpoint(const PolicyParameters& params, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write checkpoint: " + path);
  out.write(kMagic, sizeof(kMagic));

  const NetworkSpec& spec = params.spec;
  WritePod(out, static_cast<int32_t>(spec.input_dim));
  WritePod(out, static_cast<int32_t>(spec.gru_units));
  WritePod(out, static_cast<int32_t>(spec.fc1_units));
  WritePod(out, static_cast<int32_t>(spec.fc2_units));
  WritePod(out, static_cast<int32_t>(spec.head == NetworkSpec::Head::kSoftmax ? 0 : 1));
  WritePod(out, static_cast<int32_t>(spec.head_dim));
  WritePod(out, static_cast<uint64_t>(params.init_seed));
  WriteString(out, params.stage_tag);
  WritePod(out, static_cast<uint32_t>(params.frozen_input_columns.size()));
  for (int col : params.frozen_input_columns) {
    WritePod(out, static_cast<int32_t>(col));
  }

  ForEachTensor(const_cast<TensorSet&>(params.weights), [&out](const auto& t) {
    WritePod(out, static_cast<int64_t>(t.rows()));
    WritePod(out, static_cast<int64_t>(t.cols()));
    out.write(reinterpret_cast<const char*>(t.data()),
              static_cast<std::streamsize>(sizeof(double) * t.size()));
  });
  if (!out) throw ConfigError("checkpoint write failed: " + path);
}

PolicyParameters LoadCheckpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open checkpoint: " + path);
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::string(magic, 8) != std::string(kMagic, 8)) {
    throw ParseError("not a checkpoint file: " + path);
  }

  PolicyParameters params;
  int32_t v = 0;
  ReadPod(in, &v); params.spec.input_dim = v;
  ReadPod(in, &v); params.spec.gru_units = v;
  ReadPod(in, &v); params.spec.fc1_units = v;
  ReadPod(in, &v); params.spec.fc2_units = v;
  ReadPod(in, &v);
  params.spec.head = v == 0 ? NetworkSpec::Head::kSoftmax : NetworkSpec::Head::kScalar;
  ReadPod(in, &v); params.spec.head_dim = v;
  uint64_t seed = 0;
  ReadPod(in, &seed);
  params.init_seed = seed;
  params.stage_tag = ReadString(in);
  uint32_t frozen_count = 0;
  ReadPod(in, &frozen_count);
  if (frozen_count > 1024) throw ParseError("checkpoint: implausible frozen count");
  for (uint32_t i = 0; i < frozen_count; ++i) {
    int32_t col = 0;
    ReadPod(in, &col);
    params.frozen_input_columns.push_back(col);
  }

  params.weights = TensorSet::Zero(params.spec);
  ForEachTensor(params.weights, [&in, &path](auto& t) {
    int64_t rows = 0, cols = 0;
    ReadPod(in, &rows);
    ReadPod(in, &cols);
    if (rows != t.rows() || cols != t.cols()) {
      throw ParseError("checkpoint layout mismatch: " + path);
    }
    in.read(reinterpret_cast<char*>(t.data()),
            static_cast<std::streamsize>(sizeof(double) * t.size()));
    if (!in) throw ParseError("checkpoint truncated: " + path);
  });
  return params;
}

}  // namespace mabr::nn
