// Copyright 2026 The nvcodec Authors
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

#include "nvcodec/weight_set.h"

#include "gtest/gtest.h"
#include "nvcodec/errors.h"
#include "test_util.h"

namespace nvcodec {
namespace {

using testing::RandomVector;

WeightSet Sample() {
  CounterRng rng(1);
  WeightSet ws;
  ws.Put("a.dense", testing::RandomTensor(rng, {3, 4, 2}));
  const DenseMatrix big(16, 16, RandomVector(rng, 256));
  ws.PutMatrix("a.sparse", Matrix(MagnitudePrune(big, 0.75)));
  ws.PutMatrix("a.diag", Matrix(BlockDiagonalMatrix::FromDense(big, 4)));
  ws.SetMeta("k", "v");
  ws.SetMeta("n", "42");
  ws.SetMeta("x", "2.5");
  return ws;
}

TEST(WeightSetTest, SerializeParseRoundTrip) {
  const WeightSet ws = Sample();
  const auto bytes = ws.Serialize();
  ASSERT_GE(bytes.size(), 4u);
  EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 4), "NVW1");
  const WeightSet back = WeightSet::Parse(bytes);
  EXPECT_EQ(back.metadata(), ws.metadata());
  ASSERT_EQ(back.tensors().size(), 3u);
  for (const auto& [name, t] : ws.tensors()) {
    const StoredTensor& b = back.Get(name);
    EXPECT_EQ(b.tensor.shape, t.tensor.shape) << name;
    EXPECT_EQ(b.tensor.data, t.tensor.data) << name;
    EXPECT_EQ(b.sparsity, t.sparsity) << name;
    EXPECT_DOUBLE_EQ(b.sparsity_fraction(), t.sparsity_fraction()) << name;
  }
  EXPECT_EQ(back.Serialize(), bytes);
}

TEST(WeightSetTest, SparseMatricesKeepTheirStructure) {
  const WeightSet ws = WeightSet::Parse(Sample().Serialize());
  EXPECT_EQ(ws.Get("a.sparse").sparsity, SparsityTag::kBlock4x4);
  EXPECT_DOUBLE_EQ(ws.Get("a.sparse").sparsity_fraction(), 0.75);
  EXPECT_DOUBLE_EQ(Sparsity(ws.GetMatrix("a.sparse", 16, 16)), 0.75);
  EXPECT_TRUE(std::holds_alternative<BlockSparseMatrix>(ws.GetMatrix("a.sparse", 16, 16)));
  EXPECT_EQ(ws.Get("a.diag").sparsity, SparsityTag::kBlockDiagonal);
  EXPECT_DOUBLE_EQ(ws.Get("a.diag").sparsity_fraction(), 0.75);
  EXPECT_TRUE(std::holds_alternative<BlockDiagonalMatrix>(ws.GetMatrix("a.diag", 16, 16)));
  EXPECT_THROW(ws.GetMatrix("a.diag", 16, 8), ShapeError);
}

TEST(WeightSetTest, MissingAndMisshapedTensors) {
  const WeightSet ws = Sample();
  try {
    ws.Get("nope");
    FAIL() << "expected MissingTensorError";
  } catch (const MissingTensorError& e) {
    EXPECT_EQ(e.name(), "nope");
  }
  EXPECT_NO_THROW(ws.GetShaped("a.dense", {3, 4, 2}));
  try {
    ws.GetShaped("a.dense", {3, 4, 3});
    FAIL() << "expected ShapeError";
  } catch (const ShapeError& e) {
    EXPECT_NE(std::string(e.what()).find("a.dense"), std::string::npos);
  }
}

TEST(WeightSetTest, Metadata) {
  const WeightSet ws = Sample();
  EXPECT_EQ(ws.Meta("k").value(), "v");
  EXPECT_FALSE(ws.Meta("missing").has_value());
  EXPECT_EQ(ws.MetaOr("missing", "d"), "d");
  EXPECT_EQ(ws.MetaInt("n", 0), 42);
  EXPECT_EQ(ws.MetaInt("missing", 7), 7);
  EXPECT_DOUBLE_EQ(ws.MetaDouble("x", 0), 2.5);
  EXPECT_THROW(ws.MetaInt("k", 0), FormatError);
}

TEST(WeightSetTest, MergePrefersOther) {
  WeightSet a = Sample(), b;
  b.Put("a.dense", Tensor({1}, 9.0f));
  b.SetMeta("k", "w");
  a.Merge(b);
  EXPECT_EQ(a.Get("a.dense").tensor.data, std::vector<float>{9.0f});
  EXPECT_EQ(a.Meta("k").value(), "w");
  EXPECT_TRUE(a.Has("a.sparse"));
}

TEST(WeightSetTest, CorruptContainersAreRejected) {
  auto bytes = Sample().Serialize();
  auto bad = bytes;
  bad[0] = 'X';
  EXPECT_THROW(WeightSet::Parse(bad), FormatError);
  bad = bytes;
  bad[4] = 99;  // version
  EXPECT_THROW(WeightSet::Parse(bad), FormatError);
  for (size_t cut : {size_t{5}, bytes.size() / 2, bytes.size() - 1}) {
    EXPECT_THROW(WeightSet::Parse(std::span<const uint8_t>(bytes).first(cut)), FormatError) << cut;
  }
}

TEST(WeightSetTest, FileRoundTrip) {
  const std::string path = testing::TempPath("weights.nvw");
  Sample().Save(path);
  EXPECT_EQ(WeightSet::Load(path).Serialize(), Sample().Serialize());
  EXPECT_THROW(WeightSet::Load(path + ".absent"), IoError);
}

}  // namespace
}  // namespace nvcodec
