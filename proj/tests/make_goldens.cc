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

// Writes the kernel golden files, or checks that committed ones are
// reproducible.
//
//   make_goldens <dir>           regenerate <dir>/<family>.nvw
//   make_goldens --verify <dir>  exit 1 unless every file matches byte for byte

#include <cstdio>
#include <filesystem>
#include <string>

#include "golden.h"
#include "nvcodec/errors.h"

namespace {

constexpr uint64_t kGoldenSeed = 20240901;

int Main(int argc, char** argv) {
  const bool verify = argc == 3 && std::string(argv[1]) == "--verify";
  if (argc != 2 && !verify) {
    std::fprintf(stderr, "usage: make_goldens [--verify] <dir>\n");
    return 2;
  }
  const std::filesystem::path dir = argv[argc - 1];
  if (!verify) std::filesystem::create_directories(dir);
  int failures = 0;
  for (const std::string& family : nvcodec::golden::Families()) {
    const nvcodec::WeightSet ws = nvcodec::golden::Generate(family, kGoldenSeed);
    const auto bytes = ws.Serialize();
    // Self-check: the parsed file must agree with a fresh reference computation.
    const auto check = nvcodec::golden::VerifyAgainstOracle(nvcodec::WeightSet::Parse(bytes));
    if (!check.ok()) {
      std::fprintf(stderr, "%s: reference self-check failed (%g)\n", family.c_str(), check.worst);
      ++failures;
      continue;
    }
    const std::string path = (dir / (family + ".nvw")).string();
    if (verify) {
      const bool same = nvcodec::WeightSet::Load(path).Serialize() == bytes;
      std::printf("%s %s\n", same ? "same" : "DIFFERS", path.c_str());
      failures += same ? 0 : 1;
    } else {
      ws.Save(path);
      std::printf("wrote %s (%d cases)\n", path.c_str(), check.cases);
    }
  }
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return Main(argc, argv);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
