// Copyright 2026 The knowbal Authors
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

#ifndef KNOWBAL_TESTS_TEST_UTIL_H
#define KNOWBAL_TESTS_TEST_UTIL_H

#include <cstdlib>
#include <filesystem>
#include <string>

#include "knowbal/circuit_dsl.h"
#include "knowbal/validity.h"

namespace knowbal::testing {

// "1v2", "(1,1)|(2,2)", "prod(1v3, 2v4)".
inline EpistemicState S(const std::string &text) { return parse_state(text); }

inline std::string cache_dir() {
    if (const char *env = std::getenv("KNOWBAL_TEST_CACHE")) return env;
    return (std::filesystem::temp_directory_path() / "knowbal-test-cache").string();
}

// Catalogs shared across the tests of one binary, persisted between binaries.
inline CatalogStore &store() {
    static CatalogStore s(cache_dir());
    return s;
}

}  // namespace knowbal::testing

#endif  // KNOWBAL_TESTS_TEST_UTIL_H
