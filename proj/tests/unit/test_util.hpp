// Copyright 2026 The P-PET Authors
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

#ifndef PPET_TESTS__TEST_UTIL_HPP_
#define PPET_TESTS__TEST_UTIL_HPP_

#include "ppet/errors.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <random>
#include <string>

namespace ppet::test
{

/// Runs `fn` and reports whether it threw ppet::Error with `code`.
template <typename F>
::testing::AssertionResult throws_code(F && fn, Errc code)
{
  try {
    fn();
  } catch (const Error & e) {
    if (e.code() == code) {
      return ::testing::AssertionSuccess();
    }
    return ::testing::AssertionFailure() << "threw " << to_string(e.code()) << ": " << e.what();
  } catch (const std::exception & e) {
    return ::testing::AssertionFailure() << "threw std::exception: " << e.what();
  }
  return ::testing::AssertionFailure() << "did not throw";
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir
{
public:
  TempDir()
  {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("ppet_test_" + std::to_string(rd()) + "_" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir()
  {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir &) = delete;
  TempDir & operator=(const TempDir &) = delete;

  const std::filesystem::path & path() const { return path_; }
  std::string str(const std::string & leaf = "") const { return (path_ / leaf).string(); }

private:
  std::filesystem::path path_;
};

}  // namespace ppet::test

#endif  // PPET_TESTS__TEST_UTIL_HPP_
