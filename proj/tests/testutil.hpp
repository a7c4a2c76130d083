// Licensed under the Apache License, Version 2.0. See LICENSE in the project root.
#pragma once

#include <unistd.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "forge/corpus_io.hpp"

namespace testutil {

class TempDir {
 public:
  TempDir() {
    static std::atomic<unsigned> counter{0};
    const auto name = "forge_test_" + std::to_string(::getpid()) + "_" +
                      std::to_string(counter.fetch_add(1));
    path_ = std::filesystem::temp_directory_path() / name;
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::string file(const std::string& name) const { return (path_ / name).string(); }
  std::string dir() const { return path_.string(); }

 private:
  std::filesystem::path path_;
};

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void write_lines(const std::string& path, const std::vector<std::string>& lines) {
  std::ofstream out(path, std::ios::binary);
  for (const auto& line : lines) out << line << '\n';
}

inline forge::Sentence sent(std::string text, std::uint64_t line_no = 1) {
  return forge::Sentence{std::move(text), line_no};
}

inline forge::SentencePair pair(std::string src, std::string tgt, std::uint64_t line_no = 1) {
  return forge::SentencePair{forge::Sentence{std::move(src), line_no},
                             forge::Sentence{std::move(tgt), line_no}};
}

}  // namespace testutil
