#pragma once

#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>

#include "clsm/corpus.hpp"
#include "clsm/error.hpp"

// Checks that `expr` throws clsm::Error of the given kind.
#define CHECK_THROWS_KIND(expr, error_kind)                                   \
  do {                                                                        \
    bool clsm_thrown_ = false;                                                \
    try {                                                                     \
      (void)(expr);                                                           \
    } catch (const clsm::Error& e) {                                          \
      clsm_thrown_ = true;                                                    \
      CHECK_MESSAGE(e.kind() == (error_kind), "got ", clsm::to_string(e.kind()), ": ", e.what()); \
    }                                                                         \
    CHECK_MESSAGE(clsm_thrown_, "expected a clsm::Error from " #expr);        \
  } while (0)

namespace clsm::testing {

inline Sentence make_sentence(const std::string& text, const std::string& article = "a",
                              Side side = Side::Simple, int id = 0) {
  Sentence s = tokenize(text);
  s.article_id = article;
  s.side = side;
  s.sentence_id = id;
  return s;
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& name) {
    path_ = std::filesystem::temp_directory_path() / ("clsm_test_" + name);
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  std::string file(const std::string& name) const { return (path_ / name).string(); }
  std::string write(const std::string& name, const std::string& text) const {
    std::ofstream(file(name), std::ios::binary) << text;
    return file(name);
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace clsm::testing
