#ifndef MLPROV_TESTS_HELPERS_HPP_
#define MLPROV_TESTS_HELPERS_HPP_

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace testutil {

inline std::string source_dir() { return MLPROV_SOURCE_DIR; }
inline std::string fixture(const std::string &name) {
  return source_dir() + "/fixtures/" + name;
}
inline std::string corpus_dir() { return source_dir() + "/corpus/mini"; }
inline std::string kb_path() { return source_dir() + "/kb/kb.json"; }

inline std::string read_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline std::vector<std::string> corpus_scripts() {
  std::vector<std::string> out;
  for (const auto &entry : std::filesystem::directory_iterator(corpus_dir())) {
    if (entry.path().extension() == ".py") out.push_back(entry.path().string());
  }
  std::sort(out.begin(), out.end());
  return out;
}

} // namespace testutil

#endif // MLPROV_TESTS_HELPERS_HPP_
