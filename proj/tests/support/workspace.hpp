#pragma once

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace edcrowd::testing {

// Fresh directory under the system temp dir, removed on destruction.
class ScratchDir {
 public:
  explicit ScratchDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("edcrowd_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~ScratchDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  ScratchDir(const ScratchDir&) = delete;
  ScratchDir& operator=(const ScratchDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void spit(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

struct RunResult {
  int exit_code = -1;
  std::string stderr_text;
};

// Runs a shell command line, capturing stderr.
inline RunResult run_command(const std::string& cmd, const std::filesystem::path& stderr_file) {
  const int status = std::system((cmd + " 2> '" + stderr_file.string() + "'").c_str());
  RunResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.stderr_text = slurp(stderr_file);
  return r;
}

// Minimal XML well-formedness check: balanced, properly nested elements,
// quoted attribute values, one root.
inline bool well_formed_xml(const std::string& s, std::string* why = nullptr) {
  auto fail = [&](const std::string& m) {
    if (why) *why = m;
    return false;
  };
  std::vector<std::string> stack;
  int roots = 0;
  std::size_t i = 0;
  while (i < s.size()) {
    if (s[i] != '<') {
      if (stack.empty() && !std::isspace(static_cast<unsigned char>(s[i]))) return fail("text outside root");
      if (s[i] == '&') {
        const auto semi = s.find(';', i);
        if (semi == std::string::npos || semi - i > 8) return fail("bad entity");
      }
      ++i;
      continue;
    }
    if (s.compare(i, 4, "<!--") == 0) {
      const auto end = s.find("-->", i + 4);
      if (end == std::string::npos) return fail("unterminated comment");
      i = end + 3;
      continue;
    }
    if (s.compare(i, 2, "<?") == 0) {
      const auto end = s.find("?>", i + 2);
      if (end == std::string::npos) return fail("unterminated declaration");
      i = end + 2;
      continue;
    }
    std::size_t j = i + 1;
    const bool closing = j < s.size() && s[j] == '/';
    if (closing) ++j;
    std::size_t name_end = j;
    while (name_end < s.size() && (std::isalnum(static_cast<unsigned char>(s[name_end])) ||
                                   s[name_end] == '-' || s[name_end] == ':' || s[name_end] == '_')) {
      ++name_end;
    }
    const std::string name = s.substr(j, name_end - j);
    if (name.empty()) return fail("empty tag name");
    std::size_t k = name_end;
    bool self_closing = false;
    while (true) {
      if (k >= s.size()) return fail("unterminated tag " + name);
      const char c = s[k];
      if (c == '>') break;
      if (c == '/' && k + 1 < s.size() && s[k + 1] == '>') {
        self_closing = true;
        ++k;
        break;
      }
      if (c == '"' || c == '\'') {
        const auto end = s.find(c, k + 1);
        if (end == std::string::npos) return fail("unterminated attribute in " + name);
        if (s.find('<', k + 1) < end) return fail("'<' inside attribute");
        k = end + 1;
        continue;
      }
      if (c == '=') {
        if (k + 1 >= s.size() || (s[k + 1] != '"' && s[k + 1] != '\'')) return fail("unquoted attribute");
      }
      ++k;
    }
    if (closing) {
      if (stack.empty() || stack.back() != name) return fail("mismatched </" + name + ">");
      stack.pop_back();
    } else if (!self_closing) {
      if (stack.empty()) ++roots;
      stack.push_back(name);
    } else if (stack.empty()) {
      ++roots;
    }
    i = k + 1;
  }
  if (!stack.empty()) return fail("unclosed <" + stack.back() + ">");
  if (roots != 1) return fail("expected one root element");
  return true;
}

inline std::size_t count_occurrences(const std::string& s, const std::string& needle) {
  std::size_t n = 0;
  for (auto p = s.find(needle); p != std::string::npos; p = s.find(needle, p + needle.size())) ++n;
  return n;
}

}  // namespace edcrowd::testing
