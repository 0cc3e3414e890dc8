#include <eulerlab/acceptance.hpp>

#include <cstdio>
#include <cstring>

int main(int argc, char** argv) {
  eulerlab::acceptance::Options options;
  bool verbose = false;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--fast") == 0) options.fast = true;
    if (std::strcmp(argv[i], "--verbose") == 0) verbose = true;
  }
  bool all = true;
  eulerlab::acceptance::run("all", options, [&](const eulerlab::acceptance::CriterionResult& r) {
    std::printf("%s\n", eulerlab::acceptance::summary_line(r).c_str());
    if (verbose) {
      for (const auto& c : r.checks) std::printf("%s\n", eulerlab::acceptance::check_line(c).c_str());
    }
    std::fflush(stdout);
    all = all && r.pass();
  });
  return all ? 0 : 1;
}
