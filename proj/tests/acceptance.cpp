#include <malab/acceptance.hpp>

#include <cstdio>
#include <cstdlib>
#include <string>

int main(int argc, char** argv) {
  malab::AcceptanceOptions opt;
  for (int i = 1; i + 1 < argc; i += 2) {
    const std::string key = argv[i];
    if (key == "--seed")
      opt.seed = std::strtoull(argv[i + 1], nullptr, 10);
    else if (key == "--barrier-m-scale")
      opt.barrier_m_scale = std::strtod(argv[i + 1], nullptr);
  }
  int failed = 0;
  for (const auto& r : malab::acceptance_suite(opt)) {
    std::printf("%s\n", malab::ledger_line(r).c_str());
    if (!r.pass) ++failed;
  }
  std::printf("%d of 10 criteria passed\n", 10 - failed);
  return failed == 0 ? 0 : 1;
}
