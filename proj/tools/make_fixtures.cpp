// Regenerates the bundled fixtures under data/ (all from seed 0):
//   demo_lr.csv      n=200, m=3, y = x1 + 0.5 x2 + N(0,1)
//   ar2.txt          n=5000, X_i = 0.5 X_{i-1} - 0.3 X_{i-2} + N(0,1)
//   white_noise.txt  n=5000, N(0,1)
//   constant.txt     n=50, all 5

#include <fstream>
#include <iostream>
#include <string>

#include "hqlab/simlab.hpp"

namespace {

void write_series(const std::string& path, const hqlab::ARSeries& s) {
  std::ofstream out(path);
  out.precision(17);
  for (double v : s.samples()) out << v << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  const std::string dir = argc > 1 ? argv[1] : "data";
  {
    const auto spec = hqlab::GeneratorSpec::lr(3, {0, 1}, {1.0, 0.5}, 1.0, 0);
    std::ofstream out(dir + "/demo_lr.csv");
    hqlab::write_dataset_csv(out, hqlab::generate_lr(spec, 200));
  }
  write_series(dir + "/ar2.txt", hqlab::generate_ar(hqlab::GeneratorSpec::ar({0.5, -0.3}, 1.0, 0), 5000));
  write_series(dir + "/white_noise.txt", hqlab::generate_ar(hqlab::GeneratorSpec::ar({}, 1.0, 0), 5000));
  {
    std::ofstream out(dir + "/constant.txt");
    for (int i = 0; i < 50; ++i) out << "5\n";
  }
  std::cout << "fixtures written to " << dir << '\n';
  return 0;
}
