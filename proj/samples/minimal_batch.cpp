// Smallest useful program: one batch at installation level L1 with 2 px noise.
#include <cstdio>

#include "biplanar.hpp"

int main() {
  using namespace biplanar;
  ScenarioConfig c = with_level(default_config(), level_preset("L1"));
  c.noise.sigma_px = 2.0;
  c.trials = 1000;
  const BatchSummary s = summarize_batch(run_batch(c, {4, {}}));
  std::printf("trials %zu, failures %zu\n", s.trials, s.failures);
  std::printf("e_3d  mean %.4f mm  p95 %.4f mm\n", s.e_3d->mean, s.e_3d->p95);
  std::printf("e_tcp mean %.4f mm  p95 %.4f mm\n", s.e_tcp->mean, s.e_tcp->p95);
  std::printf("reprojection mean %.4f px\n", s.e_reproj->mean);
}
