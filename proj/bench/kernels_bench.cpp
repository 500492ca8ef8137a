// Copyright 2026 The offsetnav Authors
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


// Parallel vs serial kernel timings on solver-sized matrices, plus a batch of
// closed-loop runs. Usage: offsetnav_bench [repeats]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>

#include "offsetnav/kernels.hpp"
#include "offsetnav/simulator.hpp"
#include "offsetnav/solver.hpp"

using namespace offsetnav;

namespace {

Matrix random_matrix(int rows, int cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Matrix m(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) m(i, j) = normal(rng);
  return m;
}

double best_ms(int repeats, const std::function<void()>& body) {
  double best = 1e300;
  for (int i = 0; i < repeats; ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    body();
    const auto t1 = std::chrono::steady_clock::now();
    best = std::min(best, std::chrono::duration<double, std::milli>(t1 - t0).count());
  }
  return best;
}

void row(const char* name, double serial, double parallel, bool identical) {
  std::printf("%-28s %10.3f %10.3f %8.2fx  %s\n", name, serial, parallel, serial / parallel,
              identical ? "bit-identical" : "MISMATCH");
}

}  // namespace

int main(int argc, char** argv) {
  const int repeats = argc > 1 ? std::atoi(argv[1]) : 5;
  std::printf("threads: %d, best of %d\n", kernels::max_threads(), repeats);
  std::printf("%-28s %10s %10s %9s\n", "kernel", "serial ms", "omp ms", "speedup");

  std::mt19937_64 rng(7);
  const int d = 90, rc = 30, r = 2, n = 15000;
  const Matrix x = random_matrix(d, n, rng), e = random_matrix(rc, n, rng);
  const Matrix yhat = random_matrix(r, n, rng);
  const Matrix w = random_matrix(d, r, rng), u = random_matrix(rc, r, rng);

  Matrix gs, gp;
  const double g_serial = best_ms(repeats, [&] { gs = kernels::serial::gram(x); });
  const double g_par = best_ms(repeats, [&] { gp = kernels::gram(x); });
  row("gram X X^T (90 x 15000)", g_serial, g_par, gs == gp);

  Matrix cs, cp;
  const double c_serial = best_ms(repeats, [&] { cs = kernels::serial::cross(x, e); });
  const double c_par = best_ms(repeats, [&] { cp = kernels::cross(x, e); });
  row("cross X E^T", c_serial, c_par, cs == cp);

  double rs = 0.0, rp = 0.0;
  const double r_serial =
      best_ms(repeats, [&] { rs = kernels::serial::residual_squared_norm(yhat, w, x, u, e); });
  const double r_par = best_ms(repeats, [&] { rp = kernels::residual_squared_norm(yhat, w, x, u, e); });
  row("residual norm", r_serial, r_par, rs == rp);

  // Closed-loop batch: the same runs one seed at a time vs the parallel batch.
  const ModalityLayout layout({2, 2, 2}, 5, r);
  WeightW wm(layout);
  WeightU um(layout);
  wm.values()(layout.row(0, 2, 0), 0) = 1.0;
  um.set_block(0, Matrix::Identity(r, r));
  const auto profile = sim::with_slip(sim::preset("grass_to_large_rock"), 0.3);
  std::vector<std::uint64_t> seeds;
  for (std::uint64_t s = 0; s < 8; ++s) seeds.push_back(s);
  std::vector<sim::ClosedLoopRun> one_by_one, batch;
  const double b_serial = best_ms(std::max(1, repeats / 2), [&] {
    one_by_one.clear();
    for (auto s : seeds)
      one_by_one.push_back(sim::closed_loop_run(profile, wm, um, sim::Mode::kWithOffset, 4000,
                                                sim::kDefaultDt, s));
  });
  const double b_par = best_ms(std::max(1, repeats / 2), [&] {
    batch = sim::closed_loop_batch(profile, wm, um, sim::Mode::kWithOffset, 4000,
                                   sim::kDefaultDt, seeds);
  });
  bool same = one_by_one.size() == batch.size();
  for (std::size_t i = 0; same && i < batch.size(); ++i)
    same = one_by_one[i].actual_poses.size() == batch[i].actual_poses.size() &&
           one_by_one[i].actual_poses.back().x == batch[i].actual_poses.back().x;
  row("closed-loop batch (8 seeds)", b_serial, b_par, same);
  return 0;
}
