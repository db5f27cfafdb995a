#include "fft.hpp"

#include <fftw3.h>

#include <cstring>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <tuple>

namespace imlab {

namespace {

std::mutex planner_mutex;  // FFTW planning is not thread-safe

struct PlanEntry {
  fftw_plan plan = nullptr;
  fftw_complex* in = nullptr;
  fftw_complex* out = nullptr;
  std::size_t total = 0;

  PlanEntry(int d, int n, int sign) {
    total = 1;
    for (int i = 0; i < d; ++i) total *= static_cast<std::size_t>(n);
    in = fftw_alloc_complex(total);
    out = fftw_alloc_complex(total);
    if (!in || !out) throw std::bad_alloc();
    int dims[3] = {n, n, n};
    std::lock_guard<std::mutex> lock(planner_mutex);
    plan = fftw_plan_dft(d, dims, in, out, sign, FFTW_ESTIMATE);
    if (!plan) throw std::runtime_error("fftw plan creation failed");
  }
  ~PlanEntry() {
    std::lock_guard<std::mutex> lock(planner_mutex);
    if (plan) fftw_destroy_plan(plan);
    fftw_free(in);
    fftw_free(out);
  }
  PlanEntry(const PlanEntry&) = delete;
  PlanEntry& operator=(const PlanEntry&) = delete;
};

PlanEntry& plan_for(int d, int n, int sign) {
  thread_local std::map<std::tuple<int, int, int>, std::unique_ptr<PlanEntry>> cache;
  auto key = std::make_tuple(d, n, sign);
  auto it = cache.find(key);
  if (it == cache.end())
    it = cache.emplace(key, std::make_unique<PlanEntry>(d, n, sign)).first;
  return *it->second;
}

void run(int d, int n, int sign, const std::vector<std::complex<double>>& in,
         std::vector<std::complex<double>>& out) {
  PlanEntry& e = plan_for(d, n, sign);
  if (in.size() != e.total) throw std::invalid_argument("dft: input size mismatch");
  out.resize(e.total);
  std::memcpy(e.in, in.data(), e.total * sizeof(fftw_complex));
  fftw_execute(e.plan);
  std::memcpy(out.data(), e.out, e.total * sizeof(fftw_complex));
}

}  // namespace

void dft_backward(int d, int n, const std::vector<std::complex<double>>& in,
                  std::vector<std::complex<double>>& out) {
  run(d, n, FFTW_BACKWARD, in, out);
}

void dft_forward(int d, int n, const std::vector<std::complex<double>>& in,
                 std::vector<std::complex<double>>& out) {
  run(d, n, FFTW_FORWARD, in, out);
  const double scale = 1.0 / static_cast<double>(out.size());
  for (auto& z : out) z *= scale;
}

}  // namespace imlab
