#pragma once

#include <fftw3.h>

#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <tuple>

#include "nl4s/grid.hpp"

namespace nl4s::fft {

using cplx = std::complex<double>;

enum class Direction { forward, backward };

namespace detail {

struct PlanDeleter {
  void operator()(fftw_plan_s* p) const { fftw_destroy_plan(p); }
};
using PlanHandle = std::unique_ptr<fftw_plan_s, PlanDeleter>;

/// Process-wide cache of in-place, unaligned-capable plans keyed by lattice
/// shape. The FFTW planner is not reentrant, so creation is serialized;
/// executing a cached plan on fresh arrays is safe from any thread.
class PlanCache {
public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  fftw_plan get(int dim, int n0, int n1, Direction dir) {
    const auto key = std::make_tuple(dim, n0, n1, dir == Direction::forward);
    std::lock_guard lock(mutex_);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second.get();

    const int sign = dir == Direction::forward ? FFTW_FORWARD : FFTW_BACKWARD;
    const std::size_t n = static_cast<std::size_t>(n0) * static_cast<std::size_t>(n1);
    auto* scratch = fftw_alloc_complex(n);
    fftw_plan plan = dim == 1
        ? fftw_plan_dft_1d(n0, scratch, scratch, sign, FFTW_ESTIMATE | FFTW_UNALIGNED)
        : fftw_plan_dft_2d(n0, n1, scratch, scratch, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(scratch);
    auto [it, inserted] = plans_.emplace(key, PlanHandle(plan));
    return it->second.get();
  }

private:
  PlanCache() = default;
  std::mutex mutex_;
  std::map<std::tuple<int, int, int, bool>, PlanHandle> plans_;
};

}  // namespace detail

/// Unnormalized in-place DFT over the grid's lattice shape.
inline void execute(const Grid& grid, std::span<cplx> data, Direction dir) {
  fftw_plan plan = detail::PlanCache::instance().get(grid.dim(), grid.points(0),
                                                      grid.points(1), dir);
  auto* p = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plan, p, p);
}

}  // namespace nl4s::fft
