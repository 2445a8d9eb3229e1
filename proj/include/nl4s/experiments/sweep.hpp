#pragma once

#include <atomic>
#include <exception>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "nl4s/errors.hpp"
#include "nl4s/experiments/params.hpp"
#include "nl4s/experiments/studies.hpp"

namespace nl4s::experiments {

enum class PointStatus { ok, config_error, guard_error, failed };

inline std::string_view to_string(PointStatus s) {
  switch (s) {
    case PointStatus::ok: return "ok";
    case PointStatus::config_error: return "config-error";
    case PointStatus::guard_error: return "guard-error";
    case PointStatus::failed: return "failed";
  }
  return "failed";
}

struct PointOutcome {
  std::size_t index = 0;
  StudyPoint point;
  PointStatus status = PointStatus::failed;
  std::string message;
  std::optional<StudyResult> result;
};

inline PointOutcome run_point(std::size_t index, const StudyPoint& pt) {
  PointOutcome out;
  out.index = index;
  out.point = pt;
  try {
    out.result = run_study(pt.study, pt.params);
    out.status = PointStatus::ok;
  } catch (const ConfigError& e) {
    out.status = PointStatus::config_error;
    out.message = e.what();
  } catch (const ZeroModeObstruction& e) {
    out.status = PointStatus::config_error;
    out.message = e.what();
  } catch (const NumericalGuardError& e) {
    out.status = PointStatus::guard_error;
    out.message = e.what();
  } catch (const std::exception& e) {
    out.status = PointStatus::failed;
    out.message = e.what();
  }
  return out;
}

/// Runs every point on up to `workers` threads. Outcomes come back in plan
/// order whatever the scheduling, and one failing point never stops the rest.
inline std::vector<PointOutcome> run_sweep(const RunPlan& plan, int workers = 1) {
  const std::size_t n = plan.points.size();
  std::vector<PointOutcome> out(n);
  if (n == 0) return out;
  const auto count = static_cast<std::size_t>(std::max(1, workers));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) out[i] = run_point(i, plan.points[i]);
  };
  if (count == 1) {
    work();
    return out;
  }
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < std::min(count, n); ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  return out;
}

}  // namespace nl4s::experiments
