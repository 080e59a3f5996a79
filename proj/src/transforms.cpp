#include "dsqg/transforms.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>

#include "dsqg/errors.hpp"

namespace dsqg {
namespace {

// FFTW planning is not thread-safe; execution of an existing plan on new arrays is.
class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  fftw_plan get(int n0, int n1, fftw_r2r_kind k0, fftw_r2r_kind k1) {
    const auto key = std::make_tuple(n0, n1, static_cast<int>(k0), static_cast<int>(k1));
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second;
    const std::size_t count = static_cast<std::size_t>(n0) * n1;
    double* in = fftw_alloc_real(count);
    double* out = fftw_alloc_real(count);
    fftw_plan plan =
        fftw_plan_r2r_2d(n0, n1, in, out, k0, k1, FFTW_ESTIMATE | FFTW_UNALIGNED | FFTW_DESTROY_INPUT);
    fftw_free(in);
    fftw_free(out);
    if (plan == nullptr) throw NumericError("FFTW failed to create a plan");
    plans_.emplace(key, plan);
    return plan;
  }

  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

 private:
  std::mutex mutex_;
  std::map<std::tuple<int, int, int, int>, fftw_plan> plans_;
};

fftw_r2r_kind kind_of(Parity p) { return p == Parity::kSine ? FFTW_RODFT00 : FFTW_REDFT00; }

// Scale applied to coefficient j (0-based within its axis) before the synthesis transform.
double synthesis_weight(Parity p, int j, int m) {
  if (p == Parity::kSine) return 0.5;
  return (j == 0 || j == m) ? 1.0 : 0.5;
}

// Scale applied to transform output j to recover coefficient j.
double analysis_weight(Parity p, int j, int m) {
  if (p == Parity::kSine) return 1.0 / m;
  return (j == 0 || j == m) ? 1.0 / (2.0 * m) : 1.0 / m;
}

void check_modes(Parity p, int k, int m) {
  if (m < 2) throw ConfigurationError("transform grid needs at least 2 cells");
  const int limit = p == Parity::kSine ? m - 1 : m;
  if (k < 0 || k > limit) throw ConfigurationError("mode count exceeds the transform grid");
}

}  // namespace

std::vector<double> synthesize(std::span<const double> coeffs, int k, Parity px, Parity py, int m) {
  check_modes(px, k, m);
  check_modes(py, k, m);
  const int cx = coefficient_count(px, k);
  const int cy = coefficient_count(py, k);
  if (coeffs.size() != static_cast<std::size_t>(cx) * cy)
    throw ShapeError("coefficient block has the wrong size");
  const int sx = sample_count(px, m);
  const int sy = sample_count(py, m);

  std::vector<double> in(static_cast<std::size_t>(sx) * sy, 0.0);
  for (int a = 0; a < cx; ++a) {
    const double wa = synthesis_weight(px, a, m);
    for (int b = 0; b < cy; ++b) {
      in[static_cast<std::size_t>(a) * sy + b] =
          coeffs[static_cast<std::size_t>(a) * cy + b] * wa * synthesis_weight(py, b, m);
    }
  }
  std::vector<double> out(in.size());
  fftw_execute_r2r(PlanCache::instance().get(sx, sy, kind_of(px), kind_of(py)), in.data(), out.data());
  return out;
}

std::vector<double> analyze(std::span<const double> values, Parity px, Parity py, int m, int k) {
  check_modes(px, k, m);
  check_modes(py, k, m);
  const int sx = sample_count(px, m);
  const int sy = sample_count(py, m);
  if (values.size() != static_cast<std::size_t>(sx) * sy)
    throw ShapeError("sample block has the wrong size");

  std::vector<double> in(values.begin(), values.end());
  std::vector<double> out(in.size());
  fftw_execute_r2r(PlanCache::instance().get(sx, sy, kind_of(px), kind_of(py)), in.data(), out.data());

  const int cx = coefficient_count(px, k);
  const int cy = coefficient_count(py, k);
  std::vector<double> coeffs(static_cast<std::size_t>(cx) * cy);
  for (int a = 0; a < cx; ++a) {
    const double wa = analysis_weight(px, a, m);
    for (int b = 0; b < cy; ++b) {
      coeffs[static_cast<std::size_t>(a) * cy + b] =
          out[static_cast<std::size_t>(a) * sy + b] * wa * analysis_weight(py, b, m);
    }
  }
  return coeffs;
}

}  // namespace dsqg
