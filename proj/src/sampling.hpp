#pragma once

// Internal helper: common trajectory sampling grid. Samples sit at integer
// multiples of sample_dt (plus the final time), and the integrator step is
// snapped down so an integer number of steps lands exactly on each sample.

#include <cmath>
#include <stdexcept>

namespace hamsim::detail {

struct SampleGrid {
  double t_end = 0;
  double sample_dt = 0;
  int full_segments = 0;   // segments of length sample_dt
  double tail = 0;         // remaining time after the last full segment
};

inline SampleGrid plan_samples(double t_end, double sample_dt_req) {
  if (!(t_end > 0.0))
    throw std::invalid_argument("plan_samples: t_end must be > 0");
  SampleGrid g;
  g.t_end = t_end;
  g.sample_dt = sample_dt_req > 0.0 ? sample_dt_req
                                    : std::max(1.0, std::ceil(t_end / 500.0));
  if (g.sample_dt > t_end) g.sample_dt = t_end;
  g.full_segments = static_cast<int>(std::floor(t_end / g.sample_dt + 1e-9));
  g.tail = t_end - g.full_segments * g.sample_dt;
  if (g.tail < 1e-9 * t_end) {
    g.tail = 0.0;  // t_end is (numerically) a multiple of sample_dt
  }
  return g;
}

// Number of integrator substeps for a segment of given length.
inline int substeps_for(double segment, double dt_req) {
  return std::max(1, static_cast<int>(std::ceil(segment / dt_req - 1e-12)));
}

}  // namespace hamsim::detail
