#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "iccsim/visibility.hpp"

namespace iccsim {

// Finite-window transform of the logarithmic visibility,
//   S_ln(w_n) = (1/T) Int_0^T dt ln[V(t)] e^{-i w_n t},
// evaluated with the trapezoid rule on the trace's uniform grid at the
// one-sided DFT frequencies w_n = 2 pi n / T.
struct Spectrum {
  Eigen::VectorXd frequencies;  // angular, same units as 1/t of the input
  Eigen::VectorXcd values;
  double floor_used = 0.0;
  double window = 0.0;  // T
};

// `times` must be uniform and sorted; visibility is clamped at `floor`
// before the log.  Optional Hann window for exploratory use.
Spectrum log_spectrum(const Eigen::VectorXd& times, const Eigen::VectorXd& visibility,
                      double floor = 1e-12, bool hann_window = false);

inline Spectrum log_spectrum(const VisibilityTrace& trace, double floor = 1e-12,
                             bool hann_window = false) {
  return log_spectrum(trace.t_dimensionless, trace.visibility, floor, hann_window);
}

// |w_soft^e - w_soft^g| from the two bases' soft modes.
double beat_frequency(const ModeBasis& basis_g, const ModeBasis& basis_e);

struct SpectralPeak {
  double frequency = 0.0;
  double height = 0.0;
  double prominence = 0.0;
};

// Local maxima of |S| with at least `min_prominence`, sorted by height
// (descending).
std::vector<SpectralPeak> find_peaks(const Spectrum& spectrum, double min_prominence);

}  // namespace iccsim
