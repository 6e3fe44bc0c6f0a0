#include "iccsim/spectrum.hpp"

#include <algorithm>
#include <cmath>

#include "iccsim/constants.hpp"

namespace iccsim {

Spectrum log_spectrum(const Eigen::VectorXd& times, const Eigen::VectorXd& visibility,
                      double floor, bool hann_window) {
  const int nt = static_cast<int>(times.size());
  if (nt < 3) throw ConfigError("log spectrum needs at least 3 samples");
  if (visibility.size() != nt)
    throw ConfigError("times and visibility must have the same length");
  if (!(floor > 0.0)) throw ConfigError("spectrum floor must be positive");

  const double dt = times[1] - times[0];
  for (int i = 1; i < nt; ++i) {
    const double step = times[i] - times[i - 1];
    if (std::abs(step - dt) > 1e-9 * std::max(1.0, std::abs(dt)))
      throw ConfigError("log spectrum requires a uniform time grid");
  }
  const double window = times[nt - 1] - times[0];

  Eigen::VectorXd f(nt);
  for (int i = 0; i < nt; ++i) f[i] = std::log(std::max(visibility[i], floor));
  if (hann_window) {
    for (int i = 0; i < nt; ++i)
      f[i] *= 0.5 * (1.0 - std::cos(constants::two_pi * i / (nt - 1)));
  }

  const int n_bins = (nt - 1) / 2 + 1;
  Spectrum out;
  out.frequencies.resize(n_bins);
  out.values.resize(n_bins);
  out.floor_used = floor;
  out.window = window;

  // Trapezoid rule for (1/T) Int_0^T f(t) e^{-i w_n t} dt on w_n = 2 pi n / T.
  for (int n = 0; n < n_bins; ++n) {
    const double w = constants::two_pi * n / window;
    out.frequencies[n] = w;
    Complex acc(0.0, 0.0);
    for (int i = 0; i < nt; ++i) {
      const double weight = (i == 0 || i == nt - 1) ? 0.5 : 1.0;
      const double phase = -w * (times[i] - times[0]);
      acc += weight * f[i] * Complex(std::cos(phase), std::sin(phase));
    }
    out.values[n] = acc * (dt / window);
  }
  return out;
}

double beat_frequency(const ModeBasis& basis_g, const ModeBasis& basis_e) {
  return std::abs(basis_e.frequencies[basis_e.soft_mode_index] -
                  basis_g.frequencies[basis_g.soft_mode_index]);
}

std::vector<SpectralPeak> find_peaks(const Spectrum& spectrum, double min_prominence) {
  const int n = static_cast<int>(spectrum.values.size());
  std::vector<double> mag(n);
  for (int i = 0; i < n; ++i) {
    mag[i] = std::abs(spectrum.values[i]);
    if (!std::isfinite(mag[i])) throw ConfigError("spectrum contains non-finite values");
  }

  std::vector<SpectralPeak> peaks;
  for (int i = 1; i + 1 < n; ++i) {
    if (!(mag[i] > mag[i - 1] && mag[i] >= mag[i + 1])) continue;
    // prominence: lowest point on each side before something higher appears
    double left_min = mag[i], right_min = mag[i];
    for (int j = i - 1; j >= 0; --j) {
      if (mag[j] > mag[i]) break;
      left_min = std::min(left_min, mag[j]);
    }
    for (int j = i + 1; j < n; ++j) {
      if (mag[j] > mag[i]) break;
      right_min = std::min(right_min, mag[j]);
    }
    const double prominence = mag[i] - std::max(left_min, right_min);
    if (prominence >= min_prominence)
      peaks.push_back({spectrum.frequencies[i], mag[i], prominence});
  }
  std::sort(peaks.begin(), peaks.end(),
            [](const SpectralPeak& a, const SpectralPeak& b) { return a.height > b.height; });
  return peaks;
}

}  // namespace iccsim
