/*
 * Copyright 2026 The chaosidx Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *   http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef CHAOSIDX_SYNTH_HPP
#define CHAOSIDX_SYNTH_HPP

// Seeded benchmark signals with known chaos indices.
//
// Stochastic kinds draw from xoshiro256** whose 256-bit state is filled by
// four successive SplitMix64 outputs starting from the seed. A uniform draw
// on [0, 1) is (next() >> 11) * 2^-53. Both algorithms are the published
// reference versions, so the sequence for a given seed is portable.

#include <chaosidx/error.hpp>
#include <chaosidx/series.hpp>

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

namespace chaosidx {

inline constexpr std::string_view kPrngName = "xoshiro256**/splitmix64";

class SplitMix64 {
public:
  explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  std::uint64_t next() noexcept {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

private:
  std::uint64_t state_;
};

class Xoshiro256 {
public:
  explicit Xoshiro256(std::uint64_t seed) noexcept {
    SplitMix64 sm(seed);
    for (auto& s : s_) s = sm.next();
  }

  std::uint64_t next() noexcept {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  /// Uniform on [0, 1).
  double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform integer on [0, n).
  std::uint64_t below(std::uint64_t n) noexcept {
    return static_cast<std::uint64_t>(uniform() * static_cast<double>(n));
  }

private:
  static std::uint64_t rotl(std::uint64_t x, int k) noexcept { return (x << k) | (x >> (64 - k)); }
  std::array<std::uint64_t, 4> s_{};
};

enum class GeneratorKind { Logistic, Henon, Lorenz, Sine, WhiteNoise, AR1 };

inline const char* to_string(GeneratorKind kind) {
  switch (kind) {
    case GeneratorKind::Logistic: return "logistic";
    case GeneratorKind::Henon: return "henon";
    case GeneratorKind::Lorenz: return "lorenz";
    case GeneratorKind::Sine: return "sine";
    case GeneratorKind::WhiteNoise: return "noise";
    case GeneratorKind::AR1: return "ar1";
  }
  return "unknown";
}

inline GeneratorKind parse_generator_kind(std::string_view name) {
  if (name == "logistic") return GeneratorKind::Logistic;
  if (name == "henon") return GeneratorKind::Henon;
  if (name == "lorenz") return GeneratorKind::Lorenz;
  if (name == "sine") return GeneratorKind::Sine;
  if (name == "noise" || name == "white-noise") return GeneratorKind::WhiteNoise;
  if (name == "ar1") return GeneratorKind::AR1;
  throw Error(ErrorKind::Configuration, "unknown generator '" + std::string(name) + "'");
}

/// Parameters for every kind; each generator reads only its own fields.
struct GeneratorSpec {
  GeneratorKind kind = GeneratorKind::Logistic;
  std::size_t n_samples = 1000;
  std::uint64_t seed = 0;
  std::size_t transient_skip = 0;
  double sample_rate_hz = 1.0;

  // logistic
  double r = 4.0;
  double x0 = 0.3;
  // henon
  double a = 1.4;
  double b = 0.3;
  double y0 = 0.1;  // henon uses x0 too
  // lorenz
  double sigma = 10.0;
  double rho = 28.0;
  double beta = 8.0 / 3.0;
  double dt = 0.01;
  double z0 = 1.0;
  // sine
  double frequency_hz = 1.0;
  double amplitude = 1.0;
  double phase = 0.0;
  double noise_amplitude = 0.0;  // uniform additive noise on [-a, a) for sine
  // ar1: x[n+1] = phi * x[n] + uniform(-amplitude, amplitude)
  double phi = 0.9;
};

namespace detail {

inline void check_finite(double v, std::size_t step, const char* what) {
  if (!std::isfinite(v))
    throw Error(ErrorKind::EstimationFailure,
                std::string(what) + " orbit diverged at step " + std::to_string(step));
}

struct Vec3 {
  double x, y, z;
};

inline Vec3 lorenz_rhs(const Vec3& s, double sigma, double rho, double beta) noexcept {
  return {sigma * (s.y - s.x), s.x * (rho - s.z) - s.y, s.x * s.y - beta * s.z};
}

inline Vec3 rk4_step(const Vec3& s, double dt, double sigma, double rho, double beta) noexcept {
  auto add = [](const Vec3& u, const Vec3& v, double h) {
    return Vec3{u.x + h * v.x, u.y + h * v.y, u.z + h * v.z};
  };
  const Vec3 k1 = lorenz_rhs(s, sigma, rho, beta);
  const Vec3 k2 = lorenz_rhs(add(s, k1, dt / 2), sigma, rho, beta);
  const Vec3 k3 = lorenz_rhs(add(s, k2, dt / 2), sigma, rho, beta);
  const Vec3 k4 = lorenz_rhs(add(s, k3, dt), sigma, rho, beta);
  return {s.x + dt / 6 * (k1.x + 2 * k2.x + 2 * k3.x + k4.x),
          s.y + dt / 6 * (k1.y + 2 * k2.y + 2 * k3.y + k4.y),
          s.z + dt / 6 * (k1.z + 2 * k2.z + 2 * k3.z + k4.z)};
}

}  // namespace detail

inline std::vector<double> generate_samples(const GeneratorSpec& spec) {
  if (spec.n_samples == 0) throw Error(ErrorKind::Configuration, "n_samples must be > 0");
  const std::size_t total = spec.n_samples + spec.transient_skip;
  std::vector<double> out;
  out.reserve(spec.n_samples);
  auto emit = [&](std::size_t step, double v) {
    if (step >= spec.transient_skip) out.push_back(v);
  };

  switch (spec.kind) {
    case GeneratorKind::Logistic: {
      if (!(spec.r > 0.0 && spec.r <= 4.0))
        throw Error(ErrorKind::Configuration, "logistic r must lie in (0, 4]");
      if (!(spec.x0 >= 0.0 && spec.x0 <= 1.0))
        throw Error(ErrorKind::Configuration, "logistic x0 must lie in [0, 1]");
      double x = spec.x0;
      for (std::size_t i = 0; i < total; ++i) {
        emit(i, x);
        x = spec.r * x * (1.0 - x);
      }
      break;
    }
    case GeneratorKind::Henon: {
      double x = spec.x0, y = spec.y0;
      for (std::size_t i = 0; i < total; ++i) {
        detail::check_finite(x, i, "Henon");
        emit(i, x);
        const double xn = 1.0 - spec.a * x * x + y;
        y = spec.b * x;
        x = xn;
      }
      break;
    }
    case GeneratorKind::Lorenz: {
      if (!(spec.dt > 0.0)) throw Error(ErrorKind::Configuration, "Lorenz dt must be > 0");
      detail::Vec3 s{spec.x0, spec.y0, spec.z0};
      for (std::size_t i = 0; i < total; ++i) {
        detail::check_finite(s.x + s.y + s.z, i, "Lorenz");
        emit(i, s.x);
        s = detail::rk4_step(s, spec.dt, spec.sigma, spec.rho, spec.beta);
      }
      break;
    }
    case GeneratorKind::Sine: {
      Xoshiro256 rng(spec.seed);
      const double w = 2.0 * std::numbers::pi * spec.frequency_hz / spec.sample_rate_hz;
      for (std::size_t i = 0; i < total; ++i) {
        double v = spec.amplitude * std::sin(w * static_cast<double>(i) + spec.phase);
        if (spec.noise_amplitude != 0.0) v += spec.noise_amplitude * (2.0 * rng.uniform() - 1.0);
        emit(i, v);
      }
      break;
    }
    case GeneratorKind::WhiteNoise: {
      Xoshiro256 rng(spec.seed);
      for (std::size_t i = 0; i < total; ++i) emit(i, spec.amplitude * (2.0 * rng.uniform() - 1.0));
      break;
    }
    case GeneratorKind::AR1: {
      Xoshiro256 rng(spec.seed);
      double x = 0.0;
      for (std::size_t i = 0; i < total; ++i) {
        emit(i, x);
        x = spec.phi * x + spec.amplitude * (2.0 * rng.uniform() - 1.0);
      }
      break;
    }
  }
  return out;
}

inline TimeSeries generate(const GeneratorSpec& spec) {
  return TimeSeries(generate_samples(spec), spec.sample_rate_hz);
}

// Reference exponents from the known maps (tangent-space propagation along
// the generated orbit). Used as oracles for the trajectory-based estimator.

/// Hénon LLE in nats/step: tangent vector pushed through the Jacobian
/// [[-2 a x, 1], [b, 0]] and renormalized every step.
inline double henon_lle_oracle(std::size_t n_steps, double a = 1.4, double b = 0.3,
                               double x0 = 0.1, double y0 = 0.1, std::size_t transient_skip = 0) {
  if (n_steps < 10000) throw Error(ErrorKind::Configuration, "oracle needs n_steps >= 10000");
  double x = x0, y = y0;
  for (std::size_t i = 0; i < transient_skip; ++i) {
    const double xn = 1.0 - a * x * x + y;
    y = b * x;
    x = xn;
  }
  double u = 1.0, v = 0.0, sum = 0.0;
  for (std::size_t i = 0; i < n_steps; ++i) {
    const double un = -2.0 * a * x * u + v;
    const double vn = b * u;
    const double norm = std::hypot(un, vn);
    sum += std::log(norm);
    u = un / norm;
    v = vn / norm;
    const double xn = 1.0 - a * x * x + y;
    y = b * x;
    x = xn;
    detail::check_finite(x, i, "Henon");
  }
  return sum / static_cast<double>(n_steps);
}

/// Logistic-map LLE: mean of ln|r (1 - 2 x)| along the orbit.
inline double logistic_lle_oracle(std::size_t n_steps, double r = 4.0, double x0 = 0.3,
                                  std::size_t transient_skip = 0) {
  if (n_steps < 10000) throw Error(ErrorKind::Configuration, "oracle needs n_steps >= 10000");
  double x = x0;
  for (std::size_t i = 0; i < transient_skip; ++i) x = r * x * (1.0 - x);
  double sum = 0.0;
  for (std::size_t i = 0; i < n_steps; ++i) {
    sum += std::log(std::fabs(r * (1.0 - 2.0 * x)));
    x = r * x * (1.0 - x);
  }
  return sum / static_cast<double>(n_steps);
}

/// Sine oscillator as the rotation (c, s) -> R(w) (c, s); its Jacobian is
/// orthogonal, so the exponent is zero up to rounding.
inline double sine_lle_oracle(std::size_t n_steps, double frequency_hz = 1.0,
                              double sample_rate_hz = 100.0) {
  if (n_steps < 10000) throw Error(ErrorKind::Configuration, "oracle needs n_steps >= 10000");
  const double w = 2.0 * std::numbers::pi * frequency_hz / sample_rate_hz;
  const double cw = std::cos(w), sw = std::sin(w);
  double u = 1.0, v = 0.0, sum = 0.0;
  for (std::size_t i = 0; i < n_steps; ++i) {
    const double un = cw * u - sw * v;
    const double vn = sw * u + cw * v;
    const double norm = std::hypot(un, vn);
    sum += std::log(norm);
    u = un / norm;
    v = vn / norm;
  }
  return sum / static_cast<double>(n_steps);
}

}  // namespace chaosidx

#endif  // CHAOSIDX_SYNTH_HPP
