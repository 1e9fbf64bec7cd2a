#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace dspmem {

/// Time-dependent classical Rabi frequency Omega(t) with analytic
/// derivative access.  Omega(t) >= 0 and continuous; composite schedules
/// run their stages back to back.
class PulseSchedule {
 public:
  enum class Kind { LinearRamp, CosineRamp, Hold, PiecewiseSamples, Composite };

  static PulseSchedule linear(double omega_start, double omega_end, double duration) {
    PulseSchedule s(Kind::LinearRamp, duration);
    s.check_value(omega_start);
    s.check_value(omega_end);
    s.w0_ = omega_start;
    s.w1_ = omega_end;
    return s;
  }

  /// Half-cosine ramp; the derivative vanishes at both endpoints.
  static PulseSchedule cosine(double omega_start, double omega_end, double duration) {
    PulseSchedule s(Kind::CosineRamp, duration);
    s.check_value(omega_start);
    s.check_value(omega_end);
    s.w0_ = omega_start;
    s.w1_ = omega_end;
    return s;
  }

  static PulseSchedule hold(double omega, double duration) {
    PulseSchedule s(Kind::Hold, duration);
    s.check_value(omega);
    s.w0_ = s.w1_ = omega;
    return s;
  }

  /// Piecewise-linear interpolation of (time, value) samples starting at
  /// t = 0; the derivative is the finite difference of adjacent samples.
  static PulseSchedule samples(std::vector<double> times, std::vector<double> values) {
    if (times.size() != values.size() || times.size() < 2)
      throw std::invalid_argument("PulseSchedule: need >= 2 samples");
    if (times.front() != 0.0) throw std::invalid_argument("PulseSchedule: samples must start at t=0");
    for (size_t i = 1; i < times.size(); ++i)
      if (times[i] <= times[i - 1])
        throw std::invalid_argument("PulseSchedule: sample times must increase");
    PulseSchedule s(Kind::PiecewiseSamples, times.back());
    for (double v : values) s.check_value(v);
    s.times_ = std::move(times);
    s.values_ = std::move(values);
    return s;
  }

  static PulseSchedule composite(std::vector<PulseSchedule> stages) {
    if (stages.empty()) throw std::invalid_argument("PulseSchedule: empty composite");
    double total = 0.0;
    for (size_t i = 0; i < stages.size(); ++i) {
      if (i > 0 && std::abs(stages[i].value(0.0) - stages[i - 1].value(stages[i - 1].duration())) > 1e-9)
        throw std::invalid_argument("PulseSchedule: composite stages must be continuous");
      total += stages[i].duration();
    }
    PulseSchedule s(Kind::Composite, total);
    s.stages_ = std::move(stages);
    return s;
  }

  Kind kind() const { return kind_; }
  double duration() const { return duration_; }

  double value(double t) const {
    t = std::clamp(t, 0.0, duration_);
    switch (kind_) {
      case Kind::LinearRamp:
        return w0_ + (w1_ - w0_) * t / duration_;
      case Kind::CosineRamp:
        return w0_ + (w1_ - w0_) * 0.5 * (1.0 - std::cos(M_PI * t / duration_));
      case Kind::Hold:
        return w0_;
      case Kind::PiecewiseSamples: {
        const size_t i = segment(t);
        const double f = (t - times_[i]) / (times_[i + 1] - times_[i]);
        return values_[i] + f * (values_[i + 1] - values_[i]);
      }
      case Kind::Composite: {
        auto [stage, local] = locate(t);
        return stage->value(local);
      }
    }
    return 0.0;
  }

  double derivative(double t) const {
    t = std::clamp(t, 0.0, duration_);
    switch (kind_) {
      case Kind::LinearRamp:
        return (w1_ - w0_) / duration_;
      case Kind::CosineRamp:
        return (w1_ - w0_) * 0.5 * M_PI / duration_ * std::sin(M_PI * t / duration_);
      case Kind::Hold:
        return 0.0;
      case Kind::PiecewiseSamples: {
        const size_t i = segment(t);
        return (values_[i + 1] - values_[i]) / (times_[i + 1] - times_[i]);
      }
      case Kind::Composite: {
        auto [stage, local] = locate(t);
        return stage->derivative(local);
      }
    }
    return 0.0;
  }

  /// Largest Omega reached anywhere on the schedule (sets the integrator
  /// step through eps_max).
  double max_value() const {
    switch (kind_) {
      case Kind::LinearRamp:
      case Kind::CosineRamp:
      case Kind::Hold:
        return std::max(w0_, w1_);
      case Kind::PiecewiseSamples:
        return *std::max_element(values_.begin(), values_.end());
      case Kind::Composite: {
        double m = 0.0;
        for (const auto& s : stages_) m = std::max(m, s.max_value());
        return m;
      }
    }
    return 0.0;
  }

 private:
  PulseSchedule(Kind kind, double duration) : kind_(kind), duration_(duration) {
    if (!(duration > 0.0)) throw std::invalid_argument("PulseSchedule: duration must be > 0");
  }

  static void check_value(double w) {
    if (w < 0.0 || !std::isfinite(w))
      throw std::invalid_argument("PulseSchedule: Omega must be finite and >= 0");
  }

  size_t segment(double t) const {
    const auto it = std::upper_bound(times_.begin(), times_.end(), t);
    const size_t i = static_cast<size_t>(it - times_.begin());
    return std::min(std::max<size_t>(i, 1) - 1, times_.size() - 2);
  }

  std::pair<const PulseSchedule*, double> locate(double t) const {
    double offset = 0.0;
    for (const auto& s : stages_) {
      if (t <= offset + s.duration() || &s == &stages_.back()) return {&s, t - offset};
      offset += s.duration();
    }
    return {&stages_.back(), stages_.back().duration()};
  }

  Kind kind_;
  double duration_;
  double w0_ = 0.0, w1_ = 0.0;
  std::vector<double> times_, values_;
  std::vector<PulseSchedule> stages_;
};

}  // namespace dspmem
