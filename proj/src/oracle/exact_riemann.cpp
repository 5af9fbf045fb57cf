#include <algorithm>
#include <cmath>

#include "halolab/error.hpp"
#include "halolab/oracle.hpp"

namespace halolab::oracle {

ExactRiemann::ExactRiemann(Primitive left, Primitive right, double gamma) : l_(left), r_(right), gamma_(gamma) {
  if (!(l_.rho > 0.0 && r_.rho > 0.0 && l_.p > 0.0 && r_.p > 0.0))
    throw DomainError("exact Riemann solver needs positive density and pressure");
  cl_ = std::sqrt(gamma_ * l_.p / l_.rho);
  cr_ = std::sqrt(gamma_ * r_.p / r_.rho);
  const double du = r_.u - l_.u;
  if (2.0 * (cl_ + cr_) / (gamma_ - 1.0) <= du) throw DomainError("initial data generate a vacuum");

  // Newton iteration on f(p) = fL(p) + fR(p) + du from the two-rarefaction guess.
  const double z = (gamma_ - 1.0) / (2.0 * gamma_);
  double p = std::pow((cl_ + cr_ - 0.5 * (gamma_ - 1.0) * du) / (cl_ / std::pow(l_.p, z) + cr_ / std::pow(r_.p, z)),
                      1.0 / z);
  p = std::max(p, 1e-12);
  for (int it = 0; it < 100; ++it) {
    double dl = 0.0, dr = 0.0;
    const double f = pressure_function(p, l_, cl_, dl) + pressure_function(p, r_, cr_, dr) + du;
    double next = p - f / (dl + dr);
    if (next < 0.0) next = 1e-12;
    const double change = 2.0 * std::abs(next - p) / (next + p);
    p = next;
    if (change < 1e-14) break;
  }
  p_star_ = p;
  double dl = 0.0, dr = 0.0;
  u_star_ = 0.5 * (l_.u + r_.u) + 0.5 * (pressure_function(p, r_, cr_, dr) - pressure_function(p, l_, cl_, dl));
}

double ExactRiemann::pressure_function(double p, const Primitive& s, double c, double& derivative) const {
  const double g = gamma_;
  if (p > s.p) {
    const double a = 2.0 / ((g + 1.0) * s.rho);
    const double b = (g - 1.0) / (g + 1.0) * s.p;
    const double q = std::sqrt(a / (p + b));
    derivative = q * (1.0 - 0.5 * (p - s.p) / (p + b));
    return (p - s.p) * q;
  }
  const double ratio = p / s.p;
  derivative = std::pow(ratio, -(g + 1.0) / (2.0 * g)) / (s.rho * c);
  return 2.0 * c / (g - 1.0) * (std::pow(ratio, (g - 1.0) / (2.0 * g)) - 1.0);
}

Primitive ExactRiemann::sample(double xi) const {
  const double g = gamma_;
  const double gm = (g - 1.0) / (g + 1.0);
  if (xi <= u_star_) {
    const Primitive& s = l_;
    const double c = cl_;
    if (p_star_ > s.p) {
      const double pr = p_star_ / s.p;
      const double shock = s.u - c * std::sqrt((g + 1.0) / (2.0 * g) * pr + (g - 1.0) / (2.0 * g));
      if (xi <= shock) return s;
      return {s.rho * (pr + gm) / (gm * pr + 1.0), u_star_, p_star_};
    }
    const double head = s.u - c;
    const double c_star = c * std::pow(p_star_ / s.p, (g - 1.0) / (2.0 * g));
    const double tail = u_star_ - c_star;
    if (xi <= head) return s;
    if (xi >= tail) return {s.rho * std::pow(p_star_ / s.p, 1.0 / g), u_star_, p_star_};
    const double f = 2.0 / (g + 1.0) + gm / c * (s.u - xi);
    return {s.rho * std::pow(f, 2.0 / (g - 1.0)), 2.0 / (g + 1.0) * (c + (g - 1.0) / 2.0 * s.u + xi),
            s.p * std::pow(f, 2.0 * g / (g - 1.0))};
  }
  const Primitive& s = r_;
  const double c = cr_;
  if (p_star_ > s.p) {
    const double pr = p_star_ / s.p;
    const double shock = s.u + c * std::sqrt((g + 1.0) / (2.0 * g) * pr + (g - 1.0) / (2.0 * g));
    if (xi >= shock) return s;
    return {s.rho * (pr + gm) / (gm * pr + 1.0), u_star_, p_star_};
  }
  const double head = s.u + c;
  const double c_star = c * std::pow(p_star_ / s.p, (g - 1.0) / (2.0 * g));
  const double tail = u_star_ + c_star;
  if (xi >= head) return s;
  if (xi <= tail) return {s.rho * std::pow(p_star_ / s.p, 1.0 / g), u_star_, p_star_};
  const double f = 2.0 / (g + 1.0) - gm / c * (s.u - xi);
  return {s.rho * std::pow(f, 2.0 / (g - 1.0)), 2.0 / (g + 1.0) * (-c + (g - 1.0) / 2.0 * s.u + xi),
          s.p * std::pow(f, 2.0 * g / (g - 1.0))};
}

double exact_density_average(const ExactRiemann& rs, double x0, double t, double x_lo, double x_hi, int samples) {
  if (samples < 1 || !(t > 0.0)) throw DomainError("exact_density_average needs samples >= 1 and t > 0");
  double sum = 0.0;
  const double w = (x_hi - x_lo) / samples;
  for (int s = 0; s < samples; ++s) sum += rs.sample((x_lo + (s + 0.5) * w - x0) / t).rho;
  return sum / samples;
}

}  // namespace halolab::oracle
