#include "ratesvol/rng.hpp"

#include <cmath>

#include "ratesvol/error.hpp"

namespace ratesvol {

double NormalSampler::operator()(Xoshiro256& rng) noexcept {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u = 0.0, v = 0.0, s = 0.0;
  do {
    u = 2.0 * rng.uniform() - 1.0;
    v = 2.0 * rng.uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double factor = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * factor;
  has_spare_ = true;
  return u * factor;
}

InnovationSampler::InnovationSampler(InnovationLaw law, std::uint64_t seed) : law_(law), rng_(seed) {
  if (law_.kind == InnovationLaw::Kind::StudentT && !(law_.dof > 2.0))
    throw Error(ErrorCode::InvalidArgument, "Student t innovations need dof > 2 for unit variance");
}

// Marsaglia-Tsang; shape < 1 handled by the usual U^(1/shape) boost.
double InnovationSampler::gamma(double shape) noexcept {
  if (shape < 1.0) return gamma(shape + 1.0) * std::pow(rng_.uniform(), 1.0 / shape);
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x = 0.0, v = 0.0;
    do {
      x = normal_(rng_);
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng_.uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

double InnovationSampler::operator()() noexcept {
  switch (law_.kind) {
    case InnovationLaw::Kind::Gaussian:
      return normal_(rng_);
    case InnovationLaw::Kind::Laplace: {
      // scale 1/sqrt(2) gives unit variance
      const double u = rng_.uniform() - 0.5;
      const double mag = -std::log(1.0 - 2.0 * std::abs(u)) / std::sqrt(2.0);
      return u < 0.0 ? -mag : mag;
    }
    case InnovationLaw::Kind::StudentT: {
      const double nu = law_.dof;
      const double z = normal_(rng_);
      const double chi2 = 2.0 * gamma(0.5 * nu);
      return z / std::sqrt(chi2 / nu) * std::sqrt((nu - 2.0) / nu);
    }
  }
  return 0.0;
}

}  // namespace ratesvol
