#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace spinorbit::model {

/// Which tidal torque drives the spin: the pointwise MacDonald torque or its
/// orbit average.
enum class Variant { NonAveraged, Averaged };

inline std::string_view to_string(Variant v) {
  return v == Variant::Averaged ? "averaged" : "nonaveraged";
}

inline Variant variant_from_string(std::string_view s) {
  if (s == "averaged") return Variant::Averaged;
  if (s == "nonaveraged" || s == "non-averaged") return Variant::NonAveraged;
  throw std::invalid_argument("unknown model variant '" + std::string(s) + "'");
}

/// Perturbation eps (oblateness), orbital eccentricity, dissipation mu.
template <class T>
struct ModelParams {
  T eps{0};
  T ecc{0};
  T mu{0};
  Variant variant = Variant::NonAveraged;

  void validate() const {
    if (eps < 0) throw std::invalid_argument("eps must be >= 0");
    if (ecc < 0 || ecc >= 1) throw std::invalid_argument("eccentricity must lie in [0, 1)");
    if (mu < 0) throw std::invalid_argument("mu must be >= 0");
  }
};

}  // namespace spinorbit::model
