#include "core/units.hpp"

#include <cmath>
#include <string>

#include "core/error.hpp"

namespace kardashev::units {

namespace {

constexpr double kExajoule = 1e18;

}  // namespace

double seconds_per_year(YearConvention convention) {
  switch (convention) {
    case YearConvention::kCivil365:
      return 31'536'000.0;
    case YearConvention::kJulian:
      return 31'557'600.0;
  }
  throw ArgumentError("unknown year convention");
}

PowerWatts::PowerWatts(double value) : value_(value) {
  if (!std::isfinite(value) || value <= 0.0) {
    throw DomainError("power must be finite and positive, got " + std::to_string(value));
  }
}

AnnualEnergy::AnnualEnergy(double exajoules, YearConvention convention)
    : value_(exajoules), convention_(convention) {
  if (!std::isfinite(exajoules) || exajoules <= 0.0) {
    throw DomainError("annual energy must be finite and positive, got " +
                      std::to_string(exajoules));
  }
}

KardashevIndex::KardashevIndex(double value) : value_(value) {
  if (!std::isfinite(value)) throw DomainError("Kardashev index must be finite");
}

KardashevIndex k_from_power(PowerWatts p) {
  return KardashevIndex((std::log10(p.value()) - 6.0) / 10.0);
}

PowerWatts power_from_k(KardashevIndex k) {
  return PowerWatts(std::pow(10.0, 10.0 * k.value() + 6.0));
}

PowerWatts power_from_annual_energy(AnnualEnergy e) {
  return PowerWatts(e.value() * kExajoule / seconds_per_year(e.convention()));
}

AnnualEnergy annual_energy_from_power(PowerWatts p, YearConvention convention) {
  return AnnualEnergy(p.value() * seconds_per_year(convention) / kExajoule, convention);
}

KardashevIndex k_from_annual_energy(AnnualEnergy e) {
  return k_from_power(power_from_annual_energy(e));
}

}  // namespace kardashev::units
