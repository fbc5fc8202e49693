#pragma once

// Kardashev index, mean power and annual energy.
//
// The index is Sagan's continuous interpolation K = (log10(P) - 6) / 10 with
// P in watts, so K = 1 at 1e16 W and each factor of ten in power adds 0.1.
// Annual energies are in exajoules per year; converting them to power needs
// an explicit year length.

namespace kardashev::units {

enum class YearConvention {
  kCivil365,  // 365 * 86400 = 31,536,000 s
  kJulian,    // 365.25 * 86400 = 31,557,600 s
};

double seconds_per_year(YearConvention convention);

class PowerWatts {
 public:
  // Throws DomainError unless value is finite and > 0.
  explicit PowerWatts(double value);
  double value() const noexcept { return value_; }

 private:
  double value_;
};

class AnnualEnergy {
 public:
  // Exajoules per year. Throws DomainError unless finite and > 0.
  AnnualEnergy(double exajoules, YearConvention convention);
  double value() const noexcept { return value_; }
  YearConvention convention() const noexcept { return convention_; }

 private:
  double value_;
  YearConvention convention_;
};

class KardashevIndex {
 public:
  // Throws DomainError for non-finite values.
  explicit KardashevIndex(double value);
  double value() const noexcept { return value_; }

 private:
  double value_;
};

KardashevIndex k_from_power(PowerWatts p);
PowerWatts power_from_k(KardashevIndex k);
PowerWatts power_from_annual_energy(AnnualEnergy e);
AnnualEnergy annual_energy_from_power(PowerWatts p, YearConvention convention);
KardashevIndex k_from_annual_energy(AnnualEnergy e);

}  // namespace kardashev::units
