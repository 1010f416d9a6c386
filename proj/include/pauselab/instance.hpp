#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pauselab {

struct Coupling {
  int i;
  int j;
  double value;
};

struct LocalField {
  int i;
  double value;
};

/// Ising problem Hamiltonian  H_p = sum_{i<j} J_ij z_i z_j + sum_i h_i z_i.
///
/// Couplings are stored with i < j and sorted lexicographically. Energies are
/// in dimensionless Ising units; conversion to GHz happens where B(s) is
/// applied.
class IsingInstance {
 public:
  IsingInstance() = default;

  /// Validates and normalizes. A coupling given as (j, i) with j > i is
  /// stored as (i, j); a repeated pair after normalization is rejected.
  IsingInstance(int n, std::vector<Coupling> couplings,
                std::vector<LocalField> fields = {});

  int size() const noexcept { return n_; }
  std::span<const Coupling> couplings() const noexcept { return couplings_; }
  std::span<const LocalField> fields() const noexcept { return fields_; }

  /// Dense field vector of length n (zeros where no field was given).
  const std::vector<double>& field_vector() const noexcept { return h_; }

  /// Neighbour lists: for rotor i, (j, J_ij) for every coupling touching i.
  const std::vector<std::vector<std::pair<int, double>>>& neighbours() const noexcept {
    return adjacency_;
  }

  /// True when every local field is zero, i.e. H_p commutes with prod_i X_i.
  bool z2_symmetric() const noexcept;

  /// Coupling J_ij (0 when absent); order of i, j does not matter.
  double coupling(int i, int j) const;

 private:
  int n_ = 0;
  std::vector<Coupling> couplings_;
  std::vector<LocalField> fields_;
  std::vector<double> h_;
  std::vector<std::vector<std::pair<int, double>>> adjacency_;
};

/// Classical spin assignment. Bit i holds qubit i (0-based): bit 0 means
/// z = +1, bit 1 means z = -1. The string label prints qubit 0 as the
/// rightmost character.
class SpinConfig {
 public:
  SpinConfig() = default;
  SpinConfig(int n, std::uint64_t bits);

  static SpinConfig from_label(std::string_view label);

  int size() const noexcept { return n_; }
  std::uint64_t bits() const noexcept { return bits_; }
  bool bit(int i) const noexcept { return (bits_ >> i) & 1u; }
  int spin(int i) const noexcept { return bit(i) ? -1 : 1; }
  SpinConfig complement() const;
  std::string label() const;

  friend bool operator==(const SpinConfig&, const SpinConfig&) = default;
  friend auto operator<=>(const SpinConfig&, const SpinConfig&) = default;

 private:
  int n_ = 0;
  std::uint64_t bits_ = 0;
};

int hamming_distance(const SpinConfig& a, const SpinConfig& b);

struct EnergyLevel {
  double energy;
  std::vector<SpinConfig> configs;
};

struct ClassicalSpectrum {
  std::vector<EnergyLevel> levels;

  /// Number of configurations listed across all levels.
  std::size_t config_count() const;
};

/// Parses the instance text format:
///
///     # comment
///     n 12          (optional; otherwise inferred from the largest index)
///     J 0 3 -0.88   (or bare "0 3 -0.88")
///     h 4 0.1       (or bare "4 0.1")
///
/// Throws InputError with the offending line number.
IsingInstance parse_instance(std::string_view text);
IsingInstance load_instance(const std::filesystem::path& path);
std::string format_instance(const IsingInstance& instance);

/// Text of the bundled 12-qubit benchmark instance.
std::string_view i12_0_text();
IsingInstance i12_0();

double ising_energy(const IsingInstance& instance, const SpinConfig& config);

/// Energy for every basis state index 0 .. 2^n - 1, same bit convention as
/// SpinConfig. Used for the diagonal of H_p.
std::vector<double> all_ising_energies(const IsingInstance& instance);

/// Exhaustive enumeration (n <= 24). Energies closer than `merge_tolerance`
/// are one level. max_levels == 0 keeps every level.
ClassicalSpectrum brute_force_spectrum(const IsingInstance& instance,
                                       std::size_t max_levels = 0,
                                       double merge_tolerance = 1e-9);

inline constexpr int kMaxEnumerationQubits = 24;

}  // namespace pauselab
