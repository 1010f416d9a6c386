#include "pauselab/instance.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "bundled_instances.hpp"
#include "pauselab/error.hpp"

namespace pauselab {

IsingInstance::IsingInstance(int n, std::vector<Coupling> couplings,
                             std::vector<LocalField> fields)
    : n_(n) {
  if (n < 1 || n > 63) {
    throw InputError("instance size must be in [1, 63], got " + std::to_string(n));
  }
  auto check_index = [n](int i) {
    if (i < 0 || i >= n) {
      throw InputError("qubit index " + std::to_string(i) + " out of range [0, " +
                       std::to_string(n) + ")");
    }
  };
  for (auto& c : couplings) {
    check_index(c.i);
    check_index(c.j);
    if (c.i == c.j) throw InputError("self-coupling on qubit " + std::to_string(c.i));
    if (c.i > c.j) std::swap(c.i, c.j);
    if (!std::isfinite(c.value)) throw InputError("non-finite coupling value");
  }
  std::sort(couplings.begin(), couplings.end(), [](const Coupling& a, const Coupling& b) {
    return std::pair(a.i, a.j) < std::pair(b.i, b.j);
  });
  for (std::size_t k = 1; k < couplings.size(); ++k) {
    if (couplings[k].i == couplings[k - 1].i && couplings[k].j == couplings[k - 1].j) {
      throw InputError("duplicate coupling (" + std::to_string(couplings[k].i) + ", " +
                       std::to_string(couplings[k].j) + ")");
    }
  }
  h_.assign(n, 0.0);
  std::vector<bool> seen(n, false);
  for (const auto& f : fields) {
    check_index(f.i);
    if (seen[f.i]) throw InputError("duplicate field on qubit " + std::to_string(f.i));
    if (!std::isfinite(f.value)) throw InputError("non-finite field value");
    seen[f.i] = true;
    h_[f.i] = f.value;
  }
  std::sort(fields.begin(), fields.end(),
            [](const LocalField& a, const LocalField& b) { return a.i < b.i; });
  couplings_ = std::move(couplings);
  fields_ = std::move(fields);

  adjacency_.assign(n, {});
  for (const auto& c : couplings_) {
    adjacency_[c.i].emplace_back(c.j, c.value);
    adjacency_[c.j].emplace_back(c.i, c.value);
  }
}

bool IsingInstance::z2_symmetric() const noexcept {
  return std::all_of(h_.begin(), h_.end(), [](double h) { return h == 0.0; });
}

double IsingInstance::coupling(int i, int j) const {
  if (i > j) std::swap(i, j);
  auto it = std::lower_bound(couplings_.begin(), couplings_.end(), std::pair(i, j),
                             [](const Coupling& c, std::pair<int, int> key) {
                               return std::pair(c.i, c.j) < key;
                             });
  if (it != couplings_.end() && it->i == i && it->j == j) return it->value;
  return 0.0;
}

SpinConfig::SpinConfig(int n, std::uint64_t bits) : n_(n), bits_(bits) {
  if (n < 0 || n > 64) throw InputError("spin configuration length must be <= 64");
  if (n < 64 && (bits >> n) != 0) throw InputError("bits set beyond configuration length");
}

SpinConfig SpinConfig::from_label(std::string_view label) {
  const int n = static_cast<int>(label.size());
  if (n == 0 || n > 64) throw InputError("spin label length must be in [1, 64]");
  std::uint64_t bits = 0;
  for (int k = 0; k < n; ++k) {
    const char c = label[n - 1 - k];
    if (c == '1') {
      bits |= std::uint64_t{1} << k;
    } else if (c != '0') {
      throw InputError("spin label must contain only 0/1: " + std::string(label));
    }
  }
  return SpinConfig(n, bits);
}

SpinConfig SpinConfig::complement() const {
  const std::uint64_t mask = n_ == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n_) - 1;
  return SpinConfig(n_, ~bits_ & mask);
}

std::string SpinConfig::label() const {
  std::string s(n_, '0');
  for (int k = 0; k < n_; ++k) {
    if (bit(k)) s[n_ - 1 - k] = '1';
  }
  return s;
}

int hamming_distance(const SpinConfig& a, const SpinConfig& b) {
  if (a.size() != b.size()) throw InputError("hamming distance of unequal lengths");
  return std::popcount(a.bits() ^ b.bits());
}

std::size_t ClassicalSpectrum::config_count() const {
  std::size_t total = 0;
  for (const auto& level : levels) total += level.configs.size();
  return total;
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos < s.size()) {
    const auto start = s.find_first_not_of(" \t,", pos);
    if (start == std::string_view::npos) break;
    auto end = s.find_first_of(" \t,", start);
    if (end == std::string_view::npos) end = s.size();
    out.push_back(s.substr(start, end - start));
    pos = end;
  }
  return out;
}

template <class T>
T parse_number(std::string_view token, int line_no) {
  T value{};
  const auto* begin = token.data();
  const auto* end = token.data() + token.size();
  if (!token.empty() && *begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end) {
    throw InputError("line " + std::to_string(line_no) + ": not a number: '" +
                     std::string(token) + "'");
  }
  return value;
}

}  // namespace

IsingInstance parse_instance(std::string_view text) {
  std::vector<Coupling> couplings;
  std::vector<LocalField> fields;
  int declared_n = -1;
  int max_index = -1;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    const auto line = trim(text.substr(pos, eol - pos));
    pos = eol + 1;
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    auto tokens = split_ws(line);
    std::string_view tag;
    if (tokens.front() == "J" || tokens.front() == "h" || tokens.front() == "n") {
      tag = tokens.front();
      tokens.erase(tokens.begin());
    } else {
      tag = tokens.size() == 3 ? "J" : tokens.size() == 2 ? "h" : "";
    }
    if (tag == "n" && tokens.size() == 1) {
      declared_n = parse_number<int>(tokens[0], line_no);
    } else if (tag == "J" && tokens.size() == 3) {
      const int i = parse_number<int>(tokens[0], line_no);
      const int j = parse_number<int>(tokens[1], line_no);
      couplings.push_back({i, j, parse_number<double>(tokens[2], line_no)});
      max_index = std::max({max_index, i, j});
    } else if (tag == "h" && tokens.size() == 2) {
      const int i = parse_number<int>(tokens[0], line_no);
      fields.push_back({i, parse_number<double>(tokens[1], line_no)});
      max_index = std::max(max_index, i);
    } else {
      throw InputError("line " + std::to_string(line_no) + ": unrecognized record '" +
                       std::string(line) + "'");
    }
  }
  const int n = declared_n >= 0 ? declared_n : max_index + 1;
  if (n <= 0) throw InputError("instance declares no qubits");
  return IsingInstance(n, std::move(couplings), std::move(fields));
}

IsingInstance load_instance(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open instance file: " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_instance(buffer.str());
}

std::string format_instance(const IsingInstance& instance) {
  std::ostringstream out;
  out.precision(17);
  out << "n " << instance.size() << '\n';
  for (const auto& c : instance.couplings()) out << "J " << c.i << ' ' << c.j << ' ' << c.value << '\n';
  for (const auto& f : instance.fields()) out << "h " << f.i << ' ' << f.value << '\n';
  return out.str();
}

std::string_view i12_0_text() { return detail::kI12_0Text; }

IsingInstance i12_0() { return parse_instance(i12_0_text()); }

double ising_energy(const IsingInstance& instance, const SpinConfig& config) {
  if (config.size() != instance.size()) {
    throw InputError("configuration length " + std::to_string(config.size()) +
                     " does not match instance size " + std::to_string(instance.size()));
  }
  double e = 0.0;
  for (const auto& c : instance.couplings()) e += c.value * config.spin(c.i) * config.spin(c.j);
  for (const auto& f : instance.fields()) e += f.value * config.spin(f.i);
  return e;
}

std::vector<double> all_ising_energies(const IsingInstance& instance) {
  const int n = instance.size();
  if (n > kMaxEnumerationQubits) {
    throw InputError("exhaustive enumeration limited to " +
                     std::to_string(kMaxEnumerationQubits) + " qubits");
  }
  const std::uint64_t count = std::uint64_t{1} << n;
  std::vector<double> energies(count);
  for (std::uint64_t x = 0; x < count; ++x) energies[x] = ising_energy(instance, SpinConfig(n, x));
  return energies;
}

ClassicalSpectrum brute_force_spectrum(const IsingInstance& instance, std::size_t max_levels,
                                       double merge_tolerance) {
  const int n = instance.size();
  const auto energies = all_ising_energies(instance);
  std::vector<std::uint64_t> order(energies.size());
  std::iota(order.begin(), order.end(), std::uint64_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::uint64_t a, std::uint64_t b) { return energies[a] < energies[b]; });

  ClassicalSpectrum spectrum;
  for (const auto x : order) {
    const double e = energies[x];
    if (spectrum.levels.empty() || e - spectrum.levels.back().energy > merge_tolerance) {
      if (max_levels != 0 && spectrum.levels.size() == max_levels) break;
      spectrum.levels.push_back({e, {}});
    }
    spectrum.levels.back().configs.emplace_back(n, x);
  }
  for (auto& level : spectrum.levels) std::sort(level.configs.begin(), level.configs.end());
  return spectrum;
}

}  // namespace pauselab
