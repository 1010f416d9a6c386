#include <catch_amalgamated.hpp>

#include <bit>
#include <cmath>
#include <set>

#include "pauselab/error.hpp"
#include "pauselab/instance.hpp"

using namespace pauselab;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// Direct transcription of the coupling table, independent of the parser.
struct RawCoupling {
  int i, j;
  double v;
};
const RawCoupling kTable[] = {
    {0, 3, -0.888765722269},  {1, 3, -0.453396499878},  {2, 3, -0.581810391599},
    {0, 4, -0.222181654366},  {1, 4, 0.623744373452},  {2, 4, 0.805987681935},
    {0, 5, 0.333955924275},  {1, 5, 0.995412322296},  {2, 5, 0.490983144977},
    {3, 9, -0.925420427917},  {6, 9, 0.663343935819},  {7, 9, 0.687446523051},
    {8, 9, 0.749085209325},  {4, 10, -0.0559945397502},  {6, 10, -0.990358090729},
    {7, 10, 0.491802375676},  {8, 10, 0.505416377921},  {5, 11, -0.400367703995},
    {6, 11, -0.831748994702},  {7, 11, 0.413887841297},  {8, 11, 0.204601421856},
};

double oracle_energy(std::uint64_t bits) {
  double e = 0.0;
  for (const auto& c : kTable) {
    const int zi = ((bits >> c.i) & 1u) ? -1 : 1;
    const int zj = ((bits >> c.j) & 1u) ? -1 : 1;
    e += c.v * zi * zj;
  }
  return e;
}

}  // namespace

TEST_CASE("bundled instance matches the coupling table", "[instance]") {
  const auto inst = i12_0();
  REQUIRE(inst.size() == 12);
  REQUIRE(inst.couplings().size() == 21);
  REQUIRE(inst.fields().empty());
  REQUIRE(inst.z2_symmetric());
  CHECK(inst.coupling(0, 3) == -0.888765722269);
  CHECK(inst.coupling(3, 0) == -0.888765722269);
  for (const auto& c : kTable) CHECK(inst.coupling(c.i, c.j) == c.v);
}

TEST_CASE("instance energies agree with a direct oracle on every config", "[instance]") {
  const auto inst = i12_0();
  const auto all = all_ising_energies(inst);
  REQUIRE(all.size() == 4096);
  for (std::uint64_t b = 0; b < 4096; ++b) {
    REQUIRE_THAT(all[b], WithinAbs(oracle_energy(b), 1e-12));
    REQUIRE(ising_energy(inst, SpinConfig(12, b)) == all[b]);
  }
}

TEST_CASE("global spin flip leaves every energy unchanged", "[instance][property]") {
  const auto inst = i12_0();
  for (std::uint64_t b = 0; b < 4096; ++b) {
    const SpinConfig c(12, b);
    REQUIRE(ising_energy(inst, c) == ising_energy(inst, c.complement()));
  }
}

TEST_CASE("ground level holds exactly the two labelled strings", "[instance]") {
  const auto spec = brute_force_spectrum(i12_0(), 3);
  REQUIRE(spec.levels.size() == 3);
  const std::set<std::string> ground{spec.levels[0].configs[0].label(),
                                     spec.levels[0].configs[1].label()};
  REQUIRE(spec.levels[0].configs.size() == 2);
  CHECK(ground == std::set<std::string>{"000110110000", "111001001111"});
  CHECK_THAT(spec.levels[0].energy, WithinAbs(-9.631935489225, 1e-9));
}

TEST_CASE("first and second excited levels", "[instance]") {
  const auto spec = brute_force_spectrum(i12_0(), 3);
  const auto& e1 = spec.levels[1];
  const auto& e2 = spec.levels[2];
  CHECK_THAT(e2.energy - e1.energy, WithinAbs(0.0781, 1e-3));
  std::set<std::string> l1, l2;
  for (const auto& c : e1.configs) l1.insert(c.label());
  for (const auto& c : e2.configs) l2.insert(c.label());
  CHECK(l1 == std::set<std::string>{"001010001111", "110101110000"});
  CHECK(l2 == std::set<std::string>{"001110001111", "110001110000"});

  // Partners differ only at qubit 9 (1-based), i.e. bit index 8.
  const auto a = SpinConfig::from_label("001010001111");
  const auto b = SpinConfig::from_label("001110001111");
  CHECK((a.bits() ^ b.bits()) == (std::uint64_t{1} << 8));
  const auto c = SpinConfig::from_label("110101110000");
  const auto d = SpinConfig::from_label("110001110000");
  CHECK((c.bits() ^ d.bits()) == (std::uint64_t{1} << 8));
}

TEST_CASE("Hamming distances from the ground doublet to the excited levels", "[instance]") {
  const auto spec = brute_force_spectrum(i12_0(), 3);
  int to_e1 = 64, to_e2 = 64;
  for (const auto& g : spec.levels[0].configs) {
    for (const auto& c : spec.levels[1].configs) to_e1 = std::min(to_e1, hamming_distance(g, c));
    for (const auto& c : spec.levels[2].configs) to_e2 = std::min(to_e2, hamming_distance(g, c));
  }
  CHECK(to_e1 == 4);
  CHECK(to_e2 == 5);
}

TEST_CASE("complete spectrum partitions all configurations", "[instance][property]") {
  const auto inst = i12_0();
  const auto spec = brute_force_spectrum(inst);
  REQUIRE(spec.config_count() == 4096);
  std::set<std::uint64_t> seen;
  for (std::size_t k = 0; k < spec.levels.size(); ++k) {
    if (k > 0) REQUIRE(spec.levels[k].energy > spec.levels[k - 1].energy);
    for (const auto& c : spec.levels[k].configs) {
      REQUIRE(seen.insert(c.bits()).second);
      REQUIRE_THAT(ising_energy(inst, c), WithinAbs(spec.levels[k].energy, 1e-9));
    }
  }
}

TEST_CASE("partition function at beta 1", "[instance][property]") {
  const auto spec = brute_force_spectrum(i12_0());
  double z = 0.0;
  for (const auto& level : spec.levels) {
    z += static_cast<double>(level.configs.size()) * std::exp(-level.energy);
  }
  double oracle = 0.0;
  for (std::uint64_t b = 0; b < 4096; ++b) oracle += std::exp(-oracle_energy(b));
  CHECK_THAT(z, WithinRel(oracle, 1e-12));
  CHECK_THAT(oracle, WithinRel(229632.18828618317, 1e-12));
}

TEST_CASE("trivial instances", "[instance]") {
  const auto one = parse_instance("n 1\nh 0 0\n");
  CHECK(one.size() == 1);
  CHECK(ising_energy(one, SpinConfig(1, 0)) == 0.0);
  CHECK(ising_energy(one, SpinConfig(1, 1)) == 0.0);

  const IsingInstance pair(2, {{0, 1, -1.0}});
  CHECK(ising_energy(pair, SpinConfig::from_label("00")) == -1.0);
  CHECK(ising_energy(pair, SpinConfig::from_label("01")) == 1.0);
}

TEST_CASE("reversed pairs are normalized and duplicates rejected", "[instance]") {
  const auto inst = parse_instance("3 0 1.0\n");
  REQUIRE(inst.couplings().size() == 1);
  CHECK(inst.couplings()[0].i == 0);
  CHECK(inst.couplings()[0].j == 3);
  CHECK_THROWS_AS(parse_instance("0 3 1.0\n3 0 0.5\n"), InputError);
  CHECK_THROWS_AS(parse_instance("n 2\n0 3 1.0\n"), InputError);
  CHECK_THROWS_AS(parse_instance("0 1 abc\n"), InputError);
  CHECK_THROWS_AS(parse_instance("1 1 0.5\n"), InputError);
}

TEST_CASE("format then parse reproduces the instance", "[instance]") {
  const auto inst = i12_0();
  const auto again = parse_instance(format_instance(inst));
  REQUIRE(again.size() == inst.size());
  REQUIRE(again.couplings().size() == inst.couplings().size());
  for (std::size_t k = 0; k < inst.couplings().size(); ++k) {
    CHECK(again.couplings()[k].value == inst.couplings()[k].value);
  }
}

TEST_CASE("labels use qubit 0 as the rightmost character", "[instance]") {
  const auto c = SpinConfig::from_label("000000000001");
  CHECK(c.bit(0));
  CHECK(c.spin(0) == -1);
  CHECK(c.spin(1) == 1);
  CHECK(c.label() == "000000000001");
  CHECK_THROWS_AS(SpinConfig::from_label("01x"), InputError);
}

TEST_CASE("enumeration limit", "[instance]") {
  std::vector<Coupling> chain;
  for (int i = 0; i + 1 < 25; ++i) chain.push_back({i, i + 1, 1.0});
  CHECK_THROWS_AS(brute_force_spectrum(IsingInstance(25, chain)), InputError);
}
