#include <cmath>
#include <numeric>
#include <string>

#include "probesched/errors.hpp"
#include "probesched/instance.hpp"
#include "probesched/random.hpp"

namespace probesched {

namespace {

std::vector<std::string> numbered(const char* prefix, Index n) {
  std::vector<std::string> ids;
  ids.reserve(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) ids.push_back(prefix + std::to_string(i));
  return ids;
}

std::int64_t ipow(std::int64_t base, int exp) {
  std::int64_t r = 1;
  while (exp-- > 0) r *= base;
  return r;
}

}  // namespace

Eigen::VectorXd make_weights(WeightProfile profile, Index n, std::uint64_t seed, double zipf_exponent) {
  Eigen::VectorXd w(n);
  switch (profile) {
    case WeightProfile::Uniform:
      w.setOnes();
      break;
    case WeightProfile::Random: {
      // integers 1..10, so ratios stay moderate and values print exactly
      Rng rng(seed);
      for (Index e = 0; e < n; ++e) w[e] = static_cast<double>(1 + rng.below(10));
      break;
    }
    case WeightProfile::Zipf: {
      // rank order is a seeded permutation so heavy elements are not always the first ids
      std::vector<Index> rank(static_cast<std::size_t>(n));
      std::iota(rank.begin(), rank.end(), Index{0});
      Rng rng(seed);
      rng.shuffle(rank);
      for (Index e = 0; e < n; ++e) w[rank[e]] = std::pow(static_cast<double>(e + 1), -zipf_exponent);
      break;
    }
  }
  return normalized_weights(w, WeightMode::Sum);
}

Instance gen_singletons(Index n, std::span<const double> weights) {
  if (n < 1) throw ValidationError("gen_singletons: n must be at least 1");
  Eigen::VectorXd w = Eigen::VectorXd::Ones(n);
  if (!weights.empty()) {
    if (static_cast<Index>(weights.size()) != n) throw ValidationError("gen_singletons: expected " + std::to_string(n) + " weights");
    w = Eigen::Map<const Eigen::VectorXd>(weights.data(), n);
  }
  std::vector<Test> tests;
  for (Index e = 0; e < n; ++e) tests.push_back({"t" + std::to_string(e), {e}, {}});
  return normalize(Instance(numbered("e", n), w, std::move(tests)), WeightMode::Sum);
}

// k-ary folded Clos ("k-ary L-tree"):
//   hosts 0..k^L-1; tier-j switches (j = 1..L) are named (group, pos) where
//   group = host / k^j identifies the subtree served and pos < k^(j-1).
//   Tier-j switch (g, pos) has k up-ports; port u leads to tier-(j+1) switch
//   (g / k, pos + u * k^(j-1)). Every host hangs off leaf (host / k, 0).
// A shortest route between hosts a and b climbs to the lowest tier h where
// a / k^h == b / k^h, choosing an up-port at each of tiers 1..h-1 (k^(h-1)
// routes, 2h links each), and descends deterministically.
Instance gen_clos(int levels, int radix) {
  if (levels < 2) throw ValidationError("gen_clos: levels must be at least 2");
  if (radix < 2) throw ValidationError("gen_clos: radix must be at least 2");
  const std::int64_t k = radix;
  const std::int64_t hosts = ipow(k, levels);
  if (hosts > 4096) throw ValidationError("gen_clos: fabric too large to enumerate all routes");

  auto switch_name = [](int tier, std::int64_t group, std::int64_t pos) {
    return "s" + std::to_string(tier) + "." + std::to_string(group) + "." + std::to_string(pos);
  };

  // Link numbering: host links first, then tier boundary j (1..L-1) by
  // (lower switch, up-port).
  std::vector<std::string> ids;
  const std::int64_t per_tier = ipow(k, levels - 1);  // switches per tier
  for (std::int64_t a = 0; a < hosts; ++a) ids.push_back("h" + std::to_string(a) + "~" + switch_name(1, a / k, 0));
  auto up_link = [&](int tier, std::int64_t group, std::int64_t pos, std::int64_t port) -> Index {
    // switches of a tier enumerated as group * k^(tier-1) + pos
    std::int64_t sw = group * ipow(k, tier - 1) + pos;
    return static_cast<Index>(hosts + (tier - 1) * per_tier * k + sw * k + port);
  };
  for (int tier = 1; tier < levels; ++tier) {
    const std::int64_t width = ipow(k, tier - 1);
    for (std::int64_t g = 0; g < hosts / ipow(k, tier); ++g)
      for (std::int64_t pos = 0; pos < width; ++pos)
        for (std::int64_t u = 0; u < k; ++u)
          ids.push_back(switch_name(tier, g, pos) + "~" + switch_name(tier + 1, g / k, pos + u * width));
  }

  std::vector<Test> tests;
  for (std::int64_t a = 0; a < hosts; ++a) {
    for (std::int64_t b = a + 1; b < hosts; ++b) {
      int top = 1;
      while (a / ipow(k, top) != b / ipow(k, top)) ++top;
      const std::int64_t routes = ipow(k, top - 1);
      for (std::int64_t r = 0; r < routes; ++r) {
        Test t;
        t.id = "p" + std::to_string(a) + "-" + std::to_string(b) + "." + std::to_string(r);
        t.elements.push_back(static_cast<Index>(a));
        t.elements.push_back(static_cast<Index>(b));
        // pos at tier j is the up-port digits chosen so far: pos_{j+1} = pos_j + u_j * k^(j-1)
        std::int64_t pos = 0;
        std::int64_t rest = r;
        for (int tier = 1; tier < top; ++tier) {
          std::int64_t u = rest % k;
          rest /= k;
          t.elements.push_back(up_link(tier, a / ipow(k, tier), pos, u));
          t.elements.push_back(up_link(tier, b / ipow(k, tier), pos, u));
          pos += u * ipow(k, tier - 1);
        }
        tests.push_back(std::move(t));
      }
    }
  }
  if (tests.empty()) throw ValidationError("gen_clos: parameters yield no routes");
  Eigen::VectorXd w = Eigen::VectorXd::Constant(static_cast<Index>(ids.size()), 1.0 / static_cast<double>(ids.size()));
  return Instance(std::move(ids), std::move(w), std::move(tests));
}

Instance gen_lowerbound(int num_tests, int subset_size, std::uint64_t size_cap) {
  if (subset_size < 1 || 2 * subset_size > num_tests)
    throw ValidationError("gen_lowerbound: need 1 <= l <= m/2");
  // C(m, l) with overflow-safe early exit
  double count = 1.0;
  for (int i = 1; i <= subset_size; ++i) count = count * (num_tests - subset_size + i) / i;
  if (count > static_cast<double>(size_cap)) throw ValidationError("gen_lowerbound: C(m,l) exceeds the size cap");

  std::vector<std::string> ids;
  std::vector<Test> tests(static_cast<std::size_t>(num_tests));
  for (int i = 0; i < num_tests; ++i) tests[i].id = "t" + std::to_string(i);

  // enumerate l-subsets in lexicographic order
  std::vector<int> subset(static_cast<std::size_t>(subset_size));
  std::iota(subset.begin(), subset.end(), 0);
  while (true) {
    std::string id = "e";
    for (std::size_t j = 0; j < subset.size(); ++j) id += (j ? "." : "") + std::to_string(subset[j]);
    const auto e = static_cast<Index>(ids.size());
    ids.push_back(std::move(id));
    for (int i : subset) tests[i].elements.push_back(e);

    int j = subset_size - 1;
    while (j >= 0 && subset[j] == num_tests - subset_size + j) --j;
    if (j < 0) break;
    ++subset[j];
    for (int t = j + 1; t < subset_size; ++t) subset[t] = subset[t - 1] + 1;
  }
  const auto n = static_cast<Index>(ids.size());
  return Instance(std::move(ids), Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n)), std::move(tests));
}

Instance gen_random(const RandomInstanceParams& params) {
  const Index n = params.num_elements;
  const Index m = params.num_tests;
  if (n < 1 || m < 1) throw ValidationError("gen_random: need at least one element and one test");
  if (!(params.density > 0.0 && params.density <= 1.0)) throw ValidationError("gen_random: density must be in (0,1]");

  Rng rng(params.seed);
  std::vector<std::vector<bool>> member(static_cast<std::size_t>(m), std::vector<bool>(static_cast<std::size_t>(n)));
  for (Index i = 0; i < m; ++i) {
    bool any = false;
    for (Index e = 0; e < n; ++e) any |= (member[i][e] = rng.uniform() < params.density);
    if (!any) member[i][rng.below(static_cast<std::uint64_t>(n))] = true;
  }
  for (Index e = 0; e < n; ++e) {
    bool covered = false;
    for (Index i = 0; i < m; ++i) covered |= member[i][e];
    if (!covered) member[rng.below(static_cast<std::uint64_t>(m))][e] = true;
  }

  std::vector<Test> tests;
  for (Index i = 0; i < m; ++i) {
    Test t{"t" + std::to_string(i), {}, {}};
    for (Index e = 0; e < n; ++e)
      if (member[i][e]) t.elements.push_back(e);
    tests.push_back(std::move(t));
  }
  Eigen::VectorXd w = make_weights(params.weights, n, params.seed ^ 0x5eedull, params.zipf_exponent);
  return Instance(numbered("e", n), std::move(w), std::move(tests));
}

}  // namespace probesched
