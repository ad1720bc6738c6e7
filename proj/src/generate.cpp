#include "jrp/generate.hpp"

#include <algorithm>
#include <regex>

#include "jrp/exact.hpp"

namespace jrp {

std::mt19937_64 SplitRng::child(std::uint64_t stream) const {
  std::seed_seq seq{static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

namespace {

struct Shape {
  int max_items = 3;
  int min_horizon = 2;
  int max_horizon = 6;
  int min_demands = 1;
  int max_demands = 8;
  int min_colors = 1;
  int max_colors = 2;
  bool general_holding = false;
  bool penalties = false;
  double limit_fraction = 0.5;
};

int draw(std::mt19937_64& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

// Every demand has a servable window, so serving everything is feasible
// whatever the limits.
Instance random_shape(std::mt19937_64& rng, const Shape& sh) {
  Instance inst;
  inst.n_items = draw(rng, 1, sh.max_items);
  inst.horizon = draw(rng, sh.min_horizon, sh.max_horizon);
  inst.k0 = draw(rng, 1, 8) / 2.0;
  for (int i = 0; i < inst.n_items; ++i) inst.k_item.push_back(draw(rng, 0, 8) / 2.0);
  inst.n_colors = draw(rng, sh.min_colors, sh.max_colors);
  int n = draw(rng, sh.min_demands, sh.max_demands);
  std::vector<std::pair<int, int>> used;
  for (int k = 0; k < n; ++k) {
    Demand d;
    bool fresh = false;
    for (int attempt = 0; attempt < 20 && !fresh; ++attempt) {
      d.item = draw(rng, 0, inst.n_items - 1);
      d.deadline = draw(rng, 1, inst.horizon);
      fresh = std::find(used.begin(), used.end(), std::make_pair(d.item, d.deadline)) == used.end();
    }
    if (!fresh) continue;
    used.push_back({d.item, d.deadline});
    int start = draw(rng, 1, d.deadline);
    d.holding.assign(d.deadline, kInfeasible);
    double h = 0.0;
    for (int s = d.deadline; s >= start; --s) {
      d.holding[s - 1] = sh.general_holding ? h : 0.0;
      h += draw(rng, 0, 8) / 4.0;
    }
    d.weights.assign(inst.n_colors, 0.0);
    for (int c = 0; c < inst.n_colors; ++c) {
      if (draw(rng, 0, 9) < 7) d.weights[c] = draw(rng, 1, 3);
    }
    if (sh.penalties) d.penalty = draw(rng, 0, 16) / 4.0;
    inst.demands.push_back(d);
  }
  for (int c = 0; c < inst.n_colors; ++c) {
    inst.rejection_limits.push_back(std::floor(sh.limit_fraction * inst.total_weight(c) * draw(rng, 0, 4) / 4.0));
  }
  return inst;
}

Instance setcover_profile(std::mt19937_64& rng) {
  int elements = draw(rng, 2, 4);
  int n_sets = draw(rng, 2, 6);
  std::vector<std::vector<int>> sets(n_sets);
  for (auto& s : sets) {
    for (int e = 0; e < elements; ++e) {
      if (draw(rng, 0, 1)) s.push_back(e);
    }
  }
  for (int e = 0; e < elements; ++e) {
    bool covered = false;
    for (const auto& s : sets) covered = covered || std::find(s.begin(), s.end(), e) != s.end();
    if (!covered) sets[draw(rng, 0, n_sets - 1)].push_back(e);
  }
  for (auto& s : sets) std::sort(s.begin(), s.end());
  return build_set_cover_instance(sets, elements);
}

}  // namespace

std::vector<std::string> profile_names() { return {"tiny-exact", "jrpd", "general", "colorful", "gap(T)", "setcover"}; }

Instance generate_instance(const std::string& profile, std::uint64_t seed) {
  std::mt19937_64 rng = SplitRng(seed).child(0);
  std::smatch match;
  if (std::regex_match(profile, match, std::regex(R"(gap\((\d+)\))"))) {
    int t = std::stoi(match[1].str());
    if (t < 1 || t > 100000) throw Error(Errc::kBadProfile, "gap horizon must lie in [1, 100000]");
    Instance inst;
    inst.n_items = 1;
    inst.horizon = t;
    inst.k0 = 1.0;
    inst.k_item = {0.0};
    inst.n_colors = 1;
    inst.rejection_limits = {static_cast<double>(t - 1)};
    for (int s = 1; s <= t; ++s) {
      Demand d;
      d.deadline = s;
      d.holding.assign(s, 0.0);
      d.weights = {1.0};
      inst.demands.push_back(d);
    }
    return inst;
  }
  Shape sh;
  if (profile == "tiny-exact") {
    sh.general_holding = draw(rng, 0, 1) == 1;
    sh.penalties = draw(rng, 0, 2) == 0;
  } else if (profile == "jrpd") {
    sh.max_items = 4;
    sh.min_horizon = 6;
    sh.max_horizon = 12;
    sh.min_demands = 6;
    sh.max_demands = 20;
    sh.max_colors = 1;
  } else if (profile == "general") {
    sh.max_items = 4;
    sh.min_horizon = 6;
    sh.max_horizon = 12;
    sh.min_demands = 6;
    sh.max_demands = 20;
    sh.general_holding = true;
  } else if (profile == "colorful") {
    sh.max_items = 3;
    sh.min_horizon = 4;
    sh.max_horizon = 10;
    sh.min_demands = 6;
    sh.max_demands = 16;
    sh.min_colors = 2;
    sh.max_colors = 4;
    sh.penalties = true;
  } else if (profile == "setcover") {
    return setcover_profile(rng);
  } else {
    throw Error(Errc::kBadProfile, "unknown profile '" + profile + "'");
  }
  Instance inst = random_shape(rng, sh);
  inst.validate();
  return inst;
}

}  // namespace jrp
