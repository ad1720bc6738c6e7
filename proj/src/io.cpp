#include "jrp/io.hpp"

#include <fstream>
#include <sstream>

namespace jrp {

using nlohmann::json;

namespace {

json holding_to_json(double h) {
  if (is_infeasible(h)) return "inf";
  return h;
}

double holding_from_json(const json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() == "inf") return kInfeasible;
    throw Error(Errc::kBadInput, "holding entry must be a number or \"inf\"");
  }
  return j.get<double>();
}

void expect_format(const json& j, const char* format) {
  if (!j.is_object()) throw Error(Errc::kBadInput, "expected a JSON object");
  if (j.value("format", std::string()) != format) {
    throw Error(Errc::kBadInput, std::string("format tag is not ") + format);
  }
  if (j.value("version", 0) != kFormatVersion) {
    throw Error(Errc::kBadInput, "unsupported format version");
  }
}

}  // namespace

json instance_to_json(const Instance& instance) {
  json demands = json::array();
  for (const Demand& d : instance.demands) {
    json holding = json::array();
    for (double h : d.holding) holding.push_back(holding_to_json(h));
    demands.push_back({{"item", d.item},
                       {"deadline", d.deadline},
                       {"holding", holding},
                       {"weights", d.weights},
                       {"penalty", d.penalty}});
  }
  return {{"format", "jrp-instance"},
          {"version", kFormatVersion},
          {"n_items", instance.n_items},
          {"horizon", instance.horizon},
          {"k0", instance.k0},
          {"k_item", instance.k_item},
          {"n_colors", instance.n_colors},
          {"rejection_limits", instance.rejection_limits},
          {"demands", demands}};
}

Instance instance_from_json(const json& j) {
  expect_format(j, "jrp-instance");
  Instance inst;
  try {
    inst.n_items = j.at("n_items").get<int>();
    inst.horizon = j.at("horizon").get<int>();
    inst.k0 = j.at("k0").get<double>();
    inst.k_item = j.at("k_item").get<std::vector<double>>();
    inst.n_colors = j.at("n_colors").get<int>();
    inst.rejection_limits = j.at("rejection_limits").get<std::vector<double>>();
    for (const json& jd : j.at("demands")) {
      Demand d;
      d.item = jd.at("item").get<int>();
      d.deadline = jd.at("deadline").get<int>();
      for (const json& h : jd.at("holding")) d.holding.push_back(holding_from_json(h));
      d.weights = jd.at("weights").get<std::vector<double>>();
      d.penalty = jd.value("penalty", 0.0);
      inst.demands.push_back(std::move(d));
    }
  } catch (const json::exception& e) {
    throw Error(Errc::kBadInput, e.what());
  }
  inst.validate();
  return inst;
}

json solution_to_json(const IntegralSolution& sol) {
  json orders = json::array();
  for (const auto& [s, items] : sol.orders) {
    orders.push_back({{"t", s}, {"items", std::vector<int>(items.begin(), items.end())}});
  }
  json disp = json::array();
  for (const Disposition& d : sol.disposition) {
    if (d.is_served()) {
      disp.push_back(d.slot);
    } else if (d.is_rejected()) {
      disp.push_back("rejected");
    } else {
      disp.push_back(nullptr);
    }
  }
  return {{"format", "jrp-solution"},
          {"version", kFormatVersion},
          {"orders", orders},
          {"disposition", disp}};
}

IntegralSolution solution_from_json(const json& j) {
  expect_format(j, "jrp-solution");
  IntegralSolution sol;
  try {
    for (const json& o : j.at("orders")) {
      int s = o.at("t").get<int>();
      for (const json& i : o.at("items")) sol.orders[s].insert(i.get<int>());
      if (sol.orders[s].empty()) sol.orders.erase(s);
    }
    for (const json& d : j.at("disposition")) {
      if (d.is_null()) {
        sol.disposition.push_back(Disposition{});
      } else if (d.is_string()) {
        if (d.get<std::string>() != "rejected") throw Error(Errc::kBadInput, "bad disposition");
        sol.disposition.push_back(Disposition::rejected());
      } else {
        sol.disposition.push_back(Disposition::served(d.get<int>()));
      }
    }
  } catch (const json::exception& e) {
    throw Error(Errc::kBadInput, e.what());
  }
  return sol;
}

std::string dump_json(const json& j) { return j.dump(2) + "\n"; }

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw Error(Errc::kBadInput, e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::kBadInput, "cannot write " + path);
  out << text;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::kBadInput, "cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

Instance read_instance(const std::string& path) {
  return instance_from_json(parse_json(read_text_file(path)));
}

void write_instance(const std::string& path, const Instance& instance) {
  write_text_file(path, dump_json(instance_to_json(instance)));
}

}  // namespace jrp
