#include "amb/mdp_io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace amb {

using Json = nlohmann::ordered_json;

std::string mdp_to_text(const TabularMdp& mdp) {
  Json doc;
  doc["horizon"] = mdp.horizon;
  Json levels = Json::array();
  for (const auto& level : mdp.levels) {
    Json names = Json::array();
    for (StateId s : level) names.push_back(mdp.state_names[s]);
    levels.push_back(std::move(names));
  }
  doc["levels"] = std::move(levels);

  Json rewards = Json::object();
  Json transitions = Json::object();
  for (StateId s = 0; s < mdp.num_states(); ++s) {
    Json means = Json::array();
    Json rows = Json::array();
    for (ActionId a = 0; a < mdp.num_actions(s); ++a) {
      const PairId p = mdp.pair(s, a);
      means.push_back(mdp.reward_mean[p]);
      Json row = Json::array();
      for (const auto& t : mdp.transitions[p]) row.push_back(Json::array({mdp.state_names[t.next], t.prob}));
      rows.push_back(std::move(row));
    }
    rewards[mdp.state_names[s]] = std::move(means);
    if (mdp.state_level[s] < mdp.horizon) transitions[mdp.state_names[s]] = std::move(rows);
  }
  doc["rewards"] = std::move(rewards);
  doc["transitions"] = std::move(transitions);

  Json initial = Json::object();
  for (const auto& t : mdp.initial) initial[mdp.state_names[t.next]] = t.prob;
  doc["initial"] = std::move(initial);
  return doc.dump(1) + "\n";
}

TabularMdp mdp_from_text(const std::string& text) {
  Json doc;
  try {
    doc = Json::parse(text);
    const int horizon = doc.at("horizon").get<int>();
    MdpBuilder builder(horizon);
    const auto& rewards = doc.at("rewards");
    for (const auto& level : doc.at("levels")) {
      std::vector<std::string> names = level.get<std::vector<std::string>>();
      builder.add_level(names, 0);
      for (const auto& name : names) {
        const auto& means = rewards.at(name);
        builder.set_num_actions(name, means.size());
        for (std::size_t a = 0; a < means.size(); ++a) builder.set_reward(name, a, means[a].get<double>());
      }
    }
    if (doc.contains("transitions")) {
      for (const auto& [name, rows] : doc.at("transitions").items()) {
        for (std::size_t a = 0; a < rows.size(); ++a)
          for (const auto& entry : rows[a])
            builder.add_transition(name, a, entry.at(0).get<std::string>(), entry.at(1).get<double>());
      }
    }
    for (const auto& [name, p] : doc.at("initial").items()) builder.set_initial(name, p.get<double>());
    return builder.build();
  } catch (const Json::exception& e) {
    throw std::invalid_argument(std::string("malformed MDP document: ") + e.what());
  }
}

void save_mdp(const TabularMdp& mdp, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  out << mdp_to_text(mdp);
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

TabularMdp load_mdp(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return mdp_from_text(buf.str());
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(path.string() + ": " + e.what());
  }
}

}  // namespace amb
