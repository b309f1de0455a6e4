#include "amb/export.hpp"

#include <cerrno>
#include <charconv>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace amb {

using Json = nlohmann::ordered_json;

namespace {

void append_double(std::string& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}

template <class T>
T parse_field(std::string_view field, std::size_t line) {
  if constexpr (std::is_floating_point_v<T>) {
    // from_chars for doubles is missing on older toolchains; strtod parses %.17g exactly.
    std::string copy(field);
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(copy.c_str(), &end);
    if (copy.empty() || end != copy.c_str() + copy.size() || errno == ERANGE)
      throw std::invalid_argument("line " + std::to_string(line) + ": bad number '" + copy + "'");
    return v;
  } else {
    T v{};
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc{} || ptr != field.data() + field.size())
      throw std::invalid_argument("line " + std::to_string(line) + ": bad integer '" + std::string(field) + "'");
    return v;
  }
}

}  // namespace

std::string series_to_csv(std::span<const RegretSeries> series) {
  std::string out = kSeriesCsvHeader;
  out += '\n';
  for (const auto& s : series) {
    for (const auto& p : s.points) {
      out += std::to_string(p.episode);
      out += ',';
      append_double(out, p.inst_regret);
      out += ',';
      append_double(out, p.cum_regret);
      out += ',';
      out += std::to_string(p.decided_count);
      out += ',';
      out += std::to_string(p.eliminated_pairs);
      out += ',';
      out += std::to_string(s.seed);
      out += '\n';
    }
  }
  return out;
}

std::vector<RegretSeries> series_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kSeriesCsvHeader) throw std::invalid_argument("missing series CSV header");
  std::vector<RegretSeries> out;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string_view> fields;
    std::string_view rest(line);
    for (std::size_t pos; (pos = rest.find(',')) != std::string_view::npos; rest.remove_prefix(pos + 1))
      fields.push_back(rest.substr(0, pos));
    fields.push_back(rest);
    if (fields.size() != 6) throw std::invalid_argument("line " + std::to_string(lineno) + ": expected 6 fields");
    RegretPoint p;
    p.episode = parse_field<std::int64_t>(fields[0], lineno);
    p.inst_regret = parse_field<double>(fields[1], lineno);
    p.cum_regret = parse_field<double>(fields[2], lineno);
    p.decided_count = parse_field<std::size_t>(fields[3], lineno);
    p.eliminated_pairs = parse_field<std::size_t>(fields[4], lineno);
    const auto seed = parse_field<std::uint64_t>(fields[5], lineno);
    if (out.empty() || out.back().seed != seed) {
      out.emplace_back();
      out.back().seed = seed;
    }
    out.back().points.push_back(p);
    out.back().num_episodes = p.episode;
  }
  return out;
}

std::string series_to_json(std::span<const RegretSeries> series) {
  Json doc = Json::array();
  for (const auto& s : series) {
    Json run;
    run["seed"] = s.seed;
    run["config_hash"] = s.config_hash;
    run["num_episodes"] = s.num_episodes;
    run["invariant_violations"] = s.diagnostics.invariant_violations;
    run["first_bound_violation"] =
        s.diagnostics.first_bound_violation ? Json(*s.diagnostics.first_bound_violation) : Json(nullptr);
    run["first_optimal_elimination"] =
        s.diagnostics.first_optimal_elimination ? Json(*s.diagnostics.first_optimal_elimination) : Json(nullptr);
    Json rows = Json::array();
    for (const auto& p : s.points)
      rows.push_back({{"episode", p.episode},
                      {"inst_regret", p.inst_regret},
                      {"cum_regret", p.cum_regret},
                      {"decided_count", p.decided_count},
                      {"eliminated_pairs", p.eliminated_pairs}});
    run["points"] = std::move(rows);
    doc.push_back(std::move(run));
  }
  return doc.dump(1) + "\n";
}

std::vector<RegretSeries> series_from_json(const std::string& text) {
  std::vector<RegretSeries> out;
  try {
    const Json doc = Json::parse(text);
    for (const auto& run : doc) {
      RegretSeries s;
      s.seed = run.at("seed").get<std::uint64_t>();
      s.config_hash = run.at("config_hash").get<std::uint64_t>();
      s.num_episodes = run.at("num_episodes").get<std::int64_t>();
      s.diagnostics.invariant_violations = run.at("invariant_violations").get<std::size_t>();
      if (!run.at("first_bound_violation").is_null())
        s.diagnostics.first_bound_violation = run["first_bound_violation"].get<std::int64_t>();
      if (!run.at("first_optimal_elimination").is_null())
        s.diagnostics.first_optimal_elimination = run["first_optimal_elimination"].get<std::int64_t>();
      for (const auto& row : run.at("points"))
        s.points.push_back({row.at("episode").get<std::int64_t>(), row.at("inst_regret").get<double>(),
                            row.at("cum_regret").get<double>(), row.at("decided_count").get<std::size_t>(),
                            row.at("eliminated_pairs").get<std::size_t>()});
      out.push_back(std::move(s));
    }
  } catch (const Json::exception& e) {
    throw std::invalid_argument(std::string("malformed series document: ") + e.what());
  }
  return out;
}

std::string summary_to_csv(const RegretSummary& summary) {
  std::string out = kSummaryCsvHeader;
  out += '\n';
  for (const auto& r : summary.rows) {
    out += std::to_string(r.episode);
    out += ',';
    out += std::to_string(summary.runs);
    for (double v : {r.mean, r.median, r.q10, r.q90}) {
      out += ',';
      append_double(out, v);
    }
    out += '\n';
  }
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing: " + std::strerror(errno));
  out << text;
  out.flush();
  if (!out) throw std::runtime_error("write to '" + path.string() + "' failed");
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "' for reading");
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

}  // namespace amb
