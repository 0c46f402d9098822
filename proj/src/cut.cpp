#include "sparsecut/cut.hpp"

#include <sstream>

#include "json.hpp"

namespace sparsecut {

const char* to_string(CutMode mode) {
  switch (mode) {
    case CutMode::EPSD: return "epsd";
    case CutMode::EDNN: return "ednn";
    case CutMode::Dense: return "dense";
  }
  return "?";
}

CutMode parse_cut_mode(const std::string& text) {
  if (text == "epsd") return CutMode::EPSD;
  if (text == "ednn") return CutMode::EDNN;
  if (text == "dense") return CutMode::Dense;
  throw Error(ErrorKind::InvalidArgument, "unknown cut mode '" + text + "'");
}

void write_cut_pool(const std::vector<Cut>& cuts, std::ostream& out) {
  nlohmann::ordered_json list = nlohmann::ordered_json::array();
  for (const auto& cut : cuts) {
    nlohmann::ordered_json pairs = nlohmann::ordered_json::array();
    std::vector<double> values;
    const auto& s = *cut.coeffs.support();
    for (std::size_t k = 0; k < s.size(); ++k) {
      const double v = cut.coeffs.values()[static_cast<Eigen::Index>(k)];
      if (v == 0.0) continue;
      pairs.push_back({s.pair(k).i, s.pair(k).j});
      values.push_back(v);
    }
    list.push_back({{"mode", to_string(cut.mode)}, {"pairs", pairs}, {"values", values}, {"violation", cut.violation}});
  }
  out << list.dump(1) << '\n';
}

std::vector<Cut> read_cut_pool(std::istream& in, const SupportPtr& support) {
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::MalformedInput, std::string("malformed cut pool: ") + e.what());
  }
  if (!j.is_array()) throw Error(ErrorKind::SchemaViolation, "cut pool must be a JSON list");
  std::vector<Cut> out;
  try {
    for (const auto& item : j) {
      Cut cut;
      cut.mode = parse_cut_mode(item.at("mode").get<std::string>());
      cut.violation = item.at("violation").get<double>();
      cut.coeffs = EVector(support);
      const auto& pairs = item.at("pairs");
      const auto& values = item.at("values");
      if (pairs.size() != values.size()) throw Error(ErrorKind::SchemaViolation, "pairs and values differ in length");
      for (std::size_t k = 0; k < pairs.size(); ++k)
        cut.coeffs.set(pairs[k].at(0).get<int>(), pairs[k].at(1).get<int>(), values[k].get<double>());
      out.push_back(std::move(cut));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::SchemaViolation, std::string("cut pool: ") + e.what());
  }
  return out;
}

}  // namespace sparsecut
