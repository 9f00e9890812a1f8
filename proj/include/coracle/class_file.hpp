#pragma once

// Class files: {"domain": [ints], "hypotheses": [{"name": str, "values": "0101"}]}
// with values aligned to domain. Points outside domain are 0.

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "coracle/hypothesis.hpp"

namespace coracle {

inline HypothesisClass parse_class(const std::string& text) {
  using nlohmann::json;
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("class file is not valid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("domain") || !doc.contains("hypotheses")) {
    throw ParseError("class file needs 'domain' and 'hypotheses' fields");
  }
  std::vector<Point> domain;
  for (const auto& p : doc.at("domain")) {
    if (!p.is_number_unsigned() && !(p.is_number_integer() && p.get<std::int64_t>() >= 0)) {
      throw ParseError("domain entries must be non-negative integers");
    }
    domain.push_back(p.get<Point>());
  }
  std::vector<Hypothesis> hs;
  std::size_t index = 0;
  for (const auto& h : doc.at("hypotheses")) {
    const std::string name = h.contains("name") && h.at("name").is_string()
                                 ? h.at("name").get<std::string>()
                                 : "#" + std::to_string(index);
    if (!h.contains("values") || !h.at("values").is_string()) {
      throw ParseError("hypothesis '" + name + "' has no 'values' string");
    }
    const auto values = h.at("values").get<std::string>();
    if (values.size() != domain.size()) {
      throw ParseError("hypothesis '" + name + "' has " + std::to_string(values.size()) +
                       " values for a domain of " + std::to_string(domain.size()) + " points");
    }
    try {
      hs.emplace_back(name, domain, values);
    } catch (const InvalidHypothesis& e) {
      throw ParseError(e.what());
    }
    ++index;
  }
  try {
    return {std::move(domain), std::move(hs)};
  } catch (const InvalidHypothesis& e) {
    throw ParseError(e.what());
  }
}

inline HypothesisClass read_class_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot read class file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_class(buf.str());
}

inline std::string class_to_json(const HypothesisClass& c) {
  nlohmann::ordered_json doc;
  doc["domain"] = c.domain();
  doc["hypotheses"] = nlohmann::ordered_json::array();
  for (const auto& h : c.hypotheses()) {
    doc["hypotheses"].push_back({{"name", h.id()}, {"values", h.bits_over(c.domain())}});
  }
  return doc.dump(2) + "\n";
}

inline void write_class_file(const std::filesystem::path& path, const HypothesisClass& c) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write class file " + path.string());
  out << class_to_json(c);
}

}  // namespace coracle
