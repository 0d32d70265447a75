#include "divmin/io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace divmin {

namespace {

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DomainError("bad JSON in '" + path + "': " + e.what());
  }
  return j;
}

FiniteDistribution distribution_from_json(const nlohmann::json& j) {
  try {
    const int dim = j.at("dim").get<int>();
    auto atoms = j.at("atoms").get<std::vector<Vector>>();
    auto weights = j.at("weights").get<Vector>();
    for (const Vector& a : atoms)
      if (int(a.size()) != dim)
        throw DomainError("atom dimension does not match 'dim'");
    return FiniteDistribution(atoms, weights);
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(std::string("bad distribution JSON: ") + e.what());
  }
}

}  // namespace

FiniteDistribution load_distribution(const std::string& path) {
  return distribution_from_json(read_json_file(path));
}

FiniteDistribution parse_distribution(const std::string& json_text) {
  try {
    return distribution_from_json(nlohmann::json::parse(json_text));
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(std::string("bad distribution JSON: ") + e.what());
  }
}

std::string distribution_to_json(const FiniteDistribution& p) {
  nlohmann::json j;
  j["dim"] = p.dim();
  j["atoms"] = p.atoms();
  j["weights"] = p.weights();
  j["mean"] = p.mean();
  return j.dump(2);
}

Scenario load_scenario(const std::string& path) {
  nlohmann::json j = read_json_file(path);
  try {
    Scenario s{distribution_from_json(j.at("null")), std::nullopt,
               std::nullopt,
               j.at("alpha").get<double>(),
               j.at("n_max").get<int>(),
               j.at("replicates").get<int>(),
               j.at("seed").get<std::uint64_t>()};
    if (j.contains("alt") && !j["alt"].is_null())
      s.alt_dist = distribution_from_json(j["alt"]);
    if (j.contains("change_at") && !j["change_at"].is_null())
      s.change_at = j["change_at"].get<int>();
    if (s.alpha <= 0.0 || s.alpha >= 1.0)
      throw DomainError("scenario alpha must lie in (0,1)");
    if (s.n_max < 2 || s.replicates < 1)
      throw DomainError("scenario needs n_max >= 2 and replicates >= 1");
    if (s.change_at && !s.alt_dist)
      throw DomainError("scenario sets change_at without alt");
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(std::string("bad scenario JSON: ") + e.what());
  }
}

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

}  // namespace

std::mt19937_64 replicate_rng(std::uint64_t seed, std::uint64_t replicate) {
  return std::mt19937_64(splitmix64(splitmix64(seed) ^ replicate));
}

Vector sample_atom(const FiniteDistribution& p, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double u = unif(rng);
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    acc += p.weights()[i];
    if (u <= acc) return p.atoms()[i];
  }
  return p.atoms().back();
}

Vector parse_csv_vector(const std::string& text) {
  Vector out;
  std::stringstream ss(text);
  std::string token;
  while (std::getline(ss, token, ',')) {
    try {
      std::size_t pos = 0;
      double v = std::stod(token, &pos);
      while (pos < token.size() && std::isspace(unsigned(token[pos]))) ++pos;
      if (pos != token.size()) throw std::invalid_argument(token);
      out.push_back(v);
    } catch (const std::exception&) {
      throw DomainError("cannot parse '" + token + "' as a real number");
    }
  }
  if (out.empty()) throw DomainError("empty vector literal");
  return out;
}

}  // namespace divmin
