#include "softdd/features.hpp"

#include <algorithm>
#include <cctype>

namespace softdd {

namespace {

bool is_year_like(std::string_view t) {
  if (t.size() != 4) return false;
  for (char c : t)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return t[0] == '1' || t[0] == '2';
}

bool is_page_range_like(std::string_view t) {
  std::size_t dash = t.find('-');
  if (dash == std::string_view::npos || dash == 0) return false;
  std::size_t after = dash;
  while (after < t.size() && t[after] == '-') ++after;
  if (after >= t.size()) return false;
  for (std::size_t i = 0; i < dash; ++i)
    if (!std::isdigit(static_cast<unsigned char>(t[i]))) return false;
  for (std::size_t i = after; i < t.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(t[i]))) return false;
  return true;
}

bool is_initial_like(std::string_view t) {
  return t.size() == 2 && std::isupper(static_cast<unsigned char>(t[0])) && t[1] == '.';
}

std::string shape_of(std::string_view t) {
  std::string shape;
  shape.reserve(t.size());
  for (char c : t) {
    unsigned char u = static_cast<unsigned char>(c);
    if (std::isupper(u))
      shape += 'A';
    else if (std::islower(u))
      shape += 'a';
    else if (std::isdigit(u))
      shape += 'd';
    else
      shape += c;
  }
  return shape;
}

}  // namespace

std::vector<std::string> token_feature_names(std::string_view token, std::size_t position,
                                             std::size_t length) {
  std::vector<std::string> names;
  names.reserve(16);
  std::string tok(token);
  std::string lower = tok;
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });

  names.push_back("bias");
  names.push_back("w=" + tok);
  names.push_back("lw=" + lower);
  names.push_back("sh=" + shape_of(token));
  for (std::size_t n = 1; n <= 4 && n <= token.size(); ++n) {
    names.push_back("p" + std::to_string(n) + "=" + tok.substr(0, n));
    names.push_back("s" + std::to_string(n) + "=" + tok.substr(tok.size() - n));
  }
  std::size_t bin = length > 0 ? position * 8 / length : 0;
  names.push_back("pos=" + std::to_string(bin));
  if (is_year_like(token)) names.push_back("rx=year");
  if (is_page_range_like(token)) names.push_back("rx=pages");
  if (is_initial_like(token)) names.push_back("rx=initial");
  return names;
}

std::vector<FeatureVector> featurize(const std::vector<std::string>& tokens, FeatureDict& dict,
                                     bool grow) {
  if (!grow) return featurize(tokens, static_cast<const FeatureDict&>(dict));
  std::vector<FeatureVector> out;
  out.reserve(tokens.size());
  for (std::size_t k = 0; k < tokens.size(); ++k) {
    FeatureVector fv;
    for (const std::string& name : token_feature_names(tokens[k], k, tokens.size()))
      fv.push_back({dict.intern(name), 1.0});
    out.push_back(std::move(fv));
  }
  return out;
}

std::vector<FeatureVector> featurize(const std::vector<std::string>& tokens,
                                     const FeatureDict& dict) {
  std::vector<FeatureVector> out;
  out.reserve(tokens.size());
  for (std::size_t k = 0; k < tokens.size(); ++k) {
    FeatureVector fv;
    for (const std::string& name : token_feature_names(tokens[k], k, tokens.size()))
      if (auto id = dict.lookup(name)) fv.push_back({*id, 1.0});
    out.push_back(std::move(fv));
  }
  return out;
}

}  // namespace softdd
