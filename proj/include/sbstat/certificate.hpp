#pragma once
// Certified descriptions: a decodable payload plus declared parameters.
// The payload length is the measured description length; parameters are
// charged separately as the logarithmic side terms and are listed in full
// so every certificate can be re-decoded and re-checked.

#include <map>
#include <sstream>
#include <string>

#include "bits.hpp"

namespace sbstat {

struct CertifiedDescription {
  std::string decoder;                         // which decoder reconstructs the object
  BitVec payload;                              // measured description bits
  std::map<std::string, std::string> params;   // declared (n, m, i, j, k, mode, ...)

  int length() const { return static_cast<int>(payload.size()); }

  void set(const std::string& key, const std::string& value) { params[key] = value; }
  void set(const std::string& key, int64_t value) { params[key] = std::to_string(value); }

  std::string param(const std::string& key) const {
    auto it = params.find(key);
    return it == params.end() ? std::string() : it->second;
  }

  int64_t param_int(const std::string& key) const {
    auto it = params.find(key);
    if (it == params.end()) throw std::out_of_range("certificate param missing: " + key);
    return std::stoll(it->second);
  }

  bool has_param(const std::string& key) const { return params.count(key) > 0; }

  std::string to_text() const {
    std::ostringstream out;
    out << "decoder=" << decoder << " payload=" << payload.to_compact();
    for (const auto& [k, v] : params) out << " " << k << "=" << v;
    return out.str();
  }
};

}  // namespace sbstat
