#include <openssl/evp.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>

#include "cli.hpp"
#include "sgfl/laplacian.hpp"

namespace sgfl::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::stringstream ss(s);
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

bool parse_double(const std::string& s, double& v) {
  // strtod accepts hex floats and "nan"; only plain decimals are wanted.
  if (s.empty() || s.find_first_not_of("0123456789+-.eE") != std::string::npos) return false;
  char* end = nullptr;
  v = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size() && std::isfinite(v);
}

bool parse_long(const std::string& s, long long& v) {
  const auto* first = s.data();
  const auto* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  return ec == std::errc() && ptr == last;
}

bool parse_u64(const std::string& s, std::uint64_t& v) {
  const auto* first = s.data();
  const auto* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  return ec == std::errc() && ptr == last && !s.empty();
}

bool parse_bool(const std::string& s, bool& v) {
  if (s == "true" || s == "1" || s == "yes") {
    v = true;
    return true;
  }
  if (s == "false" || s == "0" || s == "no") {
    v = false;
    return true;
  }
  return false;
}

enum class Type { Int, Real, Seed, Bool, Word, Path, IntList, RealList, WordList };

struct KeySpec {
  Type type = Type::Word;
  double lo = 0.0;
  double hi = 0.0;
  bool lo_open = false;
  std::vector<std::string> options;
};

KeySpec num(Type t, double lo = 0, double hi = 0, bool lo_open = false) {
  KeySpec k;
  k.type = t;
  k.lo = lo;
  k.hi = hi;
  k.lo_open = lo_open;
  return k;
}

KeySpec choice(Type t, std::vector<std::string> options) {
  KeySpec k;
  k.type = t;
  k.options = std::move(options);
  return k;
}

const std::vector<std::string> kPresets = {"fig1_variance_grid", "table1_bounds", "fig2_denoising",
                                           "fig3to5_sparsify", "custom"};

const std::map<std::string, KeySpec>& key_table() {
  static const std::map<std::string, KeySpec> table = {
      {"preset", choice(Type::Word, kPresets)},
      {"n_nodes", num(Type::Int, 2, 2000)},
      {"radius", num(Type::Real, 0, 1, true)},
      {"graph_seed", num(Type::Seed)},
      {"graph_file", num(Type::Path)},
      {"seed", num(Type::Seed)},
      {"n_runs", num(Type::Int, 2, 1e7)},
      {"p_grid", num(Type::RealList, 0, 1, true)},
      {"sigma_grid", num(Type::RealList, 0, 1e6)},
      {"K_list", num(Type::IntList, 0, 50)},
      {"filters", choice(Type::WordList, {"fir", "arma", "tikhonov"})},
      {"w", num(Type::Real, 0, 1e6, true)},
      {"lap_kind",
       choice(Type::Word, {"discrete", "normalized", "translated_discrete", "translated_normalized",
                           "scaled_translated_discrete"})},
      {"horizon", num(Type::Int, 0, 1e6)},
      {"pole_factor", num(Type::Real, 1, 100, true)},
      {"corrected", num(Type::Bool)},
      {"coeffs_file", num(Type::Path)},
      {"algorithms", choice(Type::WordList, {"la", "dad", "jdmia", "jdmioa", "jdmoa"})},
      {"inner_iters", num(Type::Int, 0, 1e6)},
      {"exp_rate", num(Type::Real, 0, 1e3)},
      {"output_dir", num(Type::Path)},
  };
  return table;
}

using Defaults = std::map<std::string, std::string>;

Defaults common_defaults() {
  return {
      {"n_nodes", "20"},
      {"radius", "0.3"},
      {"graph_seed", "1"},
      {"graph_file", ""},
      {"seed", "1"},
      {"n_runs", "2000"},
      {"p_grid", "0.25,0.5,0.75,1"},
      {"sigma_grid", "1e-6,1e-3,1e-1"},
      {"K_list", "1,3,5"},
      {"filters", "fir,arma"},
      {"w", "0.5"},
      {"lap_kind", "translated_normalized"},
      {"horizon", "0"},
      {"pole_factor", "1.2"},
      {"corrected", "false"},
      {"coeffs_file", ""},
      {"algorithms", "la,dad,jdmia,jdmioa,jdmoa"},
      {"inner_iters", "100"},
      {"exp_rate", "25"},
      {"output_dir", "out"},
  };
}

Defaults preset_defaults(const std::string& preset) {
  Defaults d = common_defaults();
  d["preset"] = preset;
  if (preset == "table1_bounds") {
    d["p_grid"] = "0.5";
  } else if (preset == "fig2_denoising") {
    d["n_nodes"] = "50";
    d["radius"] = "0.2";
    d["n_runs"] = "500";
    d["sigma_grid"] = "1";
    d["horizon"] = "200";
  } else if (preset == "fig3to5_sparsify") {
    d["n_nodes"] = "50";
    d["radius"] = "0.2";
    d["n_runs"] = "500";
    d["K_list"] = "1,3,5,7";
  }
  return d;
}

void check_number(const std::string& key, const KeySpec& spec, double v) {
  const bool low_ok = spec.lo_open ? v > spec.lo : v >= spec.lo;
  if (!low_ok || v > spec.hi) {
    std::ostringstream os;
    os << "value of '" << key << "' out of range " << (spec.lo_open ? "(" : "[") << spec.lo << ", "
       << spec.hi << "]";
    throw ConfigError(os.str());
  }
}

void check_value(const std::string& key, const std::string& value) {
  const KeySpec& spec = key_table().at(key);
  auto bad = [&](const char* what) {
    throw ConfigError("invalid value '" + value + "' for key '" + key + "': expected " + what);
  };
  auto check_word = [&](const std::string& w) {
    if (std::find(spec.options.begin(), spec.options.end(), w) == spec.options.end()) {
      std::string opts;
      for (const auto& o : spec.options) opts += (opts.empty() ? "" : ", ") + o;
      throw ConfigError("invalid value '" + w + "' for key '" + key + "': expected one of " + opts);
    }
  };
  switch (spec.type) {
    case Type::Int: {
      long long v = 0;
      if (!parse_long(value, v)) bad("an integer");
      check_number(key, spec, static_cast<double>(v));
      break;
    }
    case Type::Real: {
      double v = 0;
      if (!parse_double(value, v)) bad("a number");
      check_number(key, spec, v);
      break;
    }
    case Type::Seed: {
      std::uint64_t v = 0;
      if (!parse_u64(value, v)) bad("an unsigned 64-bit integer");
      break;
    }
    case Type::Bool: {
      bool v = false;
      if (!parse_bool(value, v)) bad("true or false");
      break;
    }
    case Type::Word: check_word(value); break;
    case Type::Path: break;
    case Type::IntList: {
      const auto items = split_list(value);
      if (items.empty()) bad("a non-empty comma-separated list of integers");
      for (const auto& it : items) {
        long long v = 0;
        if (!parse_long(it, v)) bad("a comma-separated list of integers");
        check_number(key, spec, static_cast<double>(v));
      }
      break;
    }
    case Type::RealList: {
      const auto items = split_list(value);
      if (items.empty()) bad("a non-empty comma-separated list of numbers");
      for (const auto& it : items) {
        double v = 0;
        if (!parse_double(it, v)) bad("a comma-separated list of numbers");
        check_number(key, spec, v);
      }
      break;
    }
    case Type::WordList: {
      const auto items = split_list(value);
      if (items.empty()) bad("a non-empty comma-separated list");
      for (const auto& it : items) check_word(it);
      break;
    }
  }
}

}  // namespace

std::vector<std::pair<std::string, std::string>> parse_key_values(const std::string& text) {
  std::vector<std::pair<std::string, std::string>> out;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
    std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError("line " + std::to_string(line_no) + ": empty key");
    out.emplace_back(std::move(key), trim(line.substr(eq + 1)));
  }
  return out;
}

std::vector<std::string> known_keys() {
  std::vector<std::string> keys;
  for (const auto& [k, spec] : key_table()) keys.push_back(k);
  return keys;
}

ExperimentConfig resolve_config(const std::vector<std::pair<std::string, std::string>>& overrides,
                                std::optional<std::string> seed_fallback) {
  std::string preset;
  bool seed_given = false;
  for (const auto& [k, v] : overrides) {
    if (!key_table().count(k)) throw ConfigError("unknown key '" + k + "'");
    if (k == "preset") preset = v;
    if (k == "seed") seed_given = true;
  }
  if (preset.empty()) throw ConfigError("missing key 'preset'");
  check_value("preset", preset);

  ExperimentConfig cfg;
  cfg.values = preset_defaults(preset);
  if (!seed_given && seed_fallback) cfg.values["seed"] = *seed_fallback;
  for (const auto& [k, v] : overrides) cfg.values[k] = v;
  for (const auto& [k, v] : cfg.values) check_value(k, v);
  return cfg;
}

const std::string& ExperimentConfig::str(const std::string& key) const {
  auto it = values.find(key);
  if (it == values.end()) throw ConfigError("unknown key '" + key + "'");
  return it->second;
}

int ExperimentConfig::integer(const std::string& key) const {
  long long v = 0;
  if (!parse_long(str(key), v)) throw ConfigError("key '" + key + "' is not an integer");
  return static_cast<int>(v);
}

double ExperimentConfig::real(const std::string& key) const {
  double v = 0;
  if (!parse_double(str(key), v)) throw ConfigError("key '" + key + "' is not a number");
  return v;
}

bool ExperimentConfig::boolean(const std::string& key) const {
  bool v = false;
  if (!parse_bool(str(key), v)) throw ConfigError("key '" + key + "' is not a boolean");
  return v;
}

std::uint64_t ExperimentConfig::seed() const {
  std::uint64_t v = 0;
  if (!parse_u64(str("seed"), v)) throw ConfigError("key 'seed' is not an unsigned integer");
  return v;
}

std::vector<double> ExperimentConfig::reals(const std::string& key) const {
  std::vector<double> out;
  for (const auto& it : split_list(str(key))) {
    double v = 0;
    parse_double(it, v);
    out.push_back(v);
  }
  return out;
}

std::vector<int> ExperimentConfig::integers(const std::string& key) const {
  std::vector<int> out;
  for (const auto& it : split_list(str(key))) {
    long long v = 0;
    parse_long(it, v);
    out.push_back(static_cast<int>(v));
  }
  return out;
}

std::vector<std::string> ExperimentConfig::words(const std::string& key) const {
  return split_list(str(key));
}

std::vector<std::string> ExperimentConfig::lines() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : values) out.push_back(k + " = " + v);
  return out;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_line(const std::vector<std::string>& fields) {
  std::string line;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) line += ',';
    const std::string& f = fields[i];
    if (f.find_first_of(",\"\r\n") == std::string::npos) {
      line += f;
      continue;
    }
    line += '"';
    for (char ch : f) {
      if (ch == '"') line += '"';
      line += ch;
    }
    line += '"';
  }
  line += '\n';
  return line;
}

std::string git_blob_sha1(const std::string& content) {
  const std::string header = "blob " + std::to_string(content.size()) + std::string(1, '\0');
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (!ctx) throw Error("cannot allocate digest context");
  const bool ok = EVP_DigestInit_ex(ctx, EVP_sha1(), nullptr) == 1 &&
                  EVP_DigestUpdate(ctx, header.data(), header.size()) == 1 &&
                  EVP_DigestUpdate(ctx, content.data(), content.size()) == 1 &&
                  EVP_DigestFinal_ex(ctx, md, &len) == 1;
  EVP_MD_CTX_free(ctx);
  if (!ok) throw Error("SHA-1 digest failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

}  // namespace sgfl::cli
