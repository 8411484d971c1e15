/* Copyright 2026 The KGPL Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "kgpl/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "kgpl/util.hpp"

namespace kgpl {

namespace {

const std::vector<std::string> kKeys = {
    "lr",           "batch_size",    "epochs",        "dropout",
    "a",            "b",             "h",             "layers",
    "dim",          "neighbor_size", "variant",       "uns",
    "data_seed",    "model_f_seed",  "model_g_seed",  "sampler_seed",
    "eval_every",   "patience",      "warmup_epochs", "resample_neighbors",
    "path_cap",     "pseudo_per_positive", "workers", "candidate_set"};

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end || !std::isfinite(out)) {
    throw UsageError("config key '" + key + "': '" + v + "' is not a number");
  }
  return out;
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  if (!parse_u64(v, out)) {
    throw UsageError("config key '" + key + "': '" + v + "' is not a non-negative integer");
  }
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw UsageError("config key '" + key + "': '" + v + "' is not a boolean");
}

}  // namespace

const char* variant_name(Variant v) {
  switch (v) {
    case Variant::kNoPl: return "nopl";
    case Variant::kRandSelf: return "rand_self";
    case Variant::kKaplSelf: return "kapl_self";
    case Variant::kRandCot: return "rand_cot";
    case Variant::kKaplCot: return "kapl_cot";
  }
  return "?";
}

Variant parse_variant(const std::string& s) {
  for (Variant v : {Variant::kNoPl, Variant::kRandSelf, Variant::kKaplSelf, Variant::kRandCot,
                    Variant::kKaplCot}) {
    if (s == variant_name(v)) return v;
  }
  throw UsageError("unknown variant '" + s +
                   "' (nopl|rand_self|kapl_self|rand_cot|kapl_cot)");
}

bool uses_pseudo_labels(Variant v) { return v != Variant::kNoPl; }
bool uses_cotraining(Variant v) { return v == Variant::kRandCot || v == Variant::kKaplCot; }
bool uses_kg_sampling(Variant v) { return v == Variant::kKaplSelf || v == Variant::kKaplCot; }

std::vector<std::string> config_keys() { return kKeys; }

void set_config_value(TrainConfig& c, const std::string& key, const std::string& raw) {
  const std::string v(trim(raw));
  if (key == "lr") c.lr = to_double(key, v);
  else if (key == "batch_size") c.batch_size = to_u64(key, v);
  else if (key == "epochs") c.epochs = to_u64(key, v);
  else if (key == "dropout") c.dropout = to_double(key, v);
  else if (key == "a") c.a = to_double(key, v);
  else if (key == "b") c.b = to_double(key, v);
  else if (key == "h") c.h = static_cast<unsigned>(to_u64(key, v));
  else if (key == "layers") c.layers = to_u64(key, v);
  else if (key == "dim") c.dim = to_u64(key, v);
  else if (key == "neighbor_size") c.neighbor_size = to_u64(key, v);
  else if (key == "variant") c.variant = parse_variant(v);
  else if (key == "uns") c.uns = to_bool(key, v);
  else if (key == "data_seed") c.data_seed = to_u64(key, v);
  else if (key == "model_f_seed") c.model_f_seed = to_u64(key, v);
  else if (key == "model_g_seed") c.model_g_seed = to_u64(key, v);
  else if (key == "sampler_seed") c.sampler_seed = to_u64(key, v);
  else if (key == "eval_every") c.eval_every = to_u64(key, v);
  else if (key == "patience") c.patience = to_u64(key, v);
  else if (key == "warmup_epochs") c.warmup_epochs = to_u64(key, v);
  else if (key == "resample_neighbors") c.resample_neighbors = to_bool(key, v);
  else if (key == "path_cap") c.path_cap = to_double(key, v);
  else if (key == "pseudo_per_positive") c.pseudo_per_positive = to_u64(key, v);
  else if (key == "workers") c.workers = to_u64(key, v);
  else if (key == "candidate_set") c.candidate_set = parse_candidate_set(v);
  else throw UsageError("unknown config key '" + key + "'");
}

void TrainConfig::validate() const {
  auto fail = [](const std::string& key, const std::string& what) {
    throw UsageError("config key '" + key + "': " + what);
  };
  if (!(lr > 0.0)) fail("lr", "must be > 0");
  if (batch_size == 0 || batch_size % 3 != 0) fail("batch_size", "must be a positive multiple of 3");
  if (epochs == 0) fail("epochs", "must be >= 1");
  if (!(dropout >= 0.0 && dropout < 1.0)) fail("dropout", "must lie in [0, 1)");
  if (h == 0) fail("h", "must be >= 1");
  if (layers == 0) fail("layers", "must be >= 1");
  if (dim == 0) fail("dim", "must be >= 1");
  if (neighbor_size == 0) fail("neighbor_size", "must be >= 1");
  if (!(path_cap > 0.0)) fail("path_cap", "must be > 0");
  if (pseudo_per_positive == 0) fail("pseudo_per_positive", "must be >= 1");
  if (workers == 0) fail("workers", "must be >= 1");
  if (patience == 0) fail("patience", "must be >= 1");
}

std::vector<std::pair<std::string, std::string>> TrainConfig::to_pairs() const {
  auto u = [](std::uint64_t v) { return std::to_string(v); };
  auto d = [](double v) { return format_double(v); };
  auto bl = [](bool v) { return std::string(v ? "true" : "false"); };
  return {{"lr", d(lr)},
          {"batch_size", u(batch_size)},
          {"epochs", u(epochs)},
          {"dropout", d(dropout)},
          {"a", d(a)},
          {"b", d(b)},
          {"h", u(h)},
          {"layers", u(layers)},
          {"dim", u(dim)},
          {"neighbor_size", u(neighbor_size)},
          {"variant", variant_name(variant)},
          {"uns", bl(uns)},
          {"data_seed", u(data_seed)},
          {"model_f_seed", u(model_f_seed)},
          {"model_g_seed", u(model_g_seed)},
          {"sampler_seed", u(sampler_seed)},
          {"eval_every", u(eval_every)},
          {"patience", u(patience)},
          {"warmup_epochs", u(warmup_epochs)},
          {"resample_neighbors", bl(resample_neighbors)},
          {"path_cap", d(path_cap)},
          {"pseudo_per_positive", u(pseudo_per_positive)},
          {"workers", u(workers)},
          {"candidate_set", candidate_set == CandidateSet::kFull ? "full" : "sampled"}};
}

std::string format_config(const TrainConfig& config) {
  std::string out;
  for (const auto& [k, v] : config.to_pairs()) out += k + " = " + v + "\n";
  return out;
}

void ConfigGrid::set(const std::string& key, const std::string& values) {
  TrainConfig probe;
  std::vector<std::string> list;
  for (const auto& part : split_on(values, ',')) {
    std::string v(trim(part));
    if (v.empty()) throw UsageError("config key '" + key + "': empty value");
    set_config_value(probe, key, v);  // validates key and value early
    list.push_back(std::move(v));
  }
  if (list.empty()) throw UsageError("config key '" + key + "': no value");
  values_[key] = std::move(list);
}

ConfigGrid ConfigGrid::parse(const std::string& text, const std::string& origin) {
  ConfigGrid grid;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    const auto body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError(origin, lineno, "expected 'key = value'");
    }
    const std::string key(trim(body.substr(0, eq)));
    const std::string value(trim(body.substr(eq + 1)));
    try {
      grid.set(key, value);
    } catch (const UsageError& e) {
      throw UsageError(origin + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return grid;
}

ConfigGrid ConfigGrid::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path.string());
}

std::size_t ConfigGrid::size() const {
  std::size_t n = 1;
  for (const auto& [k, v] : values_) n *= v.size();
  return n;
}

std::vector<TrainConfig> ConfigGrid::expand() const {
  std::vector<std::pair<std::string, const std::vector<std::string>*>> axes;
  for (const auto& key : kKeys) {
    auto it = values_.find(key);
    if (it != values_.end()) axes.emplace_back(key, &it->second);
  }
  std::vector<TrainConfig> out;
  std::vector<std::size_t> pos(axes.size(), 0);
  while (true) {
    TrainConfig c;
    for (std::size_t k = 0; k < axes.size(); ++k) set_config_value(c, axes[k].first, (*axes[k].second)[pos[k]]);
    c.validate();
    out.push_back(c);
    std::size_t k = axes.size();
    while (k > 0) {
      --k;
      if (++pos[k] < axes[k].second->size()) break;
      pos[k] = 0;
      if (k == 0) return out;
    }
    if (axes.empty()) return out;
  }
}

}  // namespace kgpl
