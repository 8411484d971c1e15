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

#include "kgpl/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <unordered_map>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "kgpl/util.hpp"

namespace kgpl {

namespace {

constexpr const char* kFormat = "kgpl-dataset-1";

const char* const kDataFiles[] = {"interactions.tsv", "train.tsv",    "valid.tsv", "test.tsv",
                                  "valid_neg.tsv",    "test_neg.tsv", "kg.txt"};

// Numeric strings sort numerically; anything else lexicographically after.
bool raw_id_less(const std::string& a, const std::string& b) {
  std::uint64_t x, y;
  const bool na = parse_u64(a, x), nb = parse_u64(b, y);
  if (na && nb) return x < y;
  if (na != nb) return na;
  return a < b;
}

std::string unquote(std::string_view s) {
  s = trim(s);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return std::string(s);
}

struct RawPair {
  std::string user, item;
};

std::vector<RawPair> read_raw_pairs(DatasetKind kind, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open raw dataset " + path.string());
  std::vector<RawPair> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    std::vector<std::string> f;
    switch (kind) {
      case DatasetKind::kMovieLens1M: {
        std::string_view rest = line;
        for (std::size_t pos; (pos = rest.find("::")) != std::string_view::npos;) {
          f.emplace_back(rest.substr(0, pos));
          rest = rest.substr(pos + 2);
        }
        f.emplace_back(rest);
        if (f.size() < 3) throw ParseError(path.string(), lineno, "expected user::item::rating");
        break;
      }
      case DatasetKind::kLastFm: {
        if (lineno == 1 && line.find("userID") != std::string::npos) continue;
        for (auto v : split_fields(line)) f.emplace_back(v);
        if (f.size() < 2) throw ParseError(path.string(), lineno, "expected user artist weight");
        break;
      }
      case DatasetKind::kBookCrossing: {
        if (lineno == 1 && line.find("User-ID") != std::string::npos) continue;
        for (const auto& v : split_on(line, ';')) f.push_back(unquote(v));
        if (f.size() < 3) throw ParseError(path.string(), lineno, "expected user;isbn;rating");
        break;
      }
      case DatasetKind::kGenericTsv:
        throw UsageError("generic-tsv is read by load_interactions");
    }
    if (f[0].empty() || f[1].empty()) throw ParseError(path.string(), lineno, "empty id");
    out.push_back({f[0], f[1]});
  }
  return out;
}

std::unordered_map<std::string, ItemId> load_item_map(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open item map " + path.string());
  std::unordered_map<std::string, ItemId> map;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto f = split_fields(line);
    std::uint64_t id;
    if (f.size() != 2 || !parse_u64(f[1], id)) {
      throw ParseError(path.string(), lineno, "expected 'raw_id item_id'");
    }
    map.emplace(std::string(f[0]), static_cast<ItemId>(id));
  }
  return map;
}

std::unordered_map<std::string, std::uint32_t> dense_ids(std::vector<std::string> keys) {
  std::sort(keys.begin(), keys.end(), raw_id_less);
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
  std::unordered_map<std::string, std::uint32_t> ids;
  for (std::size_t k = 0; k < keys.size(); ++k) ids.emplace(keys[k], static_cast<std::uint32_t>(k));
  return ids;
}

std::string timestamp() {
  std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) {
    std::uint64_t v;
    if (parse_u64(epoch, v)) t = static_cast<std::time_t>(v);
  }
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::size_t total(const std::vector<ItemSet>& sets) {
  std::size_t n = 0;
  for (const auto& s : sets) n += s.size();
  return n;
}

}  // namespace

DatasetKind parse_dataset_kind(const std::string& s) {
  if (s == "generic-tsv") return DatasetKind::kGenericTsv;
  if (s == "movielens1m") return DatasetKind::kMovieLens1M;
  if (s == "lastfm") return DatasetKind::kLastFm;
  if (s == "bookcrossing") return DatasetKind::kBookCrossing;
  throw UsageError("unknown dataset kind '" + s +
                   "' (movielens1m|lastfm|bookcrossing|generic-tsv)");
}

const char* dataset_kind_name(DatasetKind kind) {
  switch (kind) {
    case DatasetKind::kGenericTsv: return "generic-tsv";
    case DatasetKind::kMovieLens1M: return "movielens1m";
    case DatasetKind::kLastFm: return "lastfm";
    case DatasetKind::kBookCrossing: return "bookcrossing";
  }
  return "?";
}

RawInteractions convert_raw(DatasetKind kind, const std::filesystem::path& raw,
                            const std::filesystem::path& item_map) {
  if (kind == DatasetKind::kGenericTsv) {
    RawInteractions r = load_interactions(raw);
    if (item_map.empty()) return r;
    // Raw item ids are the map's keys.
    const auto map = load_item_map(item_map);
    std::vector<Interaction> pairs;
    for (const auto& [u, i] : r.pairs) {
      auto it = map.find(std::to_string(i));
      if (it != map.end()) pairs.emplace_back(u, it->second);
    }
    return make_raw(std::move(pairs));
  }

  const auto rows = read_raw_pairs(kind, raw);
  if (rows.empty()) throw DataError(raw.string() + " has no interactions");
  std::unordered_map<std::string, ItemId> items;
  if (!item_map.empty()) {
    items = load_item_map(item_map);
  } else {
    std::vector<std::string> keys;
    for (const auto& r : rows) keys.push_back(r.item);
    items = dense_ids(std::move(keys));
  }
  std::vector<std::string> user_keys;
  std::size_t dropped = 0;
  for (const auto& r : rows) {
    if (items.count(r.item)) user_keys.push_back(r.user);
    else ++dropped;
  }
  if (dropped) spdlog::info("dropped {} interactions with unmapped items", dropped);
  const auto users = dense_ids(std::move(user_keys));
  std::vector<Interaction> pairs;
  for (const auto& r : rows) {
    auto it = items.find(r.item);
    if (it == items.end()) continue;
    pairs.emplace_back(users.at(r.user), it->second);
  }
  if (pairs.empty()) throw DataError("no interaction survived item mapping");
  return make_raw(std::move(pairs));
}

DatasetStats Dataset::stats() const {
  DatasetStats s;
  s.users = data.num_users;
  s.items = data.num_items;
  s.interactions = raw.pairs.size();
  s.train = total(data.train_pos);
  s.valid = total(data.valid_pos);
  s.test = total(data.test_pos);
  s.valid_neg = total(data.valid_neg);
  s.test_neg = total(data.test_neg);
  s.entities = kg.num_entities();
  s.relations = kg.num_relations();
  s.triples = kg.triples().size();
  return s;
}

Dataset build_dataset(RawInteractions raw, KnowledgeGraph kg, std::uint64_t seed,
                      const SplitRatios& ratios) {
  Dataset ds;
  ds.seed = seed;
  if (kg.num_entities() < raw.num_items) {
    kg = KnowledgeGraph::from_triples(kg.triples(), raw.num_items, kg.num_relations());
  }
  ds.data = split_interactions(raw, ratios, seed);
  const std::size_t short_users = generate_eval_negatives(ds.data, seed);
  if (short_users) {
    spdlog::warn("{} (user, split) pairs have fewer unobserved items than positives", short_users);
  }
  ds.raw = std::move(raw);
  ds.kg = std::move(kg);
  return ds;
}

void write_dataset(const std::filesystem::path& dir, const Dataset& ds,
                   const std::map<std::string, std::string>& provenance) {
  std::filesystem::create_directories(dir);
  write_interactions(dir / "interactions.tsv", ds.raw);
  write_item_sets(dir / "train.tsv", ds.data.train_pos, 1);
  write_item_sets(dir / "valid.tsv", ds.data.valid_pos, 1);
  write_item_sets(dir / "test.tsv", ds.data.test_pos, 1);
  write_item_sets(dir / "valid_neg.tsv", ds.data.valid_neg, 0);
  write_item_sets(dir / "test_neg.tsv", ds.data.test_neg, 0);
  {
    std::ofstream out(dir / "kg.txt", std::ios::trunc);
    if (!out) throw DataError("cannot write " + (dir / "kg.txt").string());
    for (const auto& t : ds.kg.triples()) out << t.head << '\t' << t.relation << '\t' << t.tail << '\n';
  }

  const DatasetStats s = ds.stats();
  nlohmann::ordered_json j;
  j["format"] = kFormat;
  j["created"] = timestamp();
  j["seeds"] = {{"data_seed", ds.seed}};
  j["counts"] = {{"users", s.users},         {"items", s.items},        {"interactions", s.interactions},
                 {"train", s.train},         {"valid", s.valid},        {"test", s.test},
                 {"valid_neg", s.valid_neg}, {"test_neg", s.test_neg},  {"entities", s.entities},
                 {"relations", s.relations}, {"triples", s.triples}};
  nlohmann::ordered_json files;
  for (const char* f : kDataFiles) files[f] = file_hash(dir / f);
  j["files"] = files;
  if (!provenance.empty()) {
    nlohmann::ordered_json src;
    for (const auto& [k, v] : provenance) src[k] = v;
    j["source"] = src;
  }
  std::ofstream out(dir / "manifest.json", std::ios::trunc);
  if (!out) throw DataError("cannot write manifest in " + dir.string());
  out << j.dump(2) << '\n';
}

Dataset prepare_dataset(const PrepareOptions& o) {
  if (o.raw.empty()) throw UsageError("no raw interaction file given");
  if (o.kg.empty()) throw UsageError("no knowledge-graph file given");
  if (o.out_dir.empty()) throw UsageError("no output directory given");
  if (!std::filesystem::exists(o.raw)) throw DataError("missing raw file " + o.raw.string());
  if (!std::filesystem::exists(o.kg)) throw DataError("missing KG file " + o.kg.string());
  RawInteractions raw = convert_raw(o.kind, o.raw, o.item_map);
  KnowledgeGraph kg = load_kg(o.kg);
  Dataset ds = build_dataset(std::move(raw), std::move(kg), o.seed, o.ratios);
  std::map<std::string, std::string> prov{{"kind", dataset_kind_name(o.kind)},
                                          {"raw", o.raw.filename().string()},
                                          {"raw_hash", file_hash(o.raw)},
                                          {"kg", o.kg.filename().string()},
                                          {"kg_hash", file_hash(o.kg)}};
  if (!o.item_map.empty()) {
    prov["item_map"] = o.item_map.filename().string();
    prov["item_map_hash"] = file_hash(o.item_map);
  }
  write_dataset(o.out_dir, ds, prov);
  ds.dir = o.out_dir;
  return ds;
}

Dataset load_dataset(const std::filesystem::path& dir) {
  const auto manifest_path = dir / "manifest.json";
  std::ifstream in(manifest_path);
  if (!in) throw DataError("no manifest.json in " + dir.string() + " (run prepare first)");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(manifest_path.string() + ": " + e.what());
  }
  if (j.value("format", "") != kFormat) throw DataError(manifest_path.string() + ": unknown format");
  for (const char* f : kDataFiles) {
    if (!std::filesystem::exists(dir / f)) throw DataError("missing " + (dir / f).string());
    const std::string want = j["files"].value(f, "");
    if (!want.empty() && file_hash(dir / f) != want) {
      spdlog::warn("{} differs from the hash recorded in the manifest", (dir / f).string());
    }
  }

  Dataset ds;
  ds.dir = dir;
  ds.seed = j["seeds"].value("data_seed", std::uint64_t{0});
  const std::size_t nu = j["counts"].at("users").get<std::size_t>();
  const std::size_t ni = j["counts"].at("items").get<std::size_t>();

  ds.raw = load_interactions(dir / "interactions.tsv");
  ds.raw.num_users = nu;
  ds.raw.num_items = ni;
  auto& d = ds.data;
  d.num_users = nu;
  d.num_items = ni;
  d.train_pos = load_item_sets(dir / "train.tsv", nu, ni);
  d.valid_pos = load_item_sets(dir / "valid.tsv", nu, ni);
  d.test_pos = load_item_sets(dir / "test.tsv", nu, ni);
  d.valid_neg = load_item_sets(dir / "valid_neg.tsv", nu, ni);
  d.test_neg = load_item_sets(dir / "test_neg.tsv", nu, ni);
  d.recompute_item_freq();

  const KnowledgeGraph kg = load_kg(dir / "kg.txt");
  ds.kg = KnowledgeGraph::from_triples(kg.triples(), ni,
                                       j["counts"].value("relations", std::size_t{0}));
  return ds;
}

}  // namespace kgpl
