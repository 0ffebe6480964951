#pragma once

#include <fstream>
#include <map>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "vdfp/params.hpp"

namespace vdfp {

// Self-describing parameter container: every array carries its name and
// shape, grouped by store, plus free-form string metadata.
inline void save_snapshot(const std::string& path,
                          const std::map<std::string, const ParamStore*>& stores,
                          const std::map<std::string, std::string>& meta) {
  nlohmann::json j;
  j["format"] = "vdfp-params-v1";
  for (const auto& [k, v] : meta) j["meta"][k] = v;
  for (const auto& [store_name, store] : stores) {
    nlohmann::json js;
    for (const auto& name : store->order) {
      const Array& a = store->at(name);
      js[name] = {{"shape", a.shape}, {"data", a.data}};
    }
    j["stores"][store_name] = std::move(js);
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write snapshot '" + path + "'");
  out << j.dump();
}

struct Snapshot {
  std::map<std::string, std::string> meta;
  std::map<std::string, ParamStore> stores;
};

inline Snapshot load_snapshot(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open snapshot '" + path + "'");
  nlohmann::json j;
  in >> j;
  if (j.value("format", "") != "vdfp-params-v1")
    throw std::runtime_error("snapshot '" + path + "' has unknown format");
  Snapshot snap;
  if (j.contains("meta"))
    for (auto& [k, v] : j["meta"].items()) snap.meta[k] = v.get<std::string>();
  for (auto& [store_name, js] : j["stores"].items()) {
    ParamStore store;
    for (auto& [name, entry] : js.items())
      store.add(name, Array(entry["shape"].get<std::vector<int>>(),
                            entry["data"].get<std::vector<double>>()));
    snap.stores.emplace(store_name, std::move(store));
  }
  return snap;
}

}  // namespace vdfp
