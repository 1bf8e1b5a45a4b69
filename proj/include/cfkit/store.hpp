#pragma once

#include <any>
#include <map>
#include <string>
#include <utility>

namespace cfkit {

// String-keyed bag of intermediate pipeline outputs attached to a profile.
// A step writes its result under a well-known key and the next step reads
// it back. Not synchronized: the engine guarantees one writer per profile.
class Store {
 public:
  template <typename T>
  void put(const std::string& key, T payload) {
    entries_[key] = std::move(payload);
  }

  // Null when the key is unused or holds a different payload type.
  template <typename T>
  const T* get(const std::string& key) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) return nullptr;
    return std::any_cast<T>(&it->second);
  }

  bool contains(const std::string& key) const {
    return entries_.contains(key);
  }

  void erase(const std::string& key) { entries_.erase(key); }
  void clear() { entries_.clear(); }
  std::size_t size() const { return entries_.size(); }

 private:
  std::map<std::string, std::any> entries_;
};

}  // namespace cfkit
