#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "linkstate/error.hpp"
#include "linkstate/state_node.hpp"

namespace linkstate::qkeys {

// Interned (keyType, localName) record identifier. Copies are cheap; the
// strings live in the KeyManager that issued the key.
class QualifiedKey {
 public:
  std::string_view key_type() const noexcept { return *key_type_; }
  std::string_view local_name() const noexcept { return *local_name_; }
  std::uint64_t id() const noexcept { return id_; }

  friend bool operator==(const QualifiedKey& a, const QualifiedKey& b) noexcept { return a.id_ == b.id_; }

 private:
  friend class KeyManager;
  QualifiedKey(const std::string* type, const std::string* name, std::uint64_t id)
      : key_type_(type), local_name_(name), id_(id) {}

  const std::string* key_type_;
  const std::string* local_name_;
  std::uint64_t id_;
};

// Thread-safe interning table. Equal pairs always map to the same id; ids
// start at 1 and are never reused.
class KeyManager {
 public:
  KeyManager() = default;
  KeyManager(const KeyManager&) = delete;
  KeyManager& operator=(const KeyManager&) = delete;

  // Throws EmptyComponent.
  QualifiedKey get(std::string_view key_type, std::string_view local_name);
  std::optional<QualifiedKey> find(std::string_view key_type, std::string_view local_name) const;
  std::size_t size() const;

 private:
  struct Record {
    std::string key_type;
    std::string local_name;
  };

  mutable std::mutex mutex_;
  std::deque<Record> records_;  // stable addresses
  std::map<std::pair<std::string, std::string>, std::uint64_t, std::less<>> index_;
};

// Values for one key type, keyed by intern id.
class KeyedColumn {
 public:
  KeyedColumn(std::string key_type, std::string title);

  // Throws KeyTypeMismatch. Returns false when the key already had a value
  // (which is replaced).
  bool set(const QualifiedKey& key, StateNode value);
  const StateNode* get(const QualifiedKey& key) const;

  const std::string& key_type() const noexcept { return key_type_; }
  const std::string& title() const noexcept { return title_; }
  std::size_t size() const noexcept { return values_.size(); }
  std::vector<QualifiedKey> keys() const;

 private:
  std::string key_type_;
  std::string title_;
  std::map<std::uint64_t, std::pair<QualifiedKey, StateNode>> values_;
};

struct JoinedRow {
  QualifiedKey key;
  std::vector<StateNode> values;  // one per input column, null when missing
};

struct JoinedTable {
  std::string key_type;
  std::vector<std::string> titles;
  std::vector<JoinedRow> rows;  // sorted by local name

  // Header `key,<title>...`; missing values are empty fields.
  std::string to_csv() const;
};

// Union of all keys, values aligned by key. Throws KeyTypeMismatch when the
// columns disagree on key type, ValueError on an empty input.
JoinedTable join_columns(const std::vector<const KeyedColumn*>& columns);

struct CsvColumn {
  KeyedColumn column;
  Diagnostics diagnostics;  // duplicate keys, short rows, empty keys
};

// RFC-4180 subset: comma separator, optional double-quoted fields with ""
// escapes, LF or CRLF line ends, header row first. Values load as text.
// Throws MissingColumn, ParseError.
CsvColumn parse_csv_column(KeyManager& keys, std::string_view text, const std::string& key_column,
                           const std::string& value_column, const std::string& key_type);
// Also throws FileNotFound.
CsvColumn load_csv_column(KeyManager& keys, const std::string& path, const std::string& key_column,
                          const std::string& value_column, const std::string& key_type);

// Splits CSV text into records. Throws ParseError on an unterminated quote.
std::vector<std::vector<std::string>> parse_csv(std::string_view text);
std::string csv_field(std::string_view value);

}  // namespace linkstate::qkeys
