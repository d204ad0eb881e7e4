#include "linkstate/qkeys.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "linkstate/state_json.hpp"

namespace linkstate::qkeys {

QualifiedKey KeyManager::get(std::string_view key_type, std::string_view local_name) {
  if (key_type.empty() || local_name.empty()) {
    throw Error(Errc::kEmptyComponent, "qualified keys need a non-empty key type and local name");
  }
  std::lock_guard lock(mutex_);
  auto it = index_.find(std::pair(std::string(key_type), std::string(local_name)));
  if (it == index_.end()) {
    records_.push_back({std::string(key_type), std::string(local_name)});
    it = index_.emplace(std::pair(records_.back().key_type, records_.back().local_name), records_.size()).first;
  }
  const Record& r = records_[it->second - 1];
  return QualifiedKey(&r.key_type, &r.local_name, it->second);
}

std::optional<QualifiedKey> KeyManager::find(std::string_view key_type, std::string_view local_name) const {
  std::lock_guard lock(mutex_);
  auto it = index_.find(std::pair(std::string(key_type), std::string(local_name)));
  if (it == index_.end()) return std::nullopt;
  const Record& r = records_[it->second - 1];
  return QualifiedKey(&r.key_type, &r.local_name, it->second);
}

std::size_t KeyManager::size() const {
  std::lock_guard lock(mutex_);
  return records_.size();
}

KeyedColumn::KeyedColumn(std::string key_type, std::string title)
    : key_type_(std::move(key_type)), title_(std::move(title)) {
  if (key_type_.empty()) throw Error(Errc::kEmptyComponent, "column key type must not be empty");
}

bool KeyedColumn::set(const QualifiedKey& key, StateNode value) {
  if (key.key_type() != key_type_) {
    throw Error(Errc::kKeyTypeMismatch, "key of type '" + std::string(key.key_type()) + "' in a '" + key_type_ +
                                            "' column");
  }
  auto [it, inserted] = values_.insert_or_assign(key.id(), std::pair(key, std::move(value)));
  return inserted;
}

const StateNode* KeyedColumn::get(const QualifiedKey& key) const {
  auto it = values_.find(key.id());
  return it == values_.end() ? nullptr : &it->second.second;
}

std::vector<QualifiedKey> KeyedColumn::keys() const {
  std::vector<QualifiedKey> out;
  out.reserve(values_.size());
  for (const auto& [_, kv] : values_) out.push_back(kv.first);
  return out;
}

JoinedTable join_columns(const std::vector<const KeyedColumn*>& columns) {
  if (columns.empty()) throw Error(Errc::kValue, "join needs at least one column");
  JoinedTable table;
  table.key_type = columns.front()->key_type();
  for (const auto* c : columns) {
    if (c->key_type() != table.key_type) {
      throw Error(Errc::kKeyTypeMismatch, "cannot join '" + c->key_type() + "' column '" + c->title() + "' with '" +
                                              table.key_type + "' keys");
    }
    table.titles.push_back(c->title());
  }
  std::map<std::uint64_t, QualifiedKey> all;
  for (const auto* c : columns) {
    for (const auto& k : c->keys()) all.emplace(k.id(), k);
  }
  for (const auto& [_, key] : all) {
    JoinedRow row{key, {}};
    for (const auto* c : columns) {
      const StateNode* v = c->get(key);
      row.values.push_back(v ? *v : StateNode());
    }
    table.rows.push_back(std::move(row));
  }
  std::sort(table.rows.begin(), table.rows.end(), [](const JoinedRow& a, const JoinedRow& b) {
    return std::pair(a.key.local_name(), a.key.id()) < std::pair(b.key.local_name(), b.key.id());
  });
  return table;
}

std::string csv_field(std::string_view value) {
  if (value.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(value);
  std::string out = "\"";
  for (char c : value) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

namespace {

std::string cell_text(const StateNode& v) {
  if (v.is_null()) return {};
  if (v.is_text()) return v.as_text();
  return encode(v);
}

}  // namespace

std::string JoinedTable::to_csv() const {
  std::string out = "key";
  for (const auto& t : titles) out += "," + csv_field(t);
  out += "\n";
  for (const auto& row : rows) {
    out += csv_field(row.key.local_name());
    for (const auto& v : row.values) out += "," + csv_field(cell_text(v));
    out += "\n";
  }
  return out;
}

std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
  if (text.starts_with("\xEF\xBB\xBF")) text.remove_prefix(3);
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool quoted = false;
  bool field_started = false;
  std::size_t line = 1;

  auto end_field = [&] {
    record.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    // A blank line is no record at all.
    if (!(record.size() == 1 && record[0].empty())) records.push_back(std::move(record));
    record.clear();
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        if (c == '\n') ++line;
        field += c;
      }
      continue;
    }
    switch (c) {
      case '"':
        if (field_started || !field.empty()) {
          throw Error(Errc::kParse, "line " + std::to_string(line) + ": quote inside an unquoted field");
        }
        quoted = true;
        field_started = true;
        break;
      case ',': end_field(); break;
      case '\r':
        if (i + 1 < text.size() && text[i + 1] == '\n') ++i;
        end_record();
        ++line;
        break;
      case '\n':
        end_record();
        ++line;
        break;
      default: field += c; break;
    }
  }
  if (quoted) throw Error(Errc::kParse, "line " + std::to_string(line) + ": unterminated quoted field");
  if (field_started || !field.empty() || !record.empty()) end_record();
  return records;
}

CsvColumn parse_csv_column(KeyManager& keys, std::string_view text, const std::string& key_column,
                           const std::string& value_column, const std::string& key_type) {
  const auto records = parse_csv(text);
  if (records.empty()) throw Error(Errc::kMissingColumn, "CSV has no header row");
  const auto& header = records.front();
  auto index_of = [&](const std::string& name) {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw Error(Errc::kMissingColumn, "CSV header has no column '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t key_index = index_of(key_column);
  const std::size_t value_index = index_of(value_column);

  CsvColumn out{KeyedColumn(key_type, value_column), {}};
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    const std::string where = "row " + std::to_string(r + 1);
    if (rec.size() <= std::max(key_index, value_index)) {
      out.diagnostics.push_back({Errc::kMissingColumn, where, "row has too few fields; skipped"});
      continue;
    }
    if (rec[key_index].empty()) {
      out.diagnostics.push_back({Errc::kEmptyComponent, where, "empty key; skipped"});
      continue;
    }
    const auto key = keys.get(key_type, rec[key_index]);
    if (!out.column.set(key, StateNode(rec[value_index]))) {
      out.diagnostics.push_back({Errc::kDuplicateName, where, "duplicate key '" + rec[key_index] + "'; last row wins"});
    }
  }
  return out;
}

CsvColumn load_csv_column(KeyManager& keys, const std::string& path, const std::string& key_column,
                          const std::string& value_column, const std::string& key_type) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::kFileNotFound, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_csv_column(keys, buf.str(), key_column, value_column, key_type);
}

}  // namespace linkstate::qkeys
