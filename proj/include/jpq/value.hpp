#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace jpq {

/// The distinguished `empty` atom (JSON null).
struct Empty {
  bool operator==(const Empty&) const = default;
};

class Value;
using Array = std::vector<Value>;
using Member = std::pair<std::string, Value>;
using Object = std::vector<Member>;

/// A JHM fragment: an atom, an array, or an object whose keys are unique.
/// Object members keep document order.
class Value {
 public:
  using Storage = std::variant<Empty, bool, double, std::string, Array, Object>;

  Value() = default;
  Value(Empty) {}
  Value(bool b) : data_(b) {}
  Value(double d) : data_(d) {}
  Value(int i) : data_(static_cast<double>(i)) {}
  Value(std::string s) : data_(std::move(s)) {}
  Value(const char* s) : data_(std::string(s)) {}
  Value(Array a) : data_(std::move(a)) {}
  Value(Object o) : data_(std::move(o)) {}

  bool is_empty() const { return std::holds_alternative<Empty>(data_); }
  bool is_bool() const { return std::holds_alternative<bool>(data_); }
  bool is_number() const { return std::holds_alternative<double>(data_); }
  bool is_string() const { return std::holds_alternative<std::string>(data_); }
  bool is_array() const { return std::holds_alternative<Array>(data_); }
  bool is_object() const { return std::holds_alternative<Object>(data_); }
  bool is_atom() const { return !is_array() && !is_object(); }

  bool as_bool() const { return std::get<bool>(data_); }
  double as_number() const { return std::get<double>(data_); }
  const std::string& as_string() const { return std::get<std::string>(data_); }
  const Array& as_array() const { return std::get<Array>(data_); }
  const Object& as_object() const { return std::get<Object>(data_); }
  Array& as_array() { return std::get<Array>(data_); }
  Object& as_object() { return std::get<Object>(data_); }

  const Storage& storage() const { return data_; }

  /// Deep structural equality; numbers compare numerically.
  friend bool operator==(const Value& a, const Value& b) { return a.data_ == b.data_; }

 private:
  Storage data_;
};

/// Parses RFC 8259 JSON text. Throws SyntaxError (line/column) on malformed input
/// and Error(Data) on a duplicate key, naming the key and its object path.
Value parse_document(std::string_view text);

std::string serialize(const Value& v, bool pretty = false);

/// Member lookup; absent for non-objects and missing keys.
std::optional<Value> get_field(const Value& v, std::string_view key);

/// Returns the (key, value) pointer for a member or nullptr.
const Value* find_member(const Value& v, std::string_view key);

/// Named root documents backing `doc("name")`.
class DocRegistry {
 public:
  void add(std::string name, Value root);
  /// Reads and parses a JSON file; throws Error(Data) on I/O or parse failure.
  void load(std::string name, const std::string& path);
  /// Throws Error(Data) when the name is not registered.
  const Value& get(const std::string& name) const;
  bool contains(const std::string& name) const { return docs_.count(name) != 0; }

 private:
  std::map<std::string, Value> docs_;
};

}  // namespace jpq
