#include "jpq/value.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "jpq/error.hpp"
#include "json.hpp"

namespace jpq {

namespace {

std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t offset) {
  std::size_t line = 1, column = 1;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

// Builds a Value tree from SAX events. Containers live on a stack; each frame
// remembers its member keys so duplicates are caught with the object path.
class ValueBuilder {
 public:
  using json = nlohmann::json;

  bool null() { return put(Value(Empty{})); }
  bool boolean(bool b) { return put(Value(b)); }
  bool number_integer(json::number_integer_t n) { return put(Value(static_cast<double>(n))); }
  bool number_unsigned(json::number_unsigned_t n) { return put(Value(static_cast<double>(n))); }
  bool number_float(json::number_float_t d, const std::string&) { return put(Value(static_cast<double>(d))); }
  bool string(std::string& s) { return put(Value(std::move(s))); }
  bool binary(json::binary_t&) { return false; }

  bool start_object(std::size_t) {
    frames_.push_back(Frame{Value(Object{}), {}, {}, 0});
    return true;
  }
  bool key(std::string& k) {
    Frame& f = frames_.back();
    if (!f.keys.insert(k).second) {
      duplicate_ = "duplicate key \"" + k + "\" in object at " + path();
      return false;
    }
    f.pending_key = k;
    return true;
  }
  bool end_object() { return close(); }
  bool start_array(std::size_t) {
    frames_.push_back(Frame{Value(Array{}), {}, {}, 0});
    return true;
  }
  bool end_array() { return close(); }

  bool parse_error(std::size_t position, const std::string&, const nlohmann::detail::exception& ex) {
    error_position_ = position;
    error_message_ = ex.what();
    return false;
  }

  std::optional<Value> root;
  std::string duplicate_;
  std::size_t error_position_ = 0;
  std::string error_message_;

 private:
  struct Frame {
    Value container;
    std::set<std::string> keys;
    std::string pending_key;
    std::size_t index;
  };

  std::string path() const {
    std::string p = "$";
    for (std::size_t i = 0; i + 1 < frames_.size(); ++i) {
      const Frame& f = frames_[i];
      if (f.container.is_object()) {
        p += "." + f.pending_key;
      } else {
        p += "[" + std::to_string(f.container.as_array().size()) + "]";
      }
    }
    return p;
  }

  bool put(Value v) {
    if (frames_.empty()) {
      root = std::move(v);
      return true;
    }
    Frame& f = frames_.back();
    if (f.container.is_object()) {
      f.container.as_object().emplace_back(f.pending_key, std::move(v));
    } else {
      f.container.as_array().push_back(std::move(v));
    }
    return true;
  }

  bool close() {
    Value done = std::move(frames_.back().container);
    frames_.pop_back();
    return put(std::move(done));
  }

  std::vector<Frame> frames_;
};

nlohmann::ordered_json to_json(const Value& v) {
  using oj = nlohmann::ordered_json;
  if (v.is_empty()) return oj(nullptr);
  if (v.is_bool()) return oj(v.as_bool());
  if (v.is_number()) {
    double d = v.as_number();
    if (std::isfinite(d) && std::floor(d) == d && std::fabs(d) < 9007199254740992.0) {
      return oj(static_cast<std::int64_t>(d));
    }
    return oj(d);
  }
  if (v.is_string()) return oj(v.as_string());
  if (v.is_array()) {
    oj out = oj::array();
    for (const Value& e : v.as_array()) out.push_back(to_json(e));
    return out;
  }
  oj out = oj::object();
  for (const auto& [k, e] : v.as_object()) out[k] = to_json(e);
  return out;
}

}  // namespace

Value parse_document(std::string_view text) {
  ValueBuilder builder;
  bool ok = nlohmann::json::sax_parse(text.begin(), text.end(), &builder);
  if (!builder.duplicate_.empty()) throw Error(ErrorKind::Data, builder.duplicate_);
  if (!ok || !builder.root) {
    std::size_t pos = builder.error_position_ > 0 ? builder.error_position_ - 1 : 0;
    auto [line, column] = line_column(text, pos);
    std::string msg = builder.error_message_.empty() ? "invalid JSON" : builder.error_message_;
    throw SyntaxError(msg, line, column);
  }
  return std::move(*builder.root);
}

std::string serialize(const Value& v, bool pretty) {
  return to_json(v).dump(pretty ? 2 : -1);
}

const Value* find_member(const Value& v, std::string_view key) {
  if (!v.is_object()) return nullptr;
  for (const auto& [k, e] : v.as_object()) {
    if (k == key) return &e;
  }
  return nullptr;
}

std::optional<Value> get_field(const Value& v, std::string_view key) {
  if (const Value* m = find_member(v, key)) return *m;
  return std::nullopt;
}

void DocRegistry::add(std::string name, Value root) { docs_[std::move(name)] = std::move(root); }

void DocRegistry::load(std::string name, const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Data, "cannot open document file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    add(std::move(name), parse_document(buf.str()));
  } catch (const SyntaxError& e) {
    throw Error(ErrorKind::Data, path + ":" + e.what());
  }
}

const Value& DocRegistry::get(const std::string& name) const {
  auto it = docs_.find(name);
  if (it == docs_.end()) throw Error(ErrorKind::Data, "unknown document \"" + name + "\"");
  return it->second;
}

}  // namespace jpq
