// SPDX-License-Identifier: Apache-2.0

#include "diffsense/config.hpp"

#include <charconv>
#include <cmath>
#include <map>
#include <set>

#include "diffsense/io.hpp"

namespace diffsense {

namespace {

struct Value {
  enum class Type { String, Integer, Real, Boolean, Array } type = Type::String;
  std::string text;
  std::int64_t integer = 0;
  double real = 0.0;
  bool boolean = false;
  std::vector<Value> items;
  int line = 0;
};

using Table = std::map<std::string, Value>;

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  std::map<std::string, Table> run() {
    std::map<std::string, Table> tables;
    Table* current = &tables[""];
    while (pos_ < text_.size()) {
      skip_blank();
      if (pos_ >= text_.size()) break;
      char c = text_[pos_];
      if (c == '\n') {
        advance_line();
      } else if (c == '#') {
        skip_comment();
      } else if (c == '[') {
        ++pos_;
        std::string name = bare_key();
        skip_blank();
        expect(']');
        if (name.empty()) fail("empty table name");
        if (seen_tables_.contains(name)) fail("duplicate table [" + name + "]");
        seen_tables_.insert(name);
        current = &tables[name];
        end_of_line();
      } else {
        std::string key = bare_key();
        if (key.empty()) fail("expected key");
        skip_blank();
        expect('=');
        skip_blank();
        Value v = value();
        if (current->contains(key)) fail("duplicate key '" + key + "'");
        (*current)[key] = std::move(v);
        end_of_line();
      }
    }
    return tables;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError("line " + std::to_string(line_) + ": " + what);
  }

  void skip_blank() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\r'))
      ++pos_;
  }

  void skip_comment() {
    while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
  }

  void advance_line() {
    ++pos_;
    ++line_;
  }

  void end_of_line() {
    skip_blank();
    if (pos_ < text_.size() && text_[pos_] == '#') skip_comment();
    if (pos_ < text_.size()) {
      if (text_[pos_] != '\n') fail("unexpected trailing text");
      advance_line();
    }
  }

  void expect(char c) {
    if (pos_ >= text_.size() || text_[pos_] != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  std::string bare_key() {
    std::size_t start = pos_;
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-') ++pos_;
      else break;
    }
    return std::string(text_.substr(start, pos_ - start));
  }

  Value value() {
    Value v;
    v.line = line_;
    if (pos_ >= text_.size()) fail("missing value");
    char c = text_[pos_];
    if (c == '"') {
      v.type = Value::Type::String;
      v.text = quoted();
    } else if (c == '[') {
      ++pos_;
      v.type = Value::Type::Array;
      for (;;) {
        skip_blank();
        if (pos_ < text_.size() && text_[pos_] == ']') {
          ++pos_;
          break;
        }
        Value item = value();
        if (item.type == Value::Type::Array) fail("nested arrays are not supported");
        v.items.push_back(std::move(item));
        skip_blank();
        if (pos_ < text_.size() && text_[pos_] == ',') {
          ++pos_;
        } else if (pos_ < text_.size() && text_[pos_] == ']') {
          ++pos_;
          break;
        } else {
          fail("expected ',' or ']' in array");
        }
      }
    } else {
      std::size_t start = pos_;
      while (pos_ < text_.size() && text_[pos_] != ',' && text_[pos_] != ']' &&
             text_[pos_] != '#' && text_[pos_] != '\n' && text_[pos_] != ' ' &&
             text_[pos_] != '\t' && text_[pos_] != '\r')
        ++pos_;
      std::string_view word = text_.substr(start, pos_ - start);
      if (word == "true" || word == "false") {
        v.type = Value::Type::Boolean;
        v.boolean = word == "true";
      } else if (!number(word, v)) {
        fail("invalid value '" + std::string(word) + "'");
      }
    }
    return v;
  }

  static bool number(std::string_view word, Value& v) {
    if (word.empty()) return false;
    std::string clean;
    for (char c : word) {
      if (c != '_') clean += c;
    }
    const char* b = clean.data() + (clean[0] == '+' ? 1 : 0);
    const char* e = clean.data() + clean.size();
    if (clean.find_first_of(".eE") == std::string::npos) {
      auto [p, ec] = std::from_chars(b, e, v.integer);
      if (ec != std::errc() || p != e) return false;
      v.type = Value::Type::Integer;
      v.real = static_cast<double>(v.integer);
      return true;
    }
    auto [p, ec] = std::from_chars(b, e, v.real);
    if (ec != std::errc() || p != e || !std::isfinite(v.real)) return false;
    v.type = Value::Type::Real;
    return true;
  }

  std::string quoted() {
    ++pos_;
    std::string out;
    while (pos_ < text_.size()) {
      char c = text_[pos_++];
      if (c == '"') return out;
      if (c == '\n') fail("unterminated string");
      if (c != '\\') {
        out += c;
        continue;
      }
      if (pos_ >= text_.size()) break;
      char esc = text_[pos_++];
      switch (esc) {
        case 'n': out += '\n'; break;
        case 't': out += '\t'; break;
        case '"': out += '"'; break;
        case '\\': out += '\\'; break;
        default: fail(std::string("unsupported escape \\") + esc);
      }
    }
    fail("unterminated string");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  std::set<std::string> seen_tables_;
};

class Reader {
 public:
  Reader(const Table& table, std::string section) : table_(table), section_(std::move(section)) {}

  const Value* get(const std::string& key) {
    used_.insert(key);
    auto it = table_.find(key);
    return it == table_.end() ? nullptr : &it->second;
  }

  [[noreturn]] void fail(const Value& v, const std::string& key, const std::string& what) const {
    throw ConfigError("line " + std::to_string(v.line) + ": " + section_ + "." + key + ": " + what);
  }

  void string(const std::string& key, std::string& out) {
    if (const Value* v = get(key)) {
      if (v->type != Value::Type::String) fail(*v, key, "expected string");
      out = v->text;
    }
  }

  void real(const std::string& key, double& out) {
    if (const Value* v = get(key)) {
      if (v->type != Value::Type::Real && v->type != Value::Type::Integer)
        fail(*v, key, "expected number");
      out = v->real;
    }
  }

  template <class Int>
  void integer(const std::string& key, Int& out) {
    if (const Value* v = get(key)) {
      if (v->type != Value::Type::Integer) fail(*v, key, "expected integer");
      if (v->integer < 0) fail(*v, key, "must not be negative");
      out = static_cast<Int>(v->integer);
    }
  }

  void boolean(const std::string& key, bool& out) {
    if (const Value* v = get(key)) {
      if (v->type != Value::Type::Boolean) fail(*v, key, "expected true or false");
      out = v->boolean;
    }
  }

  template <class T>
  void array(const std::string& key, std::vector<T>& out) {
    const Value* v = get(key);
    if (!v) return;
    if (v->type != Value::Type::Array) fail(*v, key, "expected array");
    out.clear();
    for (const auto& item : v->items) {
      if constexpr (std::is_same_v<T, bool>) {
        if (item.type != Value::Type::Boolean) fail(item, key, "expected booleans");
        out.push_back(item.boolean);
      } else {
        if (item.type != Value::Type::Integer || item.integer < 0)
          fail(item, key, "expected non-negative integers");
        out.push_back(static_cast<T>(item.integer));
      }
    }
  }

  void finish() const {
    for (const auto& [key, v] : table_) {
      if (key == "api_key") fail(v, key, std::string("API keys are read from ") + kApiKeyEnv + " only");
      if (!used_.contains(key)) fail(v, key, "unknown key");
    }
  }

 private:
  const Table& table_;
  std::string section_;
  std::set<std::string> used_;
};

BackendSettings read_backend(const Table& table, const std::string& section) {
  BackendSettings s;
  Reader r(table, section);
  std::string kind = "mock";
  r.string("kind", kind);
  if (kind == "mock") s.kind = BackendKind::Mock;
  else if (kind == "http") s.kind = BackendKind::Http;
  else r.fail(*r.get("kind"), "kind", "expected \"mock\" or \"http\"");

  r.string("base_url", s.http.base_url);
  r.string("model", s.http.model);
  r.real("temperature", s.http.temperature);
  r.real("top_p", s.http.top_p);
  std::string effort;
  r.string("reasoning_effort", effort);
  if (!effort.empty()) {
    s.http.reasoning_effort = parse_reasoning_effort(effort);
    if (!s.http.reasoning_effort)
      r.fail(*r.get("reasoning_effort"), "reasoning_effort", "expected low, medium or high");
  }
  r.integer("max_retries", s.http.max_retries);
  std::int64_t timeout = s.http.timeout.count();
  std::int64_t backoff = s.http.backoff_base.count();
  r.integer("timeout_ms", timeout);
  r.integer("backoff_ms", backoff);
  s.http.timeout = std::chrono::milliseconds(timeout);
  s.http.backoff_base = std::chrono::milliseconds(backoff);

  r.real("verdict_threshold", s.mock.threshold);
  r.string("verdict_reply", s.mock.fixed_reply);
  if (!s.mock.fixed_reply.empty()) s.mock.mode = MockVerdictPolicy::Mode::Fixed;
  r.finish();
  return s;
}

}  // namespace

void AppConfig::validate() const {
  backend.http.validate();
  if (predict_backend) predict_backend->http.validate();
  if (predict.k == 0) throw ConfigError("predictor.k must be at least 1");
  if (concurrency == 0) throw ConfigError("summarizer.concurrency must be at least 1");
  if (limits.code_chars < 256 || limits.diff_chars < 256)
    throw ConfigError("summarizer budgets must be at least 256 characters");
  if (eval_k.empty()) throw ConfigError("evaluate.k_values must not be empty");
  for (auto k : eval_k) {
    if (k == 0) throw ConfigError("evaluate.k_values: k must be at least 1");
  }
  if (eval_changelog.empty()) throw ConfigError("evaluate.changelog_modes must not be empty");
}

AppConfig parse_config(std::string_view text) {
  auto tables = Parser(text).run();
  AppConfig cfg;
  for (const auto& [name, table] : tables) {
    if (name.empty()) {
      if (!table.empty()) {
        const auto& [key, v] = *table.begin();
        throw ConfigError("line " + std::to_string(v.line) + ": key '" + key +
                          "' must be inside a [section]");
      }
    } else if (name == "backend") {
      cfg.backend = read_backend(table, name);
    } else if (name == "predict_backend") {
      cfg.predict_backend = read_backend(table, name);
    } else if (name == "predictor") {
      Reader r(table, name);
      r.integer("k", cfg.predict.k);
      r.boolean("changelog", cfg.predict.include_changelog);
      r.finish();
    } else if (name == "summarizer") {
      Reader r(table, name);
      r.integer("concurrency", cfg.concurrency);
      r.integer("code_budget", cfg.limits.code_chars);
      r.integer("diff_budget", cfg.limits.diff_chars);
      r.finish();
    } else if (name == "evaluate") {
      Reader r(table, name);
      r.array("k_values", cfg.eval_k);
      r.array("changelog_modes", cfg.eval_changelog);
      r.finish();
    } else {
      throw ConfigError("unknown section [" + name + "]");
    }
  }
  cfg.validate();
  return cfg;
}

AppConfig load_config(const std::filesystem::path& path) {
  try {
    return parse_config(read_text_file(path));
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

std::unique_ptr<ChatBackend> make_backend(const BackendSettings& settings) {
  if (settings.kind == BackendKind::Http) return HttpChatBackend::from_environment(settings.http);
  return std::make_unique<MockChatBackend>(default_mock_rules(), settings.mock);
}

}  // namespace diffsense
