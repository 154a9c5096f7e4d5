#include "jetrl/bridge/message.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <limits>

#include "json.hpp"

namespace jetrl::bridge {

namespace {

constexpr std::array<const char*, 8> kKindNames = {
    "hello", "spec", "reset", "obs", "step", "result", "error", "bye"};

void append_double(std::string& out, double v) {
  if (!std::isfinite(v))
    throw CodecError("non-finite number cannot be encoded", out.size());
  char buf[40];
  const int n = std::snprintf(buf, sizeof buf, "%.17g", v);
  out.append(buf, static_cast<std::size_t>(n));
  // Keep a fractional part so "-0" and large integral values stay doubles.
  if (std::string_view(buf, n).find_first_of(".eE") == std::string_view::npos)
    out += ".0";
}

void append_string(std::string& out, std::string_view s) {
  out += '"';
  for (const char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  out += '"';
}

void append_vector(std::string& out, const std::vector<double>& v) {
  out += '[';
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    append_double(out, v[i]);
  }
  out += ']';
}

using nlohmann::json;

const json& field(const json& payload, const char* name, std::size_t offset) {
  const auto it = payload.find(name);
  if (it == payload.end())
    throw CodecError(std::string("payload is missing '") + name + "'", offset);
  return *it;
}

double get_double(const json& payload, const char* name, std::size_t offset) {
  const json& v = field(payload, name, offset);
  if (!v.is_number())
    throw CodecError(std::string("'") + name + "' is not a number", offset);
  return v.get<double>();
}

std::size_t get_count(const json& payload, const char* name, std::size_t offset) {
  const json& v = field(payload, name, offset);
  if (!v.is_number_unsigned())
    throw CodecError(std::string("'") + name + "' is not a non-negative integer",
                     offset);
  return v.get<std::size_t>();
}

std::vector<double> get_vector(const json& payload, const char* name,
                               std::size_t offset) {
  const json& v = field(payload, name, offset);
  if (!v.is_array())
    throw CodecError(std::string("'") + name + "' is not an array", offset);
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& e : v) {
    if (!e.is_number())
      throw CodecError(std::string("'") + name + "' holds a non-number", offset);
    out.push_back(e.get<double>());
  }
  return out;
}

}  // namespace

const char* to_string(MessageKind kind) noexcept {
  return kKindNames[static_cast<std::size_t>(kind)];
}

std::optional<MessageKind> kind_from_string(std::string_view name) {
  for (std::size_t i = 0; i < kKindNames.size(); ++i)
    if (name == kKindNames[i]) return static_cast<MessageKind>(i);
  return std::nullopt;
}

Message Message::hello(int version) {
  Message m;
  m.kind = MessageKind::hello;
  m.version = version;
  return m;
}

Message Message::spec_of(const EnvSpec& spec) {
  Message m;
  m.kind = MessageKind::spec;
  m.spec = spec;
  return m;
}

Message Message::reset() {
  Message m;
  m.kind = MessageKind::reset;
  return m;
}

Message Message::observation(std::vector<double> obs) {
  Message m;
  m.kind = MessageKind::obs;
  m.obs = std::move(obs);
  return m;
}

Message Message::step(std::size_t action) {
  Message m;
  m.kind = MessageKind::step;
  m.action = action;
  return m;
}

Message Message::result(const StepResult& r) {
  Message m;
  m.kind = MessageKind::result;
  m.obs = r.obs;
  m.reward = r.reward;
  m.done = r.done;
  return m;
}

Message Message::error(std::string code, std::string text) {
  Message m;
  m.kind = MessageKind::error;
  m.code = std::move(code);
  m.text = std::move(text);
  return m;
}

Message Message::bye() {
  Message m;
  m.kind = MessageKind::bye;
  return m;
}

bool Message::operator==(const Message& o) const {
  if (kind != o.kind) return false;
  switch (kind) {
    case MessageKind::hello: return version == o.version;
    case MessageKind::spec: return spec == o.spec;
    case MessageKind::obs: return obs == o.obs;
    case MessageKind::step: return action == o.action;
    case MessageKind::result:
      return obs == o.obs && reward == o.reward && done == o.done;
    case MessageKind::error: return code == o.code && text == o.text;
    case MessageKind::reset:
    case MessageKind::bye: return true;
  }
  return false;
}

std::string encode(const Message& msg) {
  std::string out = "{\"kind\":\"";
  out += to_string(msg.kind);
  out += "\",\"payload\":{";
  switch (msg.kind) {
    case MessageKind::hello:
      out += "\"version\":" + std::to_string(msg.version);
      break;
    case MessageKind::spec:
      out += "\"obs_dim\":" + std::to_string(msg.spec.obs_dim);
      out += ",\"n_actions\":" + std::to_string(msg.spec.n_actions);
      out += ",\"max_decisions_per_episode\":" +
             std::to_string(msg.spec.max_decisions_per_episode);
      out += ",\"protocol_version\":" + std::to_string(msg.spec.protocol_version);
      break;
    case MessageKind::obs:
      out += "\"obs\":";
      append_vector(out, msg.obs);
      break;
    case MessageKind::step:
      out += "\"action\":" + std::to_string(msg.action);
      break;
    case MessageKind::result:
      out += "\"obs\":";
      append_vector(out, msg.obs);
      out += ",\"reward\":";
      append_double(out, msg.reward);
      out += msg.done ? ",\"done\":true" : ",\"done\":false";
      break;
    case MessageKind::error:
      out += "\"code\":";
      append_string(out, msg.code);
      out += ",\"message\":";
      append_string(out, msg.text);
      break;
    case MessageKind::reset:
    case MessageKind::bye:
      break;
  }
  out += "}}";
  return out;
}

Message decode(std::string_view line) {
  if (!line.empty() && line.back() == '\n') line.remove_suffix(1);
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

  json doc;
  try {
    doc = json::parse(line.begin(), line.end());
  } catch (const json::parse_error& e) {
    // nlohmann reports the 1-based position of the offending byte.
    const std::size_t offset = e.byte > 0 ? e.byte - 1 : 0;
    throw CodecError("malformed JSON: " + std::string(e.what()), offset);
  }
  if (!doc.is_object()) throw CodecError("message is not a JSON object", 0);
  const auto kind_it = doc.find("kind");
  if (kind_it == doc.end() || !kind_it->is_string())
    throw CodecError("message has no string 'kind'", 0);
  const std::string kind_name = kind_it->get<std::string>();
  const auto kind = kind_from_string(kind_name);
  const std::size_t offset = line.find("\"kind\"");
  if (!kind) throw UnknownKindError(kind_name, offset);

  static const json empty = json::object();
  const json* payload = &empty;
  if (const auto it = doc.find("payload"); it != doc.end()) {
    if (!it->is_object()) throw CodecError("'payload' is not an object", 0);
    payload = &*it;
  }
  const std::size_t poff = line.find("\"payload\"") == std::string_view::npos
                               ? 0
                               : line.find("\"payload\"");

  Message m;
  m.kind = *kind;
  switch (m.kind) {
    case MessageKind::hello: {
      const json& v = field(*payload, "version", poff);
      if (!v.is_number_integer()) throw CodecError("'version' is not an integer", poff);
      m.version = v.get<int>();
      break;
    }
    case MessageKind::spec: {
      m.spec.obs_dim = get_count(*payload, "obs_dim", poff);
      m.spec.n_actions = get_count(*payload, "n_actions", poff);
      m.spec.max_decisions_per_episode =
          get_count(*payload, "max_decisions_per_episode", poff);
      const json& v = field(*payload, "protocol_version", poff);
      if (!v.is_number_integer())
        throw CodecError("'protocol_version' is not an integer", poff);
      m.spec.protocol_version = v.get<int>();
      break;
    }
    case MessageKind::obs:
      m.obs = get_vector(*payload, "obs", poff);
      break;
    case MessageKind::step:
      m.action = get_count(*payload, "action", poff);
      break;
    case MessageKind::result: {
      m.obs = get_vector(*payload, "obs", poff);
      m.reward = get_double(*payload, "reward", poff);
      const json& d = field(*payload, "done", poff);
      if (!d.is_boolean()) throw CodecError("'done' is not a boolean", poff);
      m.done = d.get<bool>();
      break;
    }
    case MessageKind::error: {
      const json& c = field(*payload, "code", poff);
      if (!c.is_string()) throw CodecError("'code' is not a string", poff);
      m.code = c.get<std::string>();
      if (const auto it = payload->find("message"); it != payload->end()) {
        if (!it->is_string()) throw CodecError("'message' is not a string", poff);
        m.text = it->get<std::string>();
      }
      break;
    }
    case MessageKind::reset:
    case MessageKind::bye:
      break;
  }
  return m;
}

void EnvSpec::validate() const {
  if (obs_dim == 0 || n_actions == 0 || max_decisions_per_episode == 0 ||
      protocol_version <= 0)
    throw ConfigError("environment spec fields must all be positive");
}

}  // namespace jetrl::bridge
