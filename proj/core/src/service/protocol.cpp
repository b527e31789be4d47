// Copyright 2026 The IDRL Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "idrl/service/protocol.hpp"

#include <boost/beast/core/detail/base64.hpp>
#include <nlohmann/json.hpp>

#include "idrl/errors.hpp"

namespace idrl::service {

namespace b64 = boost::beast::detail::base64;
using nlohmann::json;

std::string base64_encode(std::string_view bytes) {
  std::string out(b64::encoded_size(bytes.size()), '\0');
  out.resize(b64::encode(out.data(), bytes.data(), bytes.size()));
  return out;
}

std::string base64_decode(std::string_view text) {
  if (text.size() % 4 != 0) throw FormatError("base64 length is not a multiple of 4");
  std::string out(b64::decoded_size(text.size()), '\0');
  const auto [written, read] = b64::decode(out.data(), text.data(), text.size());
  // The decoder stops at the first '='; only padding may follow.
  const std::string_view rest = text.substr(read);
  if (rest.size() > 2 || rest.find_first_not_of('=') != std::string_view::npos) {
    throw FormatError("invalid base64 character");
  }
  out.resize(written);
  return out;
}

std::string encode_frame(const Frame& frame) {
  const auto& bytes = frame.bytes();
  return base64_encode({reinterpret_cast<const char*>(bytes.data()), bytes.size()});
}

Frame decode_frame(std::string_view base64, int width, int height) {
  const std::string raw = base64_decode(base64);
  if (width <= 0 || height <= 0 ||
      raw.size() != static_cast<std::size_t>(width) * height * Frame::kChannels) {
    throw FormatError("frame payload does not match its dimensions");
  }
  return Frame(height, width, std::vector<std::uint8_t>(raw.begin(), raw.end()));
}

namespace {

struct ToJson {
  json operator()(const StateMessage& m) const {
    return {{"type", "state"},
            {"step", m.step},
            {"episode", m.episode},
            {"budget_remaining", m.budget_remaining},
            {"last_reward", m.last_reward},
            {"cumulative_reward", m.cumulative_reward},
            {"awaiting_advice", m.awaiting_advice},
            {"width", m.width},
            {"height", m.height},
            {"frame", m.frame}};
  }
  json operator()(const AdviceMessage& m) const {
    return {{"type", "advice"}, {"step", m.step}, {"action", m.action}};
  }
  json operator()(const RejectMessage& m) const {
    json j = {{"type", "reject"}, {"reason", m.reason}};
    if (m.step) j["step"] = *m.step;
    return j;
  }
  json operator()(const DoneMessage& m) const { return {{"type", "done"}, {"r_total", m.r_total}}; }
};

std::uint64_t index_field(const json& j, const char* name) {
  auto it = j.find(name);
  if (it == j.end()) throw FormatError(std::string("missing field '") + name + "'");
  if (!it->is_number_unsigned()) throw FormatError(std::string("field '") + name + "' must be a non-negative integer");
  return it->get<std::uint64_t>();
}

template <typename T>
T field(const json& j, const char* name) {
  auto it = j.find(name);
  if (it == j.end()) throw FormatError(std::string("missing field '") + name + "'");
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw FormatError(std::string("field '") + name + "' has the wrong type");
  }
}

}  // namespace

std::string serialize(const Message& m) { return std::visit(ToJson{}, m).dump(); }

Message parse_message(std::string_view text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw FormatError("message is not a JSON object");
  const auto type = field<std::string>(j, "type");
  if (type == "advice") {
    AdviceMessage m;
    m.step = index_field(j, "step");
    auto it = j.find("action");
    if (it == j.end()) throw FormatError("missing field 'action'");
    if (!it->is_number_integer()) throw FormatError("field 'action' must be an integer");
    const auto a = it->get<std::int64_t>();
    m.action = a < -1 || a > 1000 ? -1 : static_cast<int>(a);
    return m;
  }
  if (type == "state") {
    StateMessage m;
    m.step = field<std::uint64_t>(j, "step");
    m.episode = field<std::uint64_t>(j, "episode");
    m.budget_remaining = field<int>(j, "budget_remaining");
    m.last_reward = field<double>(j, "last_reward");
    m.cumulative_reward = field<double>(j, "cumulative_reward");
    m.awaiting_advice = field<bool>(j, "awaiting_advice");
    m.width = field<int>(j, "width");
    m.height = field<int>(j, "height");
    m.frame = field<std::string>(j, "frame");
    return m;
  }
  if (type == "reject") {
    RejectMessage m;
    m.reason = field<std::string>(j, "reason");
    if (j.contains("step")) m.step = field<std::uint64_t>(j, "step");
    return m;
  }
  if (type == "done") return DoneMessage{field<double>(j, "r_total")};
  throw FormatError("unknown message type '" + type + "'");
}

}  // namespace idrl::service
