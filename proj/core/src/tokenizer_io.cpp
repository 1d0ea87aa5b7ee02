#include "vs/tokenizer_io.hpp"

#include <algorithm>
#include <cstdio>

#include <nlohmann/json.hpp>

#include "vs/corpus.hpp"
#include "vs/hash.hpp"
#include "vs/utf8.hpp"

namespace vs {

namespace {

using ordered_json = nlohmann::ordered_json;

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

void append_uescape(std::string& out, unsigned char b) {
  char buf[8];
  std::snprintf(buf, sizeof(buf), "\\u%04X", b);
  out += buf;
}

void append_byte_escape(std::string& out, unsigned char b) {
  char buf[8];
  std::snprintf(buf, sizeof(buf), "<0x%02X>", b);
  out += buf;
}

bool needs_uescape(unsigned char b) {
  return b < 0x20 || b == 0x7F || b == ' ' || b == '\\' || b == '<';
}

}  // namespace

std::string token_surface(std::string_view token_bytes) {
  std::string out;
  if (token_bytes.size() == 1) {
    append_byte_escape(out, static_cast<unsigned char>(token_bytes[0]));
    return out;
  }
  std::size_t i = 0;
  while (i < token_bytes.size()) {
    unsigned char b = static_cast<unsigned char>(token_bytes[i]);
    if (needs_uescape(b)) {
      append_uescape(out, b);
      ++i;
    } else if (b < 0x80) {
      out.push_back(static_cast<char>(b));
      ++i;
    } else {
      std::size_t len = utf8_sequence_length(token_bytes, i);
      if (len == 0) {
        append_byte_escape(out, b);
        ++i;
      } else {
        out.append(token_bytes, i, len);
        i += len;
      }
    }
  }
  return out;
}

std::string surface_to_token(std::string_view surface) {
  std::string out;
  std::size_t i = 0;
  const std::size_t n = surface.size();
  while (i < n) {
    char c = surface[i];
    if (c == '\\') {
      if (i + 5 >= n || surface[i + 1] != 'u') {
        throw InputError("malformed \\u escape in token surface: " + std::string(surface));
      }
      std::uint32_t cp = 0;
      for (std::size_t k = 2; k < 6; ++k) {
        int v = hex_value(surface[i + k]);
        if (v < 0) {
          throw InputError("malformed \\u escape in token surface: " + std::string(surface));
        }
        cp = cp * 16 + static_cast<std::uint32_t>(v);
      }
      out += utf8_encode(cp);
      i += 6;
    } else if (c == '<') {
      if (i + 5 < n && surface[i + 1] == '0' && surface[i + 2] == 'x' && surface[i + 5] == '>') {
        int hi = hex_value(surface[i + 3]);
        int lo = hex_value(surface[i + 4]);
        if (hi < 0 || lo < 0) {
          throw InputError("malformed <0xHH> escape in token surface: " + std::string(surface));
        }
        out.push_back(static_cast<char>(hi * 16 + lo));
        i += 6;
      } else {
        throw InputError("unescaped '<' in token surface: " + std::string(surface));
      }
    } else {
      out.push_back(c);
      ++i;
    }
  }
  if (out.empty()) throw InputError("empty token surface");
  return out;
}

std::string save_tokenizer(const TokenizerModel& model) {
  ordered_json j;
  j["version"] = 1;
  ordered_json pre;
  pre["mode"] = "whitespace_punct";
  pre["lowercase"] = model.config().lowercase;
  j["pretokenizer"] = pre;

  std::vector<std::pair<std::string, TokenId>> entries;
  entries.reserve(model.vocab_size());
  for (std::size_t id = 0; id < model.vocab_size(); ++id) {
    entries.emplace_back(token_surface(model.token_bytes(static_cast<TokenId>(id))),
                         static_cast<TokenId>(id));
  }
  std::sort(entries.begin(), entries.end());
  ordered_json vocab = ordered_json::object();
  for (const auto& [surface, id] : entries) vocab[surface] = id;
  j["vocab"] = std::move(vocab);

  ordered_json merges = ordered_json::array();
  for (const MergeRule& m : model.merges()) {
    merges.push_back(token_surface(model.token_bytes(m.left)) + " " +
                     token_surface(model.token_bytes(m.right)));
  }
  j["merges"] = std::move(merges);
  return j.dump() + "\n";
}

void save_tokenizer_file(const TokenizerModel& model, const std::string& path) {
  write_file_bytes(path, save_tokenizer(model));
}

TokenizerModel load_tokenizer(std::string_view bytes) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(bytes);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed tokenizer document: ") + e.what());
  }
  if (!j.is_object()) throw InputError("malformed tokenizer document: not an object");
  if (!j.contains("version") || !j["version"].is_number_integer() || j["version"].get<int>() != 1) {
    throw InputError("unsupported tokenizer file version");
  }
  PreTokenizerConfig cfg;
  if (j.contains("pretokenizer")) {
    const auto& pre = j["pretokenizer"];
    if (!pre.is_object() || !pre.contains("mode") || !pre["mode"].is_string()) {
      throw InputError("malformed pretokenizer block");
    }
    if (pre["mode"].get<std::string>() != "whitespace_punct") {
      throw InputError("unknown pretokenizer mode: " + pre["mode"].get<std::string>());
    }
    if (pre.contains("lowercase")) {
      if (!pre["lowercase"].is_boolean()) throw InputError("pretokenizer.lowercase must be bool");
      cfg.lowercase = pre["lowercase"].get<bool>();
    }
  }
  if (!j.contains("vocab") || !j["vocab"].is_object()) {
    throw InputError("missing vocab object");
  }
  if (!j.contains("merges") || !j["merges"].is_array()) {
    throw InputError("missing merges array");
  }

  const auto& vocab_obj = j["vocab"];
  std::vector<std::string> vocab(vocab_obj.size());
  std::vector<bool> seen(vocab_obj.size(), false);
  for (auto it = vocab_obj.begin(); it != vocab_obj.end(); ++it) {
    if (!it.value().is_number_unsigned() && !it.value().is_number_integer()) {
      throw InputError("non-integer token id for " + it.key());
    }
    long long id = it.value().get<long long>();
    if (id < 0 || static_cast<std::size_t>(id) >= vocab.size()) {
      throw ValidationError("non-dense token ids: id " + std::to_string(id) + " out of range for " +
                            std::to_string(vocab.size()) + " tokens");
    }
    if (seen[static_cast<std::size_t>(id)]) {
      throw ValidationError("duplicate token id " + std::to_string(id));
    }
    seen[static_cast<std::size_t>(id)] = true;
    vocab[static_cast<std::size_t>(id)] = surface_to_token(it.key());
  }

  std::vector<std::pair<std::string, std::string>> merges;
  merges.reserve(j["merges"].size());
  for (const auto& entry : j["merges"]) {
    if (!entry.is_string()) throw InputError("merge entry is not a string");
    const std::string line = entry.get<std::string>();
    std::size_t sep = line.find(' ');
    if (sep == std::string::npos || line.find(' ', sep + 1) != std::string::npos) {
      throw InputError("merge entry must be '<left> <right>': " + line);
    }
    merges.emplace_back(surface_to_token(line.substr(0, sep)),
                        surface_to_token(line.substr(sep + 1)));
  }
  return TokenizerModel::build(std::move(vocab), merges, cfg);
}

TokenizerModel load_tokenizer_file(const std::string& path) {
  return load_tokenizer(read_file_bytes(path));
}

std::string model_content_hash(const TokenizerModel& model) {
  return bytes_content_hash(save_tokenizer(model));
}

}  // namespace vs
