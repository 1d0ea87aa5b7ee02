#include "vs/corpus.hpp"

#include <fstream>
#include <sstream>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "vs/types.hpp"

namespace vs {

std::string read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw InputError("read failed: " + path);
  return ss.str();
}

void write_file_bytes(const std::string& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot open for writing: " + path);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw InputError("write failed: " + path);
}

std::vector<std::string> read_text_corpus(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open file: " + path);
  std::vector<std::string> docs;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) docs.push_back(line);
  }
  return docs;
}

PairedCorpus read_paired_corpus(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open file: " + path);
  PairedCorpus corpus;
  std::unordered_set<std::string> seen_ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
      corpus.errors.push_back({line_no, "not a JSON object"});
      continue;
    }
    if (!j.contains("id") || !j["id"].is_string() || !j.contains("sd") || !j["sd"].is_string() ||
        !j.contains("rs") || !j["rs"].is_string()) {
      corpus.errors.push_back({line_no, "missing or non-string id/sd/rs field"});
      continue;
    }
    PairedRecord rec{j["id"].get<std::string>(), j["sd"].get<std::string>(),
                     j["rs"].get<std::string>()};
    if (!seen_ids.insert(rec.id).second) {
      throw InputError("duplicate document id '" + rec.id + "' at line " +
                       std::to_string(line_no));
    }
    corpus.records.push_back(std::move(rec));
  }
  return corpus;
}

void write_paired_corpus(const std::vector<PairedRecord>& records, const std::string& path) {
  std::string out;
  for (const PairedRecord& rec : records) {
    nlohmann::ordered_json j;
    j["id"] = rec.id;
    j["sd"] = rec.sd;
    j["rs"] = rec.rs;
    out += j.dump();
    out += '\n';
  }
  write_file_bytes(path, out);
}

}  // namespace vs
