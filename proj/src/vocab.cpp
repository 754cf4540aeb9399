#include "promptsent/vocab.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace promptsent {

Vocabulary::Vocabulary() {
  for (auto token : kReserved) add(token);
}

int Vocabulary::add(std::string_view token) {
  auto [it, inserted] =
      index_.try_emplace(std::string(token), static_cast<int>(tokens_.size()));
  if (inserted) tokens_.emplace_back(token);
  return it->second;
}

int Vocabulary::id(std::string_view token) const {
  auto it = index_.find(std::string(token));
  return it == index_.end() ? kUnk : it->second;
}

bool Vocabulary::contains(std::string_view token) const {
  return index_.count(std::string(token)) > 0;
}

const std::string& Vocabulary::token(int id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= tokens_.size()) {
    throw std::out_of_range("vocabulary id " + std::to_string(id) +
                            " out of range");
  }
  return tokens_[static_cast<std::size_t>(id)];
}

std::vector<int> Vocabulary::ids(std::span<const std::string> tokens) const {
  std::vector<int> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(id(t));
  return out;
}

std::vector<std::string> Vocabulary::tokens(std::span<const int> ids) const {
  std::vector<std::string> out;
  out.reserve(ids.size());
  for (int i : ids) out.push_back(token(i));
  return out;
}

void Vocabulary::save(std::ostream& out) const {
  for (const auto& t : tokens_) out << t << '\n';
}

void Vocabulary::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write vocabulary " + path.string());
  save(out);
}

Vocabulary Vocabulary::load(std::istream& in) {
  Vocabulary vocab;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    if (line_no < kReserved.size()) {
      if (line != kReserved[line_no]) {
        throw std::runtime_error("vocabulary line " + std::to_string(line_no + 1) +
                                 ": expected reserved token " +
                                 std::string(kReserved[line_no]));
      }
    } else {
      if (line.empty() || vocab.contains(line)) {
        throw std::runtime_error("vocabulary line " + std::to_string(line_no + 1) +
                                 ": empty or duplicate token");
      }
      vocab.add(line);
    }
    ++line_no;
  }
  if (line_no < kReserved.size()) {
    throw std::runtime_error("vocabulary is missing reserved tokens");
  }
  return vocab;
}

Vocabulary Vocabulary::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read vocabulary " + path.string());
  return load(in);
}

std::uint64_t Vocabulary::fingerprint() const {
  std::ostringstream text;
  save(text);
  std::uint64_t hash = 1469598103934665603ull;
  for (unsigned char c : text.str()) {
    hash ^= c;
    hash *= 1099511628211ull;
  }
  return hash;
}

}  // namespace promptsent
