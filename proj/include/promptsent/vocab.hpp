#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace promptsent {

/// Dense token <-> id map. Ids 0-4 are reserved for PAD, UNK, BOS, EOS and
/// MASK in that order.
class Vocabulary {
 public:
  static constexpr int kPad = 0;
  static constexpr int kUnk = 1;
  static constexpr int kBos = 2;
  static constexpr int kEos = 3;
  static constexpr int kMask = 4;
  static constexpr std::array<std::string_view, 5> kReserved{
      "[PAD]", "[UNK]", "[BOS]", "[EOS]", "[MASK]"};

  Vocabulary();

  /// Returns the id of `token`, inserting it if new.
  int add(std::string_view token);
  /// Id of `token`, or kUnk.
  int id(std::string_view token) const;
  bool contains(std::string_view token) const;
  const std::string& token(int id) const;
  std::size_t size() const { return tokens_.size(); }

  std::vector<int> ids(std::span<const std::string> tokens) const;
  std::vector<std::string> tokens(std::span<const int> ids) const;

  /// One token per line; line number is the id.
  void save(std::ostream& out) const;
  void save(const std::filesystem::path& path) const;
  /// Throws std::runtime_error on a missing/misordered reserved block or a
  /// duplicate token.
  static Vocabulary load(std::istream& in);
  static Vocabulary load(const std::filesystem::path& path);

  /// FNV-1a 64 over the saved text form.
  std::uint64_t fingerprint() const;

  bool operator==(const Vocabulary& other) const { return tokens_ == other.tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> index_;
};

}  // namespace promptsent
