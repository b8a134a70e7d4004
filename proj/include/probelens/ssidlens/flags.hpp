#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <string_view>
#include <vector>

namespace probelens::ssidlens {

enum class Flag : std::uint8_t {
  ProbablePassword = 1 << 0,
  DigitGroupVariant = 1 << 1,
  KeywordPassword = 1 << 2,
  Email = 1 << 3,
  DictionaryName = 1 << 4,
  TypoGroupMember = 1 << 5,
};

inline constexpr std::array<Flag, 6> kAllFlags = {
    Flag::ProbablePassword, Flag::DigitGroupVariant, Flag::KeywordPassword,
    Flag::Email,            Flag::DictionaryName,    Flag::TypoGroupMember};

constexpr std::string_view to_string(Flag f) {
  switch (f) {
    case Flag::ProbablePassword: return "ProbablePassword";
    case Flag::DigitGroupVariant: return "DigitGroupVariant";
    case Flag::KeywordPassword: return "KeywordPassword";
    case Flag::Email: return "Email";
    case Flag::DictionaryName: return "DictionaryName";
    case Flag::TypoGroupMember: return "TypoGroupMember";
  }
  return "?";
}

class FlagSet {
 public:
  constexpr FlagSet() = default;
  constexpr FlagSet(std::initializer_list<Flag> flags) {
    for (Flag f : flags) set(f);
  }

  constexpr void set(Flag f) { bits_ |= static_cast<std::uint8_t>(f); }
  constexpr bool has(Flag f) const { return bits_ & static_cast<std::uint8_t>(f); }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr FlagSet& operator|=(FlagSet other) {
    bits_ |= other.bits_;
    return *this;
  }

  std::vector<std::string_view> names() const {
    std::vector<std::string_view> out;
    for (Flag f : kAllFlags) {
      if (has(f)) out.push_back(to_string(f));
    }
    return out;
  }

  friend constexpr bool operator==(FlagSet, FlagSet) = default;

 private:
  std::uint8_t bits_ = 0;
};

}  // namespace probelens::ssidlens
